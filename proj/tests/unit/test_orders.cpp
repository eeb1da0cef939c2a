#include "filterforge/orders.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>
#include <random>

using namespace filterforge;

namespace {

const PauliAxis X = PauliAxis::x, Y = PauliAxis::y, Z = PauliAxis::z;
const std::vector<PauliAxis> kZ{Z};

ControlMatrix udd(int n) { return ControlMatrix(udd_sequence(n, 1.0), kZ); }
ControlMatrix cdd(int k) { return ControlMatrix(cdd_sequence(k, 1.0), kZ); }
IndexTuple zz(int alpha) { return IndexTuple::repeated(alpha, Z, Z); }

}  // namespace

TEST(OrderType, SentinelMinimum) {
  EXPECT_EQ(min(Order::exact(3), Order::exact(5)), Order::exact(3));
  EXPECT_EQ(min(Order::exact(3), Order::at_least(5)), Order::exact(3));
  EXPECT_EQ(min(Order::exact(5), Order::at_least(5)), Order::exact(5));
  EXPECT_EQ(min(Order::exact(7), Order::at_least(5)), Order::at_least(5));
  EXPECT_EQ(min(Order::at_least(7), Order::at_least(5)), Order::at_least(5));
  EXPECT_EQ((Order::at_least(2) + 3), Order::at_least(5));
  EXPECT_EQ(Order::at_least(13).str(), ">=13");
}

TEST(RelevantIndices, PauliProducts) {
  auto r2 = relevant_indices(2, kZ);
  for (const auto& t : r2.tuples) {
    EXPECT_FALSE(t.index.v[0] == t.index.v[1]);
  }
  EXPECT_EQ(r2.tuples.size(), 6u);  // 9 v-pairs minus the 3 squares
  auto r3 = relevant_indices(3, kZ);
  bool found = false;
  for (const auto& t : r3.tuples) {
    if (t.index.v == std::vector<PauliAxis>{Z, Z, Z}) {
      found = true;
      EXPECT_EQ(t.product.axis, Z);
      EXPECT_EQ(t.product.phase, 0);
    }
  }
  EXPECT_TRUE(found);
  for (const auto& t : r2.tuples) {
    if (t.index.v == std::vector<PauliAxis>{X, Y}) EXPECT_EQ(t.product.axis, Z);
  }
}

TEST(RelevantIndicesProperty, ComplementProductsToIdentity) {
  for (int a = 1; a <= 4; ++a) {
    auto r = relevant_indices(a, std::vector<PauliAxis>{X, Z});
    std::size_t total = 1;
    for (int j = 0; j < a; ++j) total *= 6;
    std::size_t identity = 0;
    // count identity products by brute force over v
    for (std::size_t code = 0; code < total; ++code) {
      std::size_t c = code;
      std::vector<PauliAxis> v;
      for (int j = 0; j < a; ++j) {
        v.push_back(static_cast<PauliAxis>((c % 6) % 3));
        c /= 6;
      }
      identity += pauli_product(v).is_identity();
    }
    EXPECT_EQ(r.tuples.size() + identity, total);
  }
}

TEST(RelevantIndices, SkipsZeroRows) {
  auto r = relevant_indices(3, udd(2), kZ);
  ASSERT_EQ(r.tuples.size(), 1u);
  EXPECT_EQ(r.tuples[0].index, zz(3));
}

TEST(FilteringOrder, SpecExamples) {
  ControlMatrix free_cm(free_evolution(Rational(1)), kZ);
  EXPECT_EQ(fff_filtering_order(free_cm, zz(1), 12), Order::exact(0));
  for (int d = 1; d <= 6; ++d) EXPECT_EQ(fff_filtering_order(udd(d), zz(1), 12), Order::exact(d));
  EXPECT_EQ(fff_filtering_order(udd(4), zz(3), 12), Order::exact(2));
  EXPECT_EQ(fff_filtering_order(udd(4), zz(1), 2), Order::at_least(3));
}

TEST(ProtocolFo, SpecExamples) {
  EXPECT_EQ(protocol_fo(cdd(2), 5, kZ, 12), Order::exact(2));
  EXPECT_EQ(protocol_fo(udd(3), 7, kZ, 12), Order::exact(1));
  EXPECT_EQ(protocol_fo(udd(4), 7, kZ, 12), Order::exact(2));
}

TEST(ProtocolCo, SpecExamples) {
  for (int n = 1; n <= 4; ++n) EXPECT_EQ(protocol_co(udd(n), kZ, 7, 12), Order::exact(n));
  for (int k = 1; k <= 3; ++k) EXPECT_EQ(protocol_co(cdd(k), kZ, 7, 12), Order::exact(k));
  ControlMatrix free_cm(free_evolution(Rational(1)), kZ);
  EXPECT_EQ(protocol_co(free_cm, kZ, 7, 12), Order::exact(0));
}

TEST(ProtocolCo, CapsProduceLowerBounds) {
  // UDD_4 with alpha_max 3 and degree cap 1: every tuple unresolved
  Order co = protocol_co(udd(4), kZ, 3, 1);
  EXPECT_TRUE(co.lower_bound);
  EXPECT_LE(co.value, 4);
}

TEST(NoGo, SpecExamples) {
  ControlMatrix free_cm(free_evolution(Rational(1)), kZ);
  auto r = quasistatic_no_go(free_cm, kZ, 7);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.first_alpha, 1);
  EXPECT_TRUE(quasistatic_no_go(udd(1), kZ, 5).pass);
  ControlMatrix xz(udd_sequence(1, 1.0), {X, Z});
  auto f = quasistatic_no_go(xz, {X, Z}, 3);
  EXPECT_FALSE(f.pass);
  EXPECT_EQ(f.first_alpha, 1);
}

TEST(AnalyzeOrders, UddReport) {
  ProtocolOrders r = analyze_orders(udd(4));
  EXPECT_EQ(r.co, Order::exact(4));
  EXPECT_EQ(r.fo_by_level.at(1), Order::exact(4));
  EXPECT_EQ(r.fo_by_level.at(3), Order::exact(2));
  EXPECT_TRUE(r.resolved);
  auto j = r.to_json();
  EXPECT_EQ(j["co"], 4);
  EXPECT_EQ(j["fo_by_level"]["1"], 4);
  EXPECT_EQ(j["caps"]["alpha_max"], 7);
  for (const auto& e : r.per_index) {
    if (e.phi.resolved()) EXPECT_EQ(e.delta.value, e.index.alpha() + e.phi.value - 1);
  }
}

TEST(AnalyzeOrdersProperty, InvariantsOnRandomProtocols) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 8; ++trial) {
    ControlMatrix cm(ffgen::random_exact_sequence(rng, 5, 16, true), kZ);
    ProtocolOrders r = analyze_orders(cm, {5, 8});
    Order prev = r.fo_by_level.at(1);
    for (const auto& [k, o] : r.fo_by_level) {
      if (o.resolved() && prev.resolved()) EXPECT_LE(o.value, prev.value);
      prev = o;
    }
    for (const auto& e : r.per_index) {
      EXPECT_EQ(e.delta, e.phi + (e.index.alpha() - 1));
    }
    const Order& fo = r.fo_by_level.at(5);
    if (fo.resolved() && r.co.resolved()) EXPECT_LE(fo.value, r.co.value);
  }
}

TEST(AnalyzeOrders, DeterministicAcrossThreadCounts) {
  ::setenv("FILTER_FORGE_THREADS", "1", 1);
  auto a = analyze_orders(cdd(3), {5, 6}).to_json().dump();
  ::setenv("FILTER_FORGE_THREADS", "4", 1);
  auto b = analyze_orders(cdd(3), {5, 6}).to_json().dump();
  ::unsetenv("FILTER_FORGE_THREADS");
  EXPECT_EQ(a, b);
}

TEST(FilteringOrder, UddSevenAgainstExactAlgebraicMoment) {
  // UDD_5 alpha = 7, k = e_4: exact value from symbolic integration
  Scalar m = moment(udd(5), zz(7), {0, 0, 0, 1, 0, 0, 0});
  Real want = Real(18817) / 688128 - Real(97) * boost::multiprecision::sqrt(Real(3)) / 6144;
  EXPECT_LT(abs(m.real() - want), Real("1e-70"));
  EXPECT_EQ(fff_filtering_order(udd(5), zz(7), 4), Order::exact(1));
  EXPECT_EQ(fff_filtering_order(udd(6), zz(7), 4), Order::exact(2));
}

TEST(ProtocolCo, UnexploredOrdersUseFirstRelevantAlpha) {
  // z-only rows: relevant orders are odd, so alpha_max = 7 bounds the rest by 8
  for (int n = 5; n <= 8; ++n) EXPECT_EQ(protocol_co(udd(n), kZ, 7, 12), Order::exact(n));
  EXPECT_EQ(analyze_orders(udd(8)).co, Order::exact(8));
  Order c = protocol_co(udd(4), kZ, 3, 12);
  EXPECT_EQ(c, Order::exact(4));
}
