#include "filterforge/orders.hpp"

#include "filterforge/gff.hpp"
#include "filterforge/parallel.hpp"

#include <limits>
#include <stdexcept>

namespace filterforge {

std::string Order::str() const {
  return (lower_bound ? ">=" : "") + std::to_string(value);
}

nlohmann::json Order::to_json() const {
  if (!lower_bound) return value;
  return nlohmann::json{{"value", value}, {"lower_bound", true}};
}

Order min(const Order& a, const Order& b) {
  if (a.resolved() && b.resolved()) return Order::exact(std::min(a.value, b.value));
  if (a.resolved()) return a.value <= b.value ? a : Order::at_least(b.value);
  if (b.resolved()) return b.value <= a.value ? b : Order::at_least(a.value);
  return Order::at_least(std::min(a.value, b.value));
}

Order operator+(const Order& o, int shift) { return {o.value + shift, o.lower_bound}; }

namespace {

void check_caps(int alpha, int degree_cap) {
  if (alpha < 1) throw std::invalid_argument("alpha must be >= 1");
  if (alpha > kMaxAlpha) throw UnsupportedError("alpha exceeds the configured cap of 7");
  if (degree_cap < 0) throw std::invalid_argument("degree_cap must be nonnegative");
}

RelevantSet enumerate_relevant(int alpha, const std::vector<std::pair<PauliAxis, PauliAxis>>& pairs) {
  RelevantSet out{alpha, {}};
  if (pairs.empty()) return out;
  std::vector<std::size_t> digit(alpha, 0);
  for (;;) {
    std::vector<PauliAxis> u, v;
    for (int j = 0; j < alpha; ++j) {
      u.push_back(pairs[digit[j]].first);
      v.push_back(pairs[digit[j]].second);
    }
    PauliString p = pauli_product(v);
    if (!p.is_identity()) out.tuples.push_back({IndexTuple(u, v), p});
    int j = alpha - 1;
    while (j >= 0 && ++digit[j] == pairs.size()) digit[j--] = 0;
    if (j < 0) break;
  }
  return out;
}

std::vector<std::pair<PauliAxis, PauliAxis>> all_pairs(const std::vector<PauliAxis>& error_axes) {
  std::vector<std::pair<PauliAxis, PauliAxis>> pairs;
  for (PauliAxis u : error_axes) {
    for (PauliAxis v : kAllAxes) pairs.emplace_back(u, v);
  }
  return pairs;
}

Order fold(const std::vector<Order>& orders, Order empty) {
  if (orders.empty()) return empty;
  Order acc = orders.front();
  for (const auto& o : orders) acc = min(acc, o);
  return acc;
}

// No relevant tuple at all: nothing is ever filtered, report "no finite order".
Order no_tuples(int cap) { return Order::at_least(cap + 1); }

std::vector<Order> orders_for(const ControlMatrix& cm, const std::vector<RelevantTuple>& tuples,
                              int degree_cap, bool generalized) {
  std::vector<Order> out(tuples.size());
  parallel_for(tuples.size(), [&](std::size_t i) {
    out[i] = generalized ? gff_filtering_order(cm, tuples[i].index, degree_cap)
                         : fff_filtering_order(cm, tuples[i].index, degree_cap);
  });
  return out;
}

std::vector<std::pair<PauliAxis, PauliAxis>> active_pairs(const ControlMatrix& cm,
                                                         const std::vector<PauliAxis>& error_axes) {
  if (error_axes.empty()) throw std::invalid_argument("at least one error axis is required");
  std::vector<std::pair<PauliAxis, PauliAxis>> pairs;
  for (auto [u, v] : all_pairs(error_axes)) {
    if (!cm.has_error_axis(u)) {
      throw UnsupportedError(std::string("error axis ") + label(u) + " not carried by the matrix");
    }
    if (!cm.identically_zero(u, v)) pairs.emplace_back(u, v);
  }
  return pairs;
}

// Lower bound on alpha + phi - 1 over orders above alpha_max: the first such
// alpha with a non-identity Pauli product. Products up to phase form the Klein
// group {I, x, y, z} ~ (Z_2)^2 with x = 1, y = 2, z = 3 and product = xor.
Order unexplored_co_bound(const std::vector<std::pair<PauliAxis, PauliAxis>>& pairs, int alpha_max) {
  unsigned letters = 0;
  for (auto [u, v] : pairs) letters |= 1u << (index(v) + 1);
  unsigned reach = 1u;  // alpha = 0: identity only
  for (int a = 1; a <= alpha_max + 4; ++a) {
    unsigned next = 0;
    for (int r = 0; r < 4; ++r) {
      if (!(reach & (1u << r))) continue;
      for (int l = 1; l < 4; ++l) {
        if (letters & (1u << l)) next |= 1u << (r ^ l);
      }
    }
    reach = next;
    if (a > alpha_max && (reach & ~1u)) return Order::at_least(a - 1);
  }
  return Order::at_least(std::numeric_limits<int>::max() / 2);
}

}  // namespace

RelevantSet relevant_indices(int alpha, const std::vector<PauliAxis>& error_axes) {
  check_caps(alpha, 0);
  if (error_axes.empty()) throw std::invalid_argument("at least one error axis is required");
  return enumerate_relevant(alpha, all_pairs(error_axes));
}

RelevantSet relevant_indices(int alpha, const ControlMatrix& cm,
                             const std::vector<PauliAxis>& error_axes) {
  check_caps(alpha, 0);
  return enumerate_relevant(alpha, active_pairs(cm, error_axes));
}

Order fff_filtering_order(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap) {
  check_caps(idx.alpha(), degree_cap);
  const Real bound_T = cm.real().duration();
  for (int d = 0; d <= degree_cap; ++d) {
    const Real scale = moment_bound(bound_T, idx.alpha(), d);
    for (const auto& [k, m] : moment_level(cm, idx, d)) {
      if (!m.is_zero(scale)) return Order::exact(d);
    }
  }
  return Order::at_least(degree_cap + 1);
}

Order gff_filtering_order(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap) {
  check_caps(idx.alpha(), degree_cap);
  auto lead = gff_taylor(cm, idx, degree_cap).leading_degree();
  return lead ? Order::exact(*lead) : Order::at_least(degree_cap + 1);
}

Order protocol_fo(const ControlMatrix& cm, int kappa, const std::vector<PauliAxis>& error_axes,
                  int degree_cap) {
  check_caps(kappa, degree_cap);
  std::vector<RelevantTuple> tuples;
  for (int a = 1; a <= kappa; ++a) {
    auto set = relevant_indices(a, cm, error_axes);
    tuples.insert(tuples.end(), set.tuples.begin(), set.tuples.end());
  }
  return fold(orders_for(cm, tuples, degree_cap, false), no_tuples(degree_cap));
}

Order protocol_generalized_fo(const ControlMatrix& cm, int kappa,
                              const std::vector<PauliAxis>& error_axes, int degree_cap) {
  check_caps(kappa, degree_cap);
  std::vector<RelevantTuple> tuples;
  for (int a = 1; a <= kappa; ++a) {
    auto set = relevant_indices(a, cm, error_axes);
    tuples.insert(tuples.end(), set.tuples.begin(), set.tuples.end());
  }
  return fold(orders_for(cm, tuples, degree_cap, true), no_tuples(degree_cap));
}

Order protocol_co(const ControlMatrix& cm, const std::vector<PauliAxis>& error_axes,
                  int alpha_max, int degree_cap) {
  check_caps(alpha_max, degree_cap);
  Order acc = unexplored_co_bound(active_pairs(cm, error_axes), alpha_max);
  for (int a = 1; a <= alpha_max; ++a) {
    auto set = relevant_indices(a, cm, error_axes);
    for (const auto& o : orders_for(cm, set.tuples, degree_cap, false)) acc = min(acc, o + (a - 1));
  }
  return acc;
}

NoGoResult quasistatic_no_go(const ControlMatrix& cm, const std::vector<PauliAxis>& error_axes,
                             int alpha_max) {
  check_caps(alpha_max, 0);
  const Real T = cm.real().duration();
  for (int a = 1; a <= alpha_max; ++a) {
    const Real scale = moment_bound(T, a, 0);
    for (const auto& t : relevant_indices(a, cm, error_axes).tuples) {
      if (!moment(cm, t.index, MultiIndex(a, 0)).is_zero(scale)) return {false, a};
    }
  }
  return {true, 0};
}

ProtocolOrders analyze_orders(const ControlMatrix& cm, const OrderCaps& caps) {
  check_caps(caps.alpha_max, caps.degree_cap);
  ProtocolOrders out;
  out.protocol = cm.label();
  out.error_axes = cm.error_axes();
  out.caps = caps;
  std::vector<RelevantTuple> tuples;
  for (int a = 1; a <= caps.alpha_max; ++a) {
    auto set = relevant_indices(a, cm, cm.error_axes());
    tuples.insert(tuples.end(), set.tuples.begin(), set.tuples.end());
  }
  std::vector<Order> phis = orders_for(cm, tuples, caps.degree_cap, false);
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const int a = tuples[i].index.alpha();
    out.per_index.push_back({tuples[i].index, tuples[i].product, phis[i], phis[i] + (a - 1)});
  }
  Order fo = no_tuples(caps.degree_cap);
  Order co = unexplored_co_bound(active_pairs(cm, cm.error_axes()), caps.alpha_max);
  bool any = false;
  for (int kappa = 1; kappa <= caps.alpha_max; ++kappa) {
    for (const auto& e : out.per_index) {
      if (e.index.alpha() != kappa) continue;
      fo = any ? min(fo, e.phi) : e.phi;
      any = true;
      co = min(co, e.delta);
    }
    out.fo_by_level[kappa] = fo;
  }
  out.co = co;
  out.resolved = co.resolved();
  for (const auto& [k, o] : out.fo_by_level) out.resolved = out.resolved && o.resolved();
  return out;
}

nlohmann::json ProtocolOrders::to_json() const {
  nlohmann::json j;
  j["protocol"] = protocol;
  j["error_axes"] = axes_label(error_axes);
  j["caps"] = {{"alpha_max", caps.alpha_max}, {"degree_cap", caps.degree_cap}};
  auto idx = nlohmann::json::array();
  for (const auto& e : per_index) {
    nlohmann::json r;
    r["alpha"] = e.index.alpha();
    r["u"] = axes_label(e.index.u);
    r["v"] = axes_label(e.index.v);
    r["product"] = std::string(1, label(*e.product.axis));
    r["phase"] = e.product.phase;
    r["phi"] = e.phi.to_json();
    r["delta"] = e.delta.to_json();
    idx.push_back(std::move(r));
  }
  j["per_index"] = std::move(idx);
  nlohmann::json fo = nlohmann::json::object();
  for (const auto& [k, o] : fo_by_level) fo[std::to_string(k)] = o.to_json();
  j["fo_by_level"] = std::move(fo);
  j["co"] = co.to_json();
  j["resolved"] = resolved;
  return j;
}

}  // namespace filterforge
