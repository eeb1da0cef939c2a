#include "filterforge/fff.hpp"
#include "filterforge/figure1.hpp"
#include "filterforge/gff.hpp"
#include "filterforge/magnus.hpp"
#include "filterforge/orders.hpp"
#include "filterforge/spectra.hpp"

#include "../common/magnus_oracle.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace filterforge;

namespace {

const PauliAxis X = PauliAxis::x, Y = PauliAxis::y, Z = PauliAxis::z;
const std::vector<PauliAxis> kZ{Z};

struct Outcome {
  bool pass;
  std::string detail;
};

IndexTuple zz(int alpha) { return IndexTuple::repeated(alpha, Z, Z); }

Outcome udd_fo_table() {
  std::ostringstream bad;
  int checked = 0;
  for (int d = 1; d <= 8; ++d) {
    ControlMatrix cm(udd_sequence(d, 1.0), kZ);
    std::vector<std::pair<int, int>> expect{{1, d}};
    if (d >= 3) {
      expect.emplace_back(3, d - 2);
      expect.emplace_back(5, d <= 4 ? d - 2 : d - 4);
      expect.emplace_back(7, d <= 6 ? d - 2 : d - 6);
    }
    for (auto [alpha, phi] : expect) {
      Order got = fff_filtering_order(cm, zz(alpha), 12);
      ++checked;
      if (got != Order::exact(phi)) {
        bad << " UDD" << d << " phi(" << alpha << ")=" << got.str() << " want " << phi << ";";
      }
    }
  }
  if (!bad.str().empty()) return {false, bad.str()};
  return {true, std::to_string(checked) + " entries, 256-bit moments"};
}

Outcome cdd_orders() {
  std::ostringstream bad;
  for (int d = 1; d <= 3; ++d) {
    ControlMatrix cm(cdd_sequence(d, 1.0), kZ);
    if (!cm.is_exact()) bad << " CDD" << d << " not exact;";
    Order fo = protocol_fo(cm, 5, kZ, 12);
    if (fo != Order::exact(d)) bad << " CDD" << d << " phi[5]=" << fo.str() << ";";
    for (int alpha = 1; alpha <= 5; ++alpha) {
      Order got = fff_filtering_order(cm, zz(alpha), 12);
      int want = alpha % 2 == 0 ? 1 : d;
      if (got != Order::exact(want)) {
        bad << " CDD" << d << " phi(" << alpha << ")=" << got.str() << " want " << want << ";";
      }
    }
  }
  if (!bad.str().empty()) return {false, bad.str()};
  return {true, "CDD1..3, alpha<=5, exact rationals"};
}

Outcome gff_matches_quadrature() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> family(0, 3);
  std::uniform_real_distribution<double> wd(-6.0, 6.0);
  double worst = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 24; ++trial) {
    PulseSequence seq = free_evolution(Rational(1));
    switch (family(rng)) {
      case 0: seq = udd_sequence(1 + trial % 5, 1.0); break;
      case 1: seq = cdd_sequence(1 + trial % 3, 1.0); break;
      case 2: {
        // mixed-axis pulses so off-diagonal control-matrix entries appear
        std::vector<Pulse> p;
        const double slots[3] = {0.2, 0.45, 0.8};
        for (double t : slots) {
          Pulse q;
          q.time = Instant(rational_from_shortest_decimal(t));
          q.axis = static_cast<PauliAxis>(std::uniform_int_distribution<int>(0, 2)(rng));
          q.angle = std::numbers::pi / 2 * std::uniform_int_distribution<int>(1, 3)(rng);
          p.push_back(q);
        }
        seq = PulseSequence(Instant(Rational(1)), p, "mixed");
        break;
      }
      default: seq = udd_sequence(3, 1.0); break;
    }
    ControlMatrix cm(seq, {X, Y, Z});
    const int alpha = 1 + trial % 3;
    std::vector<PauliAxis> u, v;
    for (int j = 0; j < alpha; ++j) {
      u.push_back(static_cast<PauliAxis>(std::uniform_int_distribution<int>(0, 2)(rng)));
      // pick v where the row is nonzero somewhere
      PauliAxis pick;
      do {
        pick = static_cast<PauliAxis>(std::uniform_int_distribution<int>(0, 2)(rng));
      } while (cm.identically_zero(u.back(), pick));
      v.push_back(pick);
    }
    IndexTuple idx(u, v);
    std::vector<double> w(alpha);
    for (auto& x : w) x = wd(rng);
    auto g = gff_eval(cm, idx, w).value;
    auto oracle = fforacle::magnus_gff(cm, idx, w, 20);
    double rel = std::abs(g - oracle) / std::max(std::abs(oracle), 1e-12);
    worst = std::max(worst, rel);
    ++cases;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d cases, worst relative error %.2e", cases, worst);
  return {worst <= 1e-6, buf};
}

Outcome generalized_orders() {
  std::ostringstream bad;
  struct Case {
    std::string name;
    PulseSequence seq;
  };
  std::vector<Case> cases{{"CDD1", cdd_sequence(1, 1.0)},
                          {"CDD2", cdd_sequence(2, 1.0)},
                          {"UDD2", udd_sequence(2, 1.0)},
                          {"UDD3", udd_sequence(3, 1.0)}};
  for (const auto& c : cases) {
    ControlMatrix cm(c.seq, kZ);
    for (int kappa = 1; kappa <= 3; ++kappa) {
      Order phi = protocol_fo(cm, kappa, kZ, 12);
      Order Phi = protocol_generalized_fo(cm, kappa, kZ, 12);
      if (phi != Phi) bad << " " << c.name << " k=" << kappa << " " << Phi.str() << "!=" << phi.str();
    }
  }
  int generated = 0;
  auto check_ineq = [&](const std::string& name, const PulseSequence& seq) {
    ControlMatrix cm(seq, kZ);
    Order fo = protocol_fo(cm, 7, kZ, 12);
    Order co = protocol_co(cm, kZ, 7, 12);
    ++generated;
    if (!fo.resolved() || !co.resolved() || fo.value > co.value) {
      bad << " " << name << " phi[7]=" << fo.str() << " delta=" << co.str() << ";";
    }
  };
  for (int n = 1; n <= 8; ++n) check_ineq("UDD" + std::to_string(n), udd_sequence(n, 1.0));
  for (int k = 1; k <= 4; ++k) check_ineq("CDD" + std::to_string(k), cdd_sequence(k, 1.0));
  if (!bad.str().empty()) return {false, bad.str()};
  return {true, "Phi=phi for kappa<=3 on 4 protocols; phi[7]<=delta on " +
                    std::to_string(generated) + " protocols"};
}

Outcome no_go() {
  std::ostringstream bad;
  auto expect_fail = [&](const std::string& name, const ControlMatrix& cm,
                         const std::vector<PauliAxis>& axes) {
    auto r = quasistatic_no_go(cm, axes, 5);
    if (r.pass || r.first_alpha != 1) bad << " " << name << " expected fail(1);";
  };
  expect_fail("free", ControlMatrix(free_evolution(Rational(1)), kZ), kZ);
  // z-axis-only control: x pulses (dephasing DD) and z pulses, both against {x, z}
  expect_fail("UDD3 vs {x,z}", ControlMatrix(udd_sequence(3, 1.0), {X, Z}), {X, Z});
  expect_fail("CDD2 vs {x,z}", ControlMatrix(cdd_sequence(2, 1.0), {X, Z}), {X, Z});
  {
    std::vector<Pulse> p{{Instant(Rational(1, 2)), Z, std::numbers::pi},
                         {Instant(Rational(1)), Z, std::numbers::pi}};
    expect_fail("z-pulse echo vs {x,z}",
                ControlMatrix(PulseSequence(Instant(Rational(1)), p), {X, Z}), {X, Z});
  }
  int passes = 0;
  auto expect_pass = [&](const std::string& name, const PulseSequence& seq) {
    auto r = quasistatic_no_go(ControlMatrix(seq, kZ), kZ, 5);
    if (!r.pass) bad << " " << name << " failed at alpha=" << r.first_alpha << ";";
    ++passes;
  };
  for (int n = 1; n <= 6; ++n) expect_pass("UDD" + std::to_string(n), udd_sequence(n, 1.0));
  for (int k = 1; k <= 3; ++k) expect_pass("CDD" + std::to_string(k), cdd_sequence(k, 1.0));
  if (!bad.str().empty()) return {false, bad.str()};
  return {true, "fail(1) on 4 unbalanced cases; pass to alpha=5 on " + std::to_string(passes) +
                    " balanced single-axis sequences"};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

MagnusOptions closed_form() {
  MagnusOptions o;
  o.method = MagnusMethod::closed_form;
  return o;
}

Outcome cancellation_orders() {
  std::ostringstream bad, fits;
  // quasi-static bias plus a unit-frequency tone
  const ToyNoiseModel model{ToyKind::quantum_single_tone, 9.0 / 40, 1.0, 1.0};
  auto check = [&](const std::string& name, const PulseSequence& seq, int want) {
    ControlMatrix cm(seq, kZ);
    Order co = protocol_co(cm, kZ, 7, 12);
    if (co != Order::exact(want)) bad << " " << name << " delta=" << co.str() << " want " << want << ";";
    std::vector<double> lx, ly;
    for (int k = 6; k <= 9; ++k) {
      const double T = std::ldexp(1.0, -k);
      lx.push_back(std::log(T));
      ly.push_back(std::log(error_action_norm(magnus_terms(cm, model, T, 3, closed_form()))));
    }
    const double s = slope(lx, ly);
    char buf[48];
    std::snprintf(buf, sizeof buf, " %s %.3f", name.c_str(), s);
    fits << buf;
    if (std::abs(s - (want + 1)) > 0.1) bad << " " << name << " slope " << s << ";";
  };
  for (int n = 1; n <= 4; ++n) check("UDD" + std::to_string(n), udd_sequence(n, 1.0), n);
  for (int k = 1; k <= 3; ++k) check("CDD" + std::to_string(k), cdd_sequence(k, 1.0), k);
  if (!bad.str().empty()) return {false, bad.str() + " | slopes" + fits.str()};
  return {true, "delta exact; slopes" + fits.str()};
}

Outcome figure1() {
  const auto grid = figure1_default_grid();
  const auto gs = figure1_default_couplings();
  const auto rows = figure1_scan(grid, gs);
  std::ostringstream parts;
  bool low = true, high = true, classical = true;
  int classical_bad = 0;
  double worst_high = 0, worst_classical = 0, worst_low = 1e300;
  std::string worst_classical_at;
  std::vector<double> crossover(gs.size(), 0.0);
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    std::vector<double> ratio;
    for (const auto& r : rows) {
      if (r.g != gs[gi]) continue;
      if (r.model == "quantum") {
        ratio.push_back(r.ratio);
        if (gi == 0 && r.omega <= 1e-3) {
          worst_low = std::min(worst_low, r.ratio);
          if (!(r.ratio > 1)) low = false;
        }
        if (gi == 0 && r.omega >= 1e-1) {
          worst_high = std::max(worst_high, r.ratio);
          if (!(r.ratio < 1)) high = false;
        }
      } else if (gi == 0 && !(r.ratio < 1)) {
        classical = false;
        ++classical_bad;
        if (r.ratio > worst_classical) {
          worst_classical = r.ratio;
          std::ostringstream at;
          at << r.model << " at w=" << r.omega;
          worst_classical_at = at.str();
        }
      }
    }
    // first downward crossing of 1, log-interpolated; below the grid when never above 1
    crossover[gi] = grid.front() / 10;
    for (std::size_t i = 0; i + 1 < ratio.size(); ++i) {
      if (ratio[i] > 1 && ratio[i + 1] <= 1) {
        const double a = std::log(ratio[i]), b = std::log(ratio[i + 1]);
        const double f = a / (a - b);
        crossover[gi] = std::exp(std::log(grid[i]) + f * (std::log(grid[i + 1]) - std::log(grid[i])));
        break;
      }
    }
  }
  bool monotone = true;
  for (std::size_t gi = 1; gi < gs.size(); ++gi) monotone = monotone && crossover[gi] < crossover[gi - 1];
  std::string cross;
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    char c[32];
    if (crossover[gi] < grid.front()) {
      std::snprintf(c, sizeof c, "<%.3g", grid.front());
    } else {
      std::snprintf(c, sizeof c, "%.3g", crossover[gi]);
    }
    cross += (gi ? " > " : "") + std::string(c);
  }
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "quantum>1 for w<=1e-3: %s (min %.3g); quantum<1 for w>=1e-1: %s (max %.3g); "
                "classical<1 everywhere: %s (%d cells, worst %.3g, %s); crossovers %s: %s",
                low ? "yes" : "no", worst_low, high ? "yes" : "no", worst_high, classical ? "yes" : "no",
                classical_bad, worst_classical, worst_classical_at.c_str(), cross.c_str(),
                monotone ? "yes" : "no");
  return {low && high && classical && monotone, buf};
}

Outcome truncation_order() {
  const ToyNoiseModel model{ToyKind::quantum_single_tone, 9.0 / 400, 1.0, 0.0};
  std::ostringstream detail;
  bool pass = true;
  struct Case {
    const char* name;
    PulseSequence seq;
  };
  for (const auto& c : {Case{"free", free_evolution(Rational(1))}, Case{"UDD4", udd_sequence(4, 1.0)},
                        Case{"CDD3", cdd_sequence(3, 1.0)}}) {
    ControlMatrix cm(c.seq, kZ);
    double prev = 0;
    for (double T : {0.5, 0.25}) {
      auto terms = magnus_terms(cm, model, T, 3, closed_form());
      const double e = (magnus_propagator(terms) - exact_propagator(cm, model, T, 1e-15).U).norm();
      if (prev > 0) {
        const double r = std::log2(prev / e);
        char buf[48];
        std::snprintf(buf, sizeof buf, "%s log2 ratio %.2f; ", c.name, r);
        detail << buf;
        pass = pass && std::abs(r - 4.0) <= 0.3;
      }
      prev = e;
    }
  }
  detail << "target 4 +- 0.3";
  return {pass, detail.str()};
}

Outcome gaussian_decay() {
  std::ostringstream bad;
  double worst = 0, worst_k2 = 0;
  const auto white = NoiseSpectrum::white_noise(0.8);
  const auto lor = NoiseSpectrum::lorentzian(1.0, 3.0, 2.0);
  for (const auto& seq : {free_evolution(Rational(1)), cdd_sequence(1, 1.0), cdd_sequence(2, 1.0),
                          udd_sequence(4, 1.0)}) {
    ControlMatrix cm(seq, kZ);
    for (double T : {1.0, 2.5}) {
      const double chi = chi_gaussian(cm, white, T);
      worst = std::max(worst, std::abs(chi - 2 * 0.8 * T) / (2 * 0.8 * T));
      for (const auto& s : {white, lor}) {
        CumulantSeries cs;
        cs.second = s;
        const double c = chi_gaussian(cm, s, T);
        const auto d = classical_decay(cm, cs, T, 0, 1);
        worst_k2 = std::max(worst_k2, std::abs(d + c) / c);
      }
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "white chi vs 2 S0 T worst rel %.1e over 4 sequences x 2 durations; k_max=2 vs -chi worst rel %.1e",
                worst, worst_k2);
  return {worst <= 1e-8 && worst_k2 <= 1e-8, buf};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
  std::vector<Criterion> criteria{
      {1, "UDD filtering-order table", udd_fo_table},
      {2, "CDD filtering orders (concatenation)", cdd_orders},
      {3, "cancellation orders and norm slopes", cancellation_orders},
      {4, "GFF assembly matches Magnus quadrature", gff_matches_quadrature},
      {5, "generalized vs fundamental orders", generalized_orders},
      {6, "UDD4 vs CDD3 Magnus norm ratios", figure1},
      {7, "Magnus truncation order", truncation_order},
      {8, "Gaussian dephasing decay", gaussian_decay},
      {9, "quasi-static no-go behaviour", no_go},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%s; %.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d criteria failed\n", failures);
  return strict && failures > 0 ? 1 : 0;
}
