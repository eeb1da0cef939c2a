#include "filterforge/simplex_quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace filterforge {

namespace {

GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? x : p1;
      double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 0.5 * w;
  }
  if (n == 1) rule.weights[0] = 1.0;
  return rule;
}

struct Panel {
  double lo;
  double hi;
};

std::vector<Panel> panels_below(double upper, std::span<const double> breakpoints) {
  std::vector<Panel> out;
  double lo = 0.0;
  for (double b : breakpoints) {
    if (b <= lo) continue;
    if (b >= upper) break;
    out.push_back({lo, b});
    lo = b;
  }
  if (upper > lo) out.push_back({lo, upper});
  return out;
}

std::complex<double> nested(std::span<const LevelFunction> levels, std::size_t level, double upper,
                            std::span<const double> breakpoints, const GaussRule& rule) {
  std::complex<double> acc = 0.0;
  for (const auto& panel : panels_below(upper, breakpoints)) {
    const double h = panel.hi - panel.lo;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double t = panel.lo + h * rule.nodes[q];
      std::complex<double> v = levels[level](t);
      if (v == 0.0) continue;
      if (level + 1 < levels.size()) v *= nested(levels, level + 1, t, breakpoints, rule);
      acc += h * rule.weights[q] * v;
    }
  }
  return acc;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss rule needs at least one node");
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

std::complex<double> ordered_simplex_quadrature(std::span<const LevelFunction> levels,
                                                std::span<const double> breakpoints,
                                                int nodes_per_panel) {
  if (levels.empty()) return 1.0;
  if (breakpoints.size() < 2) throw std::invalid_argument("need at least [0, T] breakpoints");
  const GaussRule& rule = gauss_legendre(nodes_per_panel);
  return nested(levels, 0, breakpoints.back(), breakpoints, rule);
}

}  // namespace filterforge
