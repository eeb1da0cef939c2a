#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace filterforge {

struct GaussRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1]. Rules are cached per n.
const GaussRule& gauss_legendre(int n);

/// Integrand attached to one simplex variable.
using LevelFunction = std::function<std::complex<double>(double)>;

/// Nested quadrature of the ordered simplex integral
///   int_{0 <= t_n <= ... <= t_1 <= T} prod_l f_l(t_l) dt
/// with `levels[0]` attached to the outermost variable t_1. Every level's
/// range [0, t_{l-1}] is split at the breakpoints (where the integrands jump)
/// and each panel gets `nodes_per_panel` Gauss-Legendre points.
std::complex<double> ordered_simplex_quadrature(std::span<const LevelFunction> levels,
                                                std::span<const double> breakpoints,
                                                int nodes_per_panel);

}  // namespace filterforge
