#pragma once

#include "filterforge/fff.hpp"
#include "filterforge/simplex_quadrature.hpp"

#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

namespace fforacle {

struct TimeAssignment {
  std::vector<int> slot;  // letter l sits at time t_{slot[l]}, t_0 latest
  double weight;
};

// Nested-commutator Magnus terms written as sums of time-permuted monomials
// A(t_{s_1}) ... A(t_{s_n}) over the ordered simplex t_0 >= t_1 >= ...
inline std::vector<TimeAssignment> magnus_words(int alpha) {
  switch (alpha) {
    case 1: return {{{0}, 1.0}};
    case 2: return {{{0, 1}, 0.5}, {{1, 0}, -0.5}};
    case 3:
      return {{{0, 1, 2}, 1.0 / 3}, {{2, 1, 0}, 1.0 / 3}, {{0, 2, 1}, -1.0 / 6},
              {{1, 2, 0}, -1.0 / 6}, {{2, 0, 1}, -1.0 / 6}, {{1, 0, 2}, -1.0 / 6}};
    default: throw std::invalid_argument("oracle covers alpha <= 3");
  }
}

// G^(alpha) straight from the Magnus series: the coefficient of the operator
// word O_{v_1}...O_{v_alpha} (x) B_{u_1}(w_1)...B_{u_alpha}(w_alpha) in Omega_alpha
// is -iG, with A(t) = -i H(t) and B_u(t) -> e^{i w t} B_u(w).
inline std::complex<double> magnus_gff(const filterforge::ControlMatrix& cm,
                                       const filterforge::IndexTuple& idx,
                                       std::span<const double> omega, int nodes) {
  const int alpha = idx.alpha();
  std::complex<double> acc = 0.0;
  for (const auto& word : magnus_words(alpha)) {
    std::vector<filterforge::LevelFunction> levels(alpha);
    for (int l = 0; l < alpha; ++l) {
      auto u = idx.u[l], v = idx.v[l];
      double w = omega[l];
      levels[word.slot[l]] = [&cm, u, v, w](double t) {
        return std::complex<double>(0, -1) * cm.y_at(t, u, v) *
               std::complex<double>(std::cos(w * t), std::sin(w * t));
      };
    }
    acc += word.weight *
           filterforge::ordered_simplex_quadrature(levels, cm.approx().breakpoints, nodes);
  }
  return std::complex<double>(0, 1) * acc;
}

}  // namespace fforacle
