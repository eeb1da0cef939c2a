#pragma once

#include "filterforge/numeric.hpp"
#include "filterforge/pauli.hpp"
#include "filterforge/sequence.hpp"

#include <array>
#include <vector>

namespace filterforge {

/// Row-major 3x3 block, entry (u, v) at [3*u + v].
template <class S>
using Block3 = std::array<S, 9>;

/// Piecewise-constant control matrix in one scalar representation.
template <class S>
struct PiecewiseControl {
  std::vector<S> breakpoints;      // 0 = tau_0 < ... < tau_m = T
  std::vector<Block3<S>> values;   // one block per interval

  std::size_t intervals() const { return values.size(); }
  const S& duration() const { return breakpoints.back(); }
  const S& y(std::size_t interval, PauliAxis u, PauliAxis v) const {
    return values[interval][3 * index(u) + index(v)];
  }
};

/// Toggling-frame control matrix y_uv(t) of a pulse sequence.
///
/// Exact sequences (rational times, quarter-turn angles) keep an exact
/// rational copy used for exact zero tests; every matrix also carries 256-bit
/// and double copies for numerical evaluation.
class ControlMatrix {
 public:
  ControlMatrix(const PulseSequence& seq, std::vector<PauliAxis> error_axes);

  bool is_exact() const { return exact_.has_value(); }
  ScalarKind kind() const {
    return is_exact() ? ScalarKind::exact_rational : ScalarKind::high_precision_real;
  }
  const std::vector<PauliAxis>& error_axes() const { return error_axes_; }
  bool has_error_axis(PauliAxis a) const;
  std::size_t intervals() const { return real_.intervals(); }
  const std::string& label() const { return label_; }

  const PiecewiseControl<Rational>& exact() const { return exact_.value(); }
  const PiecewiseControl<Real>& real() const { return real_; }
  const PiecewiseControl<double>& approx() const { return approx_; }

  template <class S>
  const PiecewiseControl<S>& view() const;

  double duration() const { return approx_.duration(); }

  /// y_uv on the interval containing t (right-continuous; t = T maps to the last interval).
  double y_at(double t, PauliAxis u, PauliAxis v) const;

  /// True when y_uv vanishes on every interval.
  bool identically_zero(PauliAxis u, PauliAxis v) const;

  /// Breakpoints scaled by `factor`, values unchanged.
  ControlMatrix dilated(const Rational& factor) const;

 private:
  ControlMatrix() = default;
  void fill_derived();

  std::vector<PauliAxis> error_axes_;
  std::string label_;
  std::optional<PiecewiseControl<Rational>> exact_;
  PiecewiseControl<Real> real_;
  PiecewiseControl<double> approx_;
};

template <>
inline const PiecewiseControl<Rational>& ControlMatrix::view<Rational>() const { return exact(); }
template <>
inline const PiecewiseControl<Real>& ControlMatrix::view<Real>() const { return real_; }
template <>
inline const PiecewiseControl<double>& ControlMatrix::view<double>() const { return approx_; }

/// Builds y_uv(t) with U(t)^dag sigma_u U(t) = sum_v y_uv(t) sigma_v.
ControlMatrix toggling_control_matrix(const PulseSequence& seq,
                                      const std::vector<PauliAxis>& error_axes);

/// Adjoint action of a single pulse, exp(i a s/2) sigma_u exp(-i a s/2) = sum_v M_uv sigma_v.
Block3<Real> pulse_rotation(const Pulse& p);

}  // namespace filterforge
