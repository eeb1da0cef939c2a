#pragma once

#include "filterforge/numeric.hpp"
#include "filterforge/pauli.hpp"

#include <optional>
#include <string>
#include <vector>

namespace filterforge {

/// A point in time, exact when it is rational, otherwise a 256-bit real.
class Instant {
 public:
  Instant() : exact_(Rational(0)), approx_(0) {}
  Instant(Rational q) : exact_(std::move(q)), approx_(to_real(*exact_)) {}
  Instant(Real r) : approx_(std::move(r)) {}

  bool is_exact() const { return exact_.has_value(); }
  const Rational& rational() const { return exact_.value(); }
  const Real& real() const { return approx_; }
  double to_double() const { return filterforge::to_double(approx_); }

  /// Scales by a rational factor, preserving exactness.
  Instant scaled(const Rational& factor) const;

  friend bool operator==(const Instant& a, const Instant& b);
  friend bool operator<(const Instant& a, const Instant& b);
  friend bool operator<=(const Instant& a, const Instant& b) { return !(b < a); }

 private:
  std::optional<Rational> exact_;
  Real approx_;
};

/// An instantaneous rotation by `angle` radians about a Pauli axis.
struct Pulse {
  Instant time;
  PauliAxis axis = PauliAxis::x;
  double angle = 0.0;

  /// Angle as an integer number of quarter turns when it is one (to 1e-9 rad).
  std::optional<int> quarter_turns() const;
};

/// Bang-bang pulse sequence over [0, T]: strictly increasing times in (0, T].
class PulseSequence {
 public:
  PulseSequence(Instant duration, std::vector<Pulse> pulses, std::string label = {});

  const Instant& duration() const { return duration_; }
  const std::vector<Pulse>& pulses() const { return pulses_; }
  const std::string& label() const { return label_; }

  /// True when every time is rational and every angle a quarter-turn multiple.
  bool is_exact() const;

  /// Same sequence on [0, factor*T].
  PulseSequence dilated(const Rational& factor) const;

 private:
  Instant duration_;
  std::vector<Pulse> pulses_;
  std::string label_;
};

/// Uhrig DD: n pi-pulses about x at T sin^2(j pi / (2n+2)), j = 1..n.
PulseSequence udd_sequence(int n, const Rational& duration);
PulseSequence udd_sequence(int n, double duration);

/// Concatenated DD of level k built from U_{k+1} = X U_k X U_k, with coincident
/// pulses cancelled and the frame-closing pulse at T kept.
PulseSequence cdd_sequence(int k, const Rational& duration);
PulseSequence cdd_sequence(int k, double duration);

/// Free evolution (no pulses).
PulseSequence free_evolution(const Rational& duration);

/// Number of pulses n if `seq` is UDD_n on its duration to within tol*T.
std::optional<int> match_udd(const PulseSequence& seq, double tol = 1e-12);

}  // namespace filterforge
