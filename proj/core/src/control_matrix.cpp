#include "filterforge/control_matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace filterforge {

namespace {

int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

template <class S>
Block3<S> rotation_block(int axis, const S& c, const S& s) {
  Block3<S> m;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      S v = (i == j) ? c : S(0);
      if (i == axis && j == axis) v += S(1) - c;
      int eps = levi_civita(i, j, axis);
      if (eps != 0) v -= s * S(eps);
      m[3 * i + j] = v;
    }
  }
  return m;
}

template <class S>
Block3<S> identity_block() {
  Block3<S> m;
  m.fill(S(0));
  m[0] = m[4] = m[8] = S(1);
  return m;
}

template <class S>
Block3<S> compose(const Block3<S>& later, const Block3<S>& earlier) {
  Block3<S> out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      S acc(0);
      for (int k = 0; k < 3; ++k) acc += later[3 * i + k] * earlier[3 * k + j];
      out[3 * i + j] = acc;
    }
  }
  return out;
}

Block3<Rational> exact_pulse_rotation(const Pulse& p) {
  int q = ((*p.quarter_turns() % 4) + 4) % 4;
  static const int kCos[4] = {1, 0, -1, 0};
  static const int kSin[4] = {0, 1, 0, -1};
  return rotation_block<Rational>(index(p.axis), Rational(kCos[q]), Rational(kSin[q]));
}

}  // namespace

Block3<Real> pulse_rotation(const Pulse& p) {
  if (p.quarter_turns()) {
    auto e = exact_pulse_rotation(p);
    Block3<Real> r;
    for (int i = 0; i < 9; ++i) r[i] = to_real(e[i]);
    return r;
  }
  Real a(p.angle);
  return rotation_block<Real>(index(p.axis), Real(cos(a)), Real(sin(a)));
}

ControlMatrix::ControlMatrix(const PulseSequence& seq, std::vector<PauliAxis> error_axes)
    : error_axes_(std::move(error_axes)), label_(seq.label()) {
  if (error_axes_.empty()) throw std::invalid_argument("at least one error axis is required");
  std::sort(error_axes_.begin(), error_axes_.end());
  error_axes_.erase(std::unique(error_axes_.begin(), error_axes_.end()), error_axes_.end());

  const auto& pulses = seq.pulses();
  const Instant& T = seq.duration();

  real_.breakpoints.push_back(Real(0));
  real_.values.push_back(identity_block<Real>());
  for (const auto& p : pulses) {
    auto next = compose(pulse_rotation(p), real_.values.back());
    if (p.time == T) break;  // frame-closing pulse: no new interval
    real_.breakpoints.push_back(p.time.real());
    real_.values.push_back(next);
  }
  real_.breakpoints.push_back(T.real());

  if (seq.is_exact()) {
    PiecewiseControl<Rational> ex;
    ex.breakpoints.push_back(Rational(0));
    ex.values.push_back(identity_block<Rational>());
    for (const auto& p : pulses) {
      if (p.time == T) break;
      ex.breakpoints.push_back(p.time.rational());
      ex.values.push_back(compose(exact_pulse_rotation(p), ex.values.back()));
    }
    ex.breakpoints.push_back(T.rational());
    // keep the 256-bit copy bit-identical to the exact one
    for (std::size_t i = 0; i < ex.values.size(); ++i) {
      for (int k = 0; k < 9; ++k) real_.values[i][k] = to_real(ex.values[i][k]);
    }
    exact_ = std::move(ex);
  }
  fill_derived();
}

void ControlMatrix::fill_derived() {
  approx_.breakpoints.clear();
  approx_.values.clear();
  for (const auto& b : real_.breakpoints) approx_.breakpoints.push_back(to_double(b));
  for (const auto& blk : real_.values) {
    Block3<double> d;
    for (int k = 0; k < 9; ++k) d[k] = to_double(blk[k]);
    approx_.values.push_back(d);
  }
}

bool ControlMatrix::has_error_axis(PauliAxis a) const {
  return std::find(error_axes_.begin(), error_axes_.end(), a) != error_axes_.end();
}

double ControlMatrix::y_at(double t, PauliAxis u, PauliAxis v) const {
  const auto& b = approx_.breakpoints;
  auto it = std::upper_bound(b.begin() + 1, b.end() - 1, t);
  std::size_t interval = static_cast<std::size_t>(it - (b.begin() + 1));
  return approx_.y(interval, u, v);
}

bool ControlMatrix::identically_zero(PauliAxis u, PauliAxis v) const {
  const Real tiny("1e-60");
  for (std::size_t i = 0; i < real_.intervals(); ++i) {
    if (abs(real_.y(i, u, v)) > tiny) return false;
  }
  return true;
}

ControlMatrix ControlMatrix::dilated(const Rational& factor) const {
  if (factor <= 0) throw std::invalid_argument("dilation factor must be positive");
  ControlMatrix out;
  out.error_axes_ = error_axes_;
  out.label_ = label_;
  out.real_ = real_;
  const Real f = to_real(factor);
  for (auto& b : out.real_.breakpoints) b *= f;
  if (exact_) {
    out.exact_ = *exact_;
    for (auto& b : out.exact_->breakpoints) b *= factor;
    for (std::size_t i = 0; i < out.real_.breakpoints.size(); ++i) {
      out.real_.breakpoints[i] = to_real(out.exact_->breakpoints[i]);
    }
  }
  out.fill_derived();
  return out;
}

ControlMatrix toggling_control_matrix(const PulseSequence& seq,
                                      const std::vector<PauliAxis>& error_axes) {
  return ControlMatrix(seq, error_axes);
}

}  // namespace filterforge
