#include "filterforge/sequence.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace filterforge {

Instant Instant::scaled(const Rational& factor) const {
  if (is_exact()) return Instant(Rational(rational() * factor));
  return Instant(Real(real() * to_real(factor)));
}

bool operator==(const Instant& a, const Instant& b) {
  if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
  return a.real() == b.real();
}

bool operator<(const Instant& a, const Instant& b) {
  if (a.is_exact() && b.is_exact()) return a.rational() < b.rational();
  return a.real() < b.real();
}

std::optional<int> Pulse::quarter_turns() const {
  double q = angle / (std::numbers::pi / 2);
  double r = std::round(q);
  if (std::abs(angle - r * std::numbers::pi / 2) < 1e-9) return static_cast<int>(r);
  return std::nullopt;
}

PulseSequence::PulseSequence(Instant duration, std::vector<Pulse> pulses, std::string label)
    : duration_(std::move(duration)), pulses_(std::move(pulses)), label_(std::move(label)) {
  if (!(Instant(Rational(0)) < duration_)) {
    throw std::invalid_argument("sequence duration must be positive");
  }
  for (std::size_t i = 0; i < pulses_.size(); ++i) {
    const auto& t = pulses_[i].time;
    if (!(Instant(Rational(0)) < t) || duration_ < t) {
      throw std::invalid_argument("pulse " + std::to_string(i) + " lies outside (0, T]");
    }
    if (i > 0 && !(pulses_[i - 1].time < t)) {
      throw std::invalid_argument("pulse times must be strictly increasing");
    }
    if (!std::isfinite(pulses_[i].angle)) {
      throw std::invalid_argument("pulse angle must be finite");
    }
  }
}

bool PulseSequence::is_exact() const {
  if (!duration_.is_exact()) return false;
  for (const auto& p : pulses_) {
    if (!p.time.is_exact() || !p.quarter_turns()) return false;
  }
  return true;
}

PulseSequence PulseSequence::dilated(const Rational& factor) const {
  if (factor <= 0) throw std::invalid_argument("dilation factor must be positive");
  std::vector<Pulse> pulses = pulses_;
  for (auto& p : pulses) p.time = p.time.scaled(factor);
  return PulseSequence(duration_.scaled(factor), std::move(pulses), label_);
}

namespace {

// sin^2(j pi / (2n+2)) is rational only when cos(j pi/(n+1)) is in {0, +-1/2}.
std::optional<Rational> rational_udd_fraction(int j, int n) {
  int num = j;
  int den = n + 1;
  // reduce j/(n+1)
  int a = num, b = den;
  while (b != 0) {
    int t = a % b;
    a = b;
    b = t;
  }
  num /= a;
  den /= a;
  if (num == 1 && den == 2) return Rational(1, 2);
  if (num == 1 && den == 3) return Rational(1, 4);
  if (num == 2 && den == 3) return Rational(3, 4);
  return std::nullopt;
}

Rational duration_from_double(double T) {
  if (!(T > 0) || !std::isfinite(T)) throw std::invalid_argument("duration must be positive");
  return rational_from_shortest_decimal(T);
}

}  // namespace

PulseSequence udd_sequence(int n, const Rational& duration) {
  if (n < 1) throw std::invalid_argument("UDD needs n >= 1 pulses");
  if (duration <= 0) throw std::invalid_argument("duration must be positive");
  std::vector<Pulse> pulses;
  pulses.reserve(n);
  const Real pi = pi_real();
  for (int j = 1; j <= n; ++j) {
    Pulse p;
    p.axis = PauliAxis::x;
    p.angle = std::numbers::pi;
    if (auto frac = rational_udd_fraction(j, n)) {
      p.time = Instant(Rational(*frac * duration));
    } else {
      Real s = sin(pi * j / (2 * n + 2));
      p.time = Instant(Real(to_real(duration) * s * s));
    }
    pulses.push_back(std::move(p));
  }
  return PulseSequence(Instant(duration), std::move(pulses), "UDD_" + std::to_string(n));
}

PulseSequence udd_sequence(int n, double duration) {
  return udd_sequence(n, duration_from_double(duration));
}

namespace {

void append_cancelling(std::vector<Pulse>& out, const Rational& t) {
  if (!out.empty() && out.back().time.is_exact() && out.back().time.rational() == t) {
    out.pop_back();
    return;
  }
  out.push_back(Pulse{Instant(t), PauliAxis::x, std::numbers::pi});
}

void cdd_unfold(int k, const Rational& start, const Rational& length, std::vector<Pulse>& out) {
  if (k == 0) return;
  Rational half = length / 2;
  cdd_unfold(k - 1, start, half, out);
  append_cancelling(out, Rational(start + half));
  cdd_unfold(k - 1, Rational(start + half), half, out);
  append_cancelling(out, Rational(start + length));
}

}  // namespace

PulseSequence cdd_sequence(int k, const Rational& duration) {
  if (k < 0) throw std::invalid_argument("CDD level must be nonnegative");
  if (duration <= 0) throw std::invalid_argument("duration must be positive");
  std::vector<Pulse> pulses;
  cdd_unfold(k, Rational(0), duration, pulses);
  return PulseSequence(Instant(duration), std::move(pulses), "CDD_" + std::to_string(k));
}

PulseSequence cdd_sequence(int k, double duration) {
  return cdd_sequence(k, duration_from_double(duration));
}

PulseSequence free_evolution(const Rational& duration) {
  return PulseSequence(Instant(duration), {}, "free");
}

std::optional<int> match_udd(const PulseSequence& seq, double tol) {
  const auto& pulses = seq.pulses();
  const int n = static_cast<int>(pulses.size());
  if (n == 0) return std::nullopt;
  const double T = seq.duration().to_double();
  for (int j = 1; j <= n; ++j) {
    const auto& p = pulses[j - 1];
    auto q = p.quarter_turns();
    if (p.axis != PauliAxis::x || !q || ((*q % 4) + 4) % 4 != 2) return std::nullopt;
    double s = std::sin(std::numbers::pi * j / (2.0 * n + 2.0));
    if (std::abs(p.time.to_double() - T * s * s) > tol * T) return std::nullopt;
  }
  return n;
}

}  // namespace filterforge
