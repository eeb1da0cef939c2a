#include "filterforge/numeric.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace filterforge {

void check_precision(unsigned bits) {
  if (bits == 0 || bits > kRealBits) {
    throw UnsupportedError("precision must be in [1, " + std::to_string(kRealBits) +
                           "] bits, got " + std::to_string(bits));
  }
}

Real pi_real() {
  static const Real pi = boost::multiprecision::default_ops::get_constant_pi<Real::backend_type>();
  return pi;
}

Real to_real(const Rational& q) {
  Real r;
  r.backend() = q.backend();
  return r;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }
double to_double(const Real& r) { return r.convert_to<double>(); }

Rational rational_from_double(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("non-finite value");
  int exp = 0;
  double mant = std::frexp(d, &exp);
  // 53-bit integer mantissa
  auto m = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  Rational q(m);
  if (exp > 0) {
    q *= Rational(boost::multiprecision::pow(boost::multiprecision::mpz_int(2), exp));
  } else if (exp < 0) {
    q /= Rational(boost::multiprecision::pow(boost::multiprecision::mpz_int(2), -exp));
  }
  return q;
}

std::string shortest_decimal(double d) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), d);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  return std::string(buf.data(), ptr);
}

Rational rational_from_shortest_decimal(double d) {
  if (!std::isfinite(d)) throw std::invalid_argument("non-finite value");
  std::array<char, 64> buf{};
  auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), d, std::chars_format::scientific);
  if (ec != std::errc()) throw std::runtime_error("to_chars failed");
  std::string s(buf.data(), ptr);
  auto epos = s.find('e');
  std::string mant = s.substr(0, epos);
  int exp10 = std::stoi(s.substr(epos + 1));
  bool neg = !mant.empty() && mant[0] == '-';
  if (neg) mant.erase(0, 1);
  std::string digits;
  int frac = 0;
  bool seen_dot = false;
  for (char c : mant) {
    if (c == '.') {
      seen_dot = true;
      continue;
    }
    digits.push_back(c);
    if (seen_dot) ++frac;
  }
  boost::multiprecision::mpz_int num(digits);
  int e = exp10 - frac;
  Rational q(num);
  boost::multiprecision::mpz_int ten(10);
  if (e > 0) q *= Rational(boost::multiprecision::pow(ten, static_cast<unsigned>(e)));
  if (e < 0) q /= Rational(boost::multiprecision::pow(ten, static_cast<unsigned>(-e)));
  return neg ? Rational(-q) : q;
}

const char* to_string(ScalarKind kind) {
  return kind == ScalarKind::exact_rational ? "exact-rational" : "high-precision-real";
}

Real Scalar::real() const {
  if (is_exact()) return to_real(rational());
  return std::get<Real>(value_);
}

double Scalar::to_double() const {
  if (is_exact()) return filterforge::to_double(rational());
  return filterforge::to_double(std::get<Real>(value_));
}

std::string Scalar::str() const {
  if (is_exact()) return rational().str();
  return std::get<Real>(value_).str(40, std::ios_base::scientific);
}

bool Scalar::is_zero(const Real& scale, double rel_threshold) const {
  if (is_exact()) return rational() == 0;
  return abs(std::get<Real>(value_)) <= Real(rel_threshold) * abs(scale);
}

namespace {

template <class Op>
Scalar combine(const Scalar& a, const Scalar& b, Op op) {
  if (a.is_exact() && b.is_exact()) return Scalar(Rational(op(a.rational(), b.rational())));
  return Scalar(Real(op(a.real(), b.real())));
}

}  // namespace

Scalar operator+(const Scalar& a, const Scalar& b) {
  return combine(a, b, [](const auto& x, const auto& y) { return x + y; });
}
Scalar operator-(const Scalar& a, const Scalar& b) {
  return combine(a, b, [](const auto& x, const auto& y) { return x - y; });
}
Scalar operator*(const Scalar& a, const Scalar& b) {
  return combine(a, b, [](const auto& x, const auto& y) { return x * y; });
}
Scalar operator-(const Scalar& a) {
  if (a.is_exact()) return Scalar(Rational(-a.rational()));
  return Scalar(Real(-a.real()));
}

bool operator==(const Scalar& a, const Scalar& b) {
  if (a.is_exact() && b.is_exact()) return a.rational() == b.rational();
  return a.real() == b.real();
}

}  // namespace filterforge
