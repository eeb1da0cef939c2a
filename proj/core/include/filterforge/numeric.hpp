#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

namespace filterforge {

/// Exact rational arithmetic (GMP).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

/// 256-bit binary floating point (MPFR). 77 decimal digits maps to 256+ bits.
using Real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<77, boost::multiprecision::allocate_stack>,
    boost::multiprecision::et_off>;

/// Mantissa bits carried by Real.
inline constexpr unsigned kRealBits = 256;

/// Precision used by order computations unless overridden.
inline constexpr unsigned kDefaultOrderPrecision = 192;

/// Precision used by grid scans unless overridden.
inline constexpr unsigned kDefaultScanPrecision = 53;

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws UnsupportedError for precisions the library cannot honor.
void check_precision(unsigned bits);

Real pi_real();
Real to_real(const Rational& q);
double to_double(const Rational& q);
double to_double(const Real& r);
inline double to_double(double d) { return d; }

/// Exact rational value of a finite double (every double is dyadic).
Rational rational_from_double(double d);

/// Rational value of the shortest decimal string that round-trips to `d`.
/// 0.1 maps to 1/10, not to the dyadic neighbour.
Rational rational_from_shortest_decimal(double d);

/// Shortest round-trip decimal representation of a double.
std::string shortest_decimal(double d);

/// Minimal complex type usable with multiprecision scalars; std::complex<T>
/// is only specified for the built-in floating types.
template <class S>
struct Cplx {
  S re{};
  S im{};

  Cplx() = default;
  Cplx(S r) : re(std::move(r)), im(0) {}
  Cplx(S r, S i) : re(std::move(r)), im(std::move(i)) {}

  Cplx& operator+=(const Cplx& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Cplx& operator-=(const Cplx& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Cplx& operator*=(const Cplx& o) {
    S r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Cplx& operator*=(const S& s) {
    re *= s;
    im *= s;
    return *this;
  }
  Cplx& operator/=(const Cplx& o) {
    S d = o.re * o.re + o.im * o.im;
    S r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = std::move(r);
    return *this;
  }
  Cplx& operator/=(const S& s) {
    re /= s;
    im /= s;
    return *this;
  }

  friend Cplx operator+(Cplx a, const Cplx& b) { return a += b; }
  friend Cplx operator-(Cplx a, const Cplx& b) { return a -= b; }
  friend Cplx operator*(Cplx a, const Cplx& b) { return a *= b; }
  friend Cplx operator*(Cplx a, const S& s) { return a *= s; }
  friend Cplx operator*(const S& s, Cplx a) { return a *= s; }
  friend Cplx operator/(Cplx a, const Cplx& b) { return a /= b; }
  friend Cplx operator/(Cplx a, const S& s) { return a /= s; }
  friend Cplx operator-(Cplx a) {
    a.re = -a.re;
    a.im = -a.im;
    return a;
  }

  Cplx conj() const { return {re, -im}; }
  S norm2() const { return re * re + im * im; }
  S abs() const {
    using std::sqrt;
    return sqrt(norm2());
  }
  std::complex<double> to_std() const { return {to_double(re), to_double(im)}; }
};

/// e^{i theta}
template <class S>
Cplx<S> expi(const S& theta) {
  using std::cos;
  using std::sin;
  return {cos(theta), sin(theta)};
}

/// i^n for integer n.
template <class S>
Cplx<S> ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {S(1), S(0)};
    case 1: return {S(0), S(1)};
    case 2: return {S(-1), S(0)};
    default: return {S(0), S(-1)};
  }
}

enum class ScalarKind { exact_rational, high_precision_real };

const char* to_string(ScalarKind kind);

/// A moment value: exact rational or 256-bit real.
class Scalar {
 public:
  Scalar() : value_(Rational(0)) {}
  Scalar(Rational q) : value_(std::move(q)) {}
  Scalar(Real r) : value_(std::move(r)) {}

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  ScalarKind kind() const {
    return is_exact() ? ScalarKind::exact_rational : ScalarKind::high_precision_real;
  }
  const Rational& rational() const { return std::get<Rational>(value_); }
  Real real() const;
  double to_double() const;
  std::string str() const;

  /// Exact zero for rationals; |x| <= rel_threshold * scale for reals.
  bool is_zero(const Real& scale, double rel_threshold = 1e-30) const;

  friend Scalar operator+(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a, const Scalar& b);
  friend Scalar operator*(const Scalar& a, const Scalar& b);
  friend Scalar operator-(const Scalar& a);
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }

  friend bool operator==(const Scalar& a, const Scalar& b);

 private:
  std::variant<Rational, Real> value_;
};

}  // namespace filterforge
