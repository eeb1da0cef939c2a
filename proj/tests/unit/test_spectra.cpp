#include "filterforge/spectra.hpp"

#include "generators.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace filterforge;

namespace {

constexpr double kPi = std::numbers::pi;
const std::vector<PauliAxis> kZ{PauliAxis::z};

ControlMatrix free_cm(double T = 1.0) { return ControlMatrix(free_evolution(rational_from_shortest_decimal(T)), kZ); }
ControlMatrix hahn() { return ControlMatrix(cdd_sequence(1, Rational(1)), kZ); }
ControlMatrix cdd(int k) { return ControlMatrix(cdd_sequence(k, Rational(1)), kZ); }
ControlMatrix udd(int n) { return ControlMatrix(udd_sequence(n, 1.0), kZ); }

// int_0^T y(t) e^{iwt} dt, interval by interval
std::complex<double> switching_transform(const ControlMatrix& cm, double w) {
  const auto& bp = cm.approx().breakpoints;
  std::complex<double> acc = 0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double y = cm.approx().y(i, PauliAxis::z, PauliAxis::z);
    if (w == 0) {
      acc += y * (bp[i + 1] - bp[i]);
    } else {
      acc += y * (std::exp(std::complex<double>(0, w * bp[i + 1])) - std::exp(std::complex<double>(0, w * bp[i]))) /
             std::complex<double>(0, w);
    }
  }
  return acc;
}

// chi for S = s0 gamma^2 / (gamma^2 + w^2) from the jumps c_j of y at tau_j
double lorentzian_closed_form(const ControlMatrix& cm, double s0, double gamma) {
  const auto& bp = cm.approx().breakpoints;
  const std::size_t m = cm.intervals();
  std::vector<double> c(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const double before = j == 0 ? 0.0 : cm.approx().y(j - 1, PauliAxis::z, PauliAxis::z);
    const double after = j == m ? 0.0 : cm.approx().y(j, PauliAxis::z, PauliAxis::z);
    c[j] = before - after;
  }
  double chi = 0;
  for (std::size_t j = 0; j <= m; ++j) {
    for (std::size_t l = j + 1; l <= m; ++l) {
      const double d = bp[l] - bp[j];
      chi += -c[j] * c[l] * (kPi * s0 / gamma) * (d * gamma - 1 + std::exp(-d * gamma));
    }
  }
  return 2 / kPi * chi;
}

}  // namespace

TEST(ChiGaussian, WhiteNoiseIsTwiceS0T) {
  for (const auto& cm : {free_cm(), hahn(), cdd(2), udd(3), udd(4)}) {
    EXPECT_NEAR(chi_gaussian(cm, NoiseSpectrum::white_noise(1.0), 1.0), 2.0, 1e-8) << cm.label();
    EXPECT_NEAR(chi_gaussian(cm, NoiseSpectrum::white_noise(0.3), 2.5), 1.5, 1e-8) << cm.label();
  }
}

TEST(ChiGaussian, ToneMatchesSwitchingTransform) {
  for (const auto& cm : {free_cm(), hahn(), cdd(2), udd(5)}) {
    for (double w0 : {0.0, 0.7, 2 * kPi, 13.0}) {
      const double expect = 2 * 0.4 * std::norm(switching_transform(cm, w0));
      EXPECT_NEAR(chi_gaussian(cm, NoiseSpectrum::single_tone(0.4, w0), 1.0), expect, 1e-12);
    }
  }
  EXPECT_NEAR(chi_gaussian(free_cm(), NoiseSpectrum::single_tone(1.0, 2 * kPi), 1.0), 0.0, 1e-12);
  EXPECT_NEAR(chi_gaussian(free_cm(), NoiseSpectrum::single_tone(1.5, 0.0), 3.0), 2 * 1.5 * 9, 1e-10);
}

TEST(ChiGaussian, LorentzianMatchesJumpClosedForm) {
  for (const auto& cm : {free_cm(), hahn(), cdd(3), udd(4), udd(7)}) {
    for (double gamma : {0.1, 1.0, 30.0, 900.0}) {
      const double expect = lorentzian_closed_form(cm, 1.3, gamma);
      const double got = chi_gaussian(cm, NoiseSpectrum::lorentzian(1.3, gamma), 1.0);
      EXPECT_NEAR(got, expect, 1e-8 * std::max(1.0, expect)) << cm.label() << " gamma " << gamma;
    }
  }
}

TEST(ChiGaussian, ShiftedLorentzianAgainstDirectQuadrature) {
  const auto cm = udd(3);
  const auto s = NoiseSpectrum::lorentzian(2.0, 0.5, 9.0);
  // direct integration of the switching transform; the tail beyond 2000 is below 1e-9
  auto f = [&](double w) { return std::norm(switching_transform(cm, w)) * s(w); };
  double acc = 0;
  for (double a = 0; a < 2000; a += 1.0) {
    acc += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, a + 1, 5, 1e-13);
  }
  EXPECT_NEAR(chi_gaussian(cm, s, 1.0), 2 / kPi * acc, 1e-8);
}

TEST(ChiGaussian, TabulatedWithoutTailStopsAtLastSample) {
  NoiseSpectrum s;
  s.kind = SpectrumKind::tabulated;
  s.samples = {{0.0, 1.0}, {5.0, 2.0}, {12.0, 0.5}, {30.0, 0.0}};
  const auto cm = hahn();
  auto f = [&](double w) { return std::norm(switching_transform(cm, w)) * s(w); };
  double acc = 0;
  const double cuts[] = {0.0, 5.0, 12.0, 30.0};
  for (int i = 0; i < 3; ++i) {
    acc += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 10, 1e-14);
  }
  EXPECT_NEAR(chi_gaussian(cm, s, 1.0), 2 / kPi * acc, 1e-10);
}

TEST(ChiGaussian, TabulatedFlatTailEqualsWhite) {
  NoiseSpectrum s;
  s.kind = SpectrumKind::tabulated;
  s.samples = {{0.0, 0.8}, {3.0, 0.8}};
  s.tail_exponent = 0.0;
  EXPECT_NEAR(chi_gaussian(cdd(2), s, 1.0), 1.6, 1e-8);
}

TEST(ChiGaussian, DivergentTailIsReported) {
  NoiseSpectrum s;
  s.kind = SpectrumKind::tabulated;
  s.samples = {{0.0, 1.0}, {10.0, 1.0}};
  s.tail_exponent = -1.5;
  EXPECT_THROW(chi_gaussian(hahn(), s, 1.0), NumericError);
  s.tail_exponent = -0.5;
  EXPECT_TRUE(std::isfinite(chi_gaussian(hahn(), s, 1.0)));
}

TEST(ChiGaussian, RejectsNonDephasingControl) {
  Pulse p;
  p.time = Instant(Rational(1, 2));
  p.axis = PauliAxis::x;
  p.angle = kPi / 2;
  const ControlMatrix half(PulseSequence(Instant(Rational(1)), {p}), kZ);
  EXPECT_THROW(chi_gaussian(half, NoiseSpectrum::white_noise(1), 1.0), UnsupportedError);
  const ControlMatrix xonly(free_evolution(Rational(1)), {PauliAxis::x});
  EXPECT_THROW(chi_gaussian(xonly, NoiseSpectrum::white_noise(1), 1.0), UnsupportedError);
  EXPECT_THROW(NoiseSpectrum::white_noise(-1), std::invalid_argument);
  EXPECT_THROW(NoiseSpectrum::lorentzian(1, 0), std::invalid_argument);
}

TEST(ChiGaussianProperty, NonNegativeAndBoundedByWhiteEnvelope) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> gam(0.05, 50), cen(0, 40), dur(0.2, 4);
  for (int trial = 0; trial < 25; ++trial) {
    const ControlMatrix cm(ffgen::random_exact_sequence(rng, 6, 24, true), kZ);
    const double T = dur(rng);
    const auto lor = NoiseSpectrum::lorentzian(1.0, gam(rng), cen(rng));
    // S <= 1 pointwise (both Lorentz lobes are <= 1/2), so chi <= chi_white = 2T
    const double chi = chi_gaussian(cm, lor, T);
    EXPECT_GE(chi, 0.0);
    EXPECT_LE(chi, 2 * T + 1e-8);
    // linear in the spectrum scale
    EXPECT_NEAR(chi_gaussian(cm, NoiseSpectrum::lorentzian(3.0, lor.width, lor.center), T), 3 * chi,
                1e-8 * std::max(1.0, chi));
  }
}

TEST(ChiGaussianProperty, MonotoneInDurationForWhiteAndStaticNoise) {
  double last = -1;
  for (double T : {0.1, 0.5, 1.0, 2.0, 4.0}) {
    const double chi = chi_gaussian(free_cm(), NoiseSpectrum::lorentzian(1.0, 0.3), T);
    EXPECT_GT(chi, last);
    last = chi;
  }
}

TEST(ClassicalDecay, PopulationsAndZeroNoise) {
  CumulantSeries cs;
  cs.second = NoiseSpectrum::white_noise(1.0);
  EXPECT_EQ(classical_decay(hahn(), cs, 1.0, 0, 0), std::complex<double>(0.0));
  EXPECT_EQ(classical_decay(hahn(), cs, 1.0, 1, 1), std::complex<double>(0.0));
  CumulantSeries none;
  none.k_max = 4;
  EXPECT_EQ(classical_decay(udd(3), none, 1.0, 0, 1), std::complex<double>(0.0));
}

TEST(ClassicalDecay, SecondOrderIsMinusChi) {
  for (const auto& s : {NoiseSpectrum::white_noise(0.7), NoiseSpectrum::lorentzian(1.0, 2.0, 3.0),
                        NoiseSpectrum::single_tone(0.5, 1.1)}) {
    CumulantSeries cs;
    cs.second = s;
    for (const auto& cm : {hahn(), udd(4)}) {
      const double chi = chi_gaussian(cm, s, 1.0);
      const auto d01 = classical_decay(cm, cs, 1.0, 0, 1);
      const auto d10 = classical_decay(cm, cs, 1.0, 1, 0);
      EXPECT_NEAR(d01.real(), -chi, 1e-8);
      EXPECT_NEAR(d01.imag(), 0.0, 1e-12);
      EXPECT_NEAR(d10.real(), -chi, 1e-8);
    }
  }
}

TEST(ClassicalDecay, MeanGivesPhase) {
  CumulantSeries cs;
  cs.k_max = 1;
  cs.mean = 0.3;
  // rho_01 picks up exp(-2 i mean int y)
  const auto d = classical_decay(free_cm(), cs, 2.0, 0, 1);
  EXPECT_NEAR(d.real(), 0.0, 1e-14);
  EXPECT_NEAR(d.imag(), -2 * 0.3 * 2.0, 1e-12);
  EXPECT_NEAR(std::abs(classical_decay(hahn(), cs, 1.0, 0, 1)), 0.0, 1e-14);
}

TEST(ClassicalDecay, ThirdCumulantAgainstNestedQuadrature) {
  auto s3 = [](double a, double b) { return std::exp(-(a * a + b * b + a * b) / 8.0); };
  CumulantSeries cs;
  cs.k_max = 3;
  StationaryCumulant c3;
  c3.spectrum = [&](std::span<const double> w) { return std::complex<double>(s3(w[0], w[1])); };
  c3.bandwidth = 16;
  c3.nodes = 120;
  cs.higher[3] = c3;
  for (const auto& cm : {free_cm(), hahn()}) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto inner = [&](double a, bool re) {
      return GK::integrate(
          [&](double b) {
            const auto v = switching_transform(cm, a) * switching_transform(cm, b) * switching_transform(cm, -a - b) *
                           s3(a, b);
            return re ? v.real() : v.imag();
          },
          -16.0, 16.0, 4, 1e-10);
    };
    const double re = GK::integrate([&](double a) { return inner(a, true); }, -16.0, 16.0, 4, 1e-9);
    const double im = GK::integrate([&](double a) { return inner(a, false); }, -16.0, 16.0, 4, 1e-9);
    const std::complex<double> p(0, -2);
    const std::complex<double> expect = p * p * p / 6.0 * std::complex<double>(re, im) / (4 * kPi * kPi);
    const auto got = classical_decay(cm, cs, 1.0, 0, 1);
    EXPECT_NEAR(got.real(), expect.real(), 1e-8);
    EXPECT_NEAR(got.imag(), expect.imag(), 1e-8);
  }
}

TEST(ClassicalDecay, GuardsAndEvaluatorFailures) {
  CumulantSeries cs;
  cs.k_max = 5;
  StationaryCumulant c5;
  c5.spectrum = [](std::span<const double>) { return std::complex<double>(1.0); };
  c5.bandwidth = 5;
  c5.nodes = 100;  // 100^4 > 2e7
  cs.higher[5] = c5;
  EXPECT_THROW(classical_decay(hahn(), cs, 1.0, 0, 1), UnsupportedError);

  CumulantSeries bad;
  bad.k_max = 3;
  StationaryCumulant c3;
  c3.spectrum = [](std::span<const double> w) {
    return std::complex<double>(w[0] > 1 ? std::nan("") : 1.0);
  };
  c3.bandwidth = 3;
  c3.nodes = 8;
  bad.higher[3] = c3;
  try {
    classical_decay(hahn(), bad, 1.0, 0, 1);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("undefined"), std::string::npos);
  }
  CumulantSeries deep;
  deep.k_max = 7;
  EXPECT_THROW(classical_decay(hahn(), deep, 1.0, 0, 1), UnsupportedError);
}

TEST(NoiseSpectrumJson, RoundTripAndErrors) {
  NoiseSpectrum tab;
  tab.kind = SpectrumKind::tabulated;
  tab.samples = {{0.0, 1.0}, {2.0, 0.5}};
  tab.tail_exponent = 2.0;
  tab.label = "measured";
  for (const auto& s : {NoiseSpectrum::white_noise(0.25), NoiseSpectrum::single_tone(1.5, 6.0),
                        NoiseSpectrum::lorentzian(1.0, 0.5, 3.0), tab}) {
    const auto j = s.to_json();
    const auto back = NoiseSpectrum::from_json(j);
    EXPECT_EQ(back.to_json(), j);
  }
  EXPECT_EQ(NoiseSpectrum::from_json(tab.to_json()).name(), "measured");
  EXPECT_THROW(NoiseSpectrum::from_json(nlohmann::json::parse(R"({"kind":"pink"})")), std::invalid_argument);
  EXPECT_THROW(NoiseSpectrum::from_json(nlohmann::json::parse(R"({"kind":"white"})")), std::invalid_argument);
  EXPECT_THROW(NoiseSpectrum::from_json(nlohmann::json::parse(R"({"kind":"tabulated","samples":[[1,1],[0.5,1]]})")),
               std::invalid_argument);
  EXPECT_DOUBLE_EQ(tab(1.0), 0.75);
  EXPECT_DOUBLE_EQ(tab(4.0), 0.125);
}
