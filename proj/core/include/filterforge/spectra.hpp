#pragma once

#include "filterforge/control_matrix.hpp"

#include <json.hpp>

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace filterforge {

enum class SpectrumKind { white, tone, lorentzian, tabulated };

/// Stationary classical noise spectrum, symmetric in omega.
///   white:      S(w) = s0
///   tone:       S(w) = pi A [delta(w - w0) + delta(w + w0)]
///   lorentzian: S(w) = s0/2 [L(w - w0) + L(w + w0)], L(x) = gamma^2 / (gamma^2 + x^2)
///   tabulated:  linear interpolation of (w >= 0, S) samples, constant below the
///               first sample; beyond the last sample S = 0, or S_last (w/w_last)^-p
///               when tail_exponent p is given.
struct NoiseSpectrum {
  SpectrumKind kind = SpectrumKind::white;
  double s0 = 0.0;
  double amplitude = 0.0;  // tone A
  double center = 0.0;     // tone w0, lorentzian w0
  double width = 1.0;      // lorentzian gamma
  std::vector<std::pair<double, double>> samples;
  std::optional<double> tail_exponent;
  std::string label;

  /// Density at w for continuous kinds; throws for tones.
  double operator()(double w) const;
  void validate() const;

  static NoiseSpectrum white_noise(double s0);
  static NoiseSpectrum single_tone(double amplitude, double w0);
  static NoiseSpectrum lorentzian(double s0, double gamma, double w0 = 0.0);

  /// {"kind": "white|tone|lorentzian|tabulated", ...}. Parameters: white s0;
  /// tone amplitude, omega0; lorentzian s0, width, omega0 (optional);
  /// tabulated samples [[w, S], ...], tail_exponent (optional). "label" optional.
  static NoiseSpectrum from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  std::string name() const;
};

const char* to_string(SpectrumKind kind);

/// Gaussian dephasing exponent chi = 2 int dw/2pi G(w) G(-w) S(w) over [0, T];
/// rho_01(T) = rho_01(0) e^{-chi}. cm needs error axis z with only y_zz nonzero.
/// Tones are evaluated in closed form; continuous kinds by adaptive
/// Gauss-Kronrod panels plus an exact oscillatory tail. Throws NumericError
/// when the spectrum tail is not integrable.
double chi_gaussian(const ControlMatrix& cm, const NoiseSpectrum& spectrum, double T);

/// Stationary k-th cumulant (k >= 3): C_k(w) = 2 pi delta(w_1 + ... + w_k) S_k(w_1..w_{k-1}),
/// band-limited to [-bandwidth, bandwidth]^{k-1}.
struct StationaryCumulant {
  std::function<std::complex<double>(std::span<const double>)> spectrum;
  double bandwidth = 0.0;
  int nodes = 64;  // Gauss-Legendre points per frequency axis
};

/// Cumulants up to order k_max. Orders >= 3 without an entry are zero.
struct CumulantSeries {
  int k_max = 2;
  double mean = 0.0;  // k = 1: constant mean, 0 for zero-mean noise
  std::optional<NoiseSpectrum> second;
  std::map<int, StationaryCumulant> higher;
};

/// Exponent of <rho_lm(T)> / rho_lm(0) for classical dephasing noise:
///   sum_k ({i[(-1)^m - (-1)^l]}^k / k!) int d^k w/(2 pi)^k G(w_1)..G(w_k) C_k(w).
/// l = m gives 0. k_max <= 6.
std::complex<double> classical_decay(const ControlMatrix& cm, const CumulantSeries& cumulants,
                                     double T, int ell, int m);

}  // namespace filterforge
