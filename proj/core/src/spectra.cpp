#include "filterforge/spectra.hpp"

#include "filterforge/fff.hpp"
#include "filterforge/simplex_quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>

#include <algorithm>
#include <functional>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace filterforge {

namespace {

constexpr double kPi = std::numbers::pi;

double lorentz(double x, double gamma) { return gamma * gamma / (gamma * gamma + x * x); }

ControlMatrix dephasing_matrix(const ControlMatrix& cm, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!cm.has_error_axis(PauliAxis::z)) {
    throw UnsupportedError("dephasing decay needs error axis z");
  }
  if (!cm.identically_zero(PauliAxis::z, PauliAxis::x) ||
      !cm.identically_zero(PauliAxis::z, PauliAxis::y)) {
    throw UnsupportedError("dephasing decay needs a pi-pulse sequence (y_zx = y_zy = 0)");
  }
  if (T == cm.duration()) return cm;
  return cm.dilated(rational_from_shortest_decimal(T) / rational_from_shortest_decimal(cm.duration()));
}

const IndexTuple& zz() {
  static const IndexTuple idx({PauliAxis::z}, {PauliAxis::z});
  return idx;
}

// G^(1)(w) = i F^(1)(w) = int_0^T y(t) e^{iwt} dt
std::complex<double> g1(const ControlMatrix& cm, double w) {
  const double ws[1] = {w};
  return std::complex<double>(0, 1) * fff_value<double>(cm, zz(), std::span<const double>(ws, 1)).to_std();
}

// G(w) = (1/(iw)) sum_j c_j e^{i w tau_j} with c_j the jumps of y; the
// moment series takes over for |w| T < 1 where the sum cancels.
class SwitchingTransform {
 public:
  explicit SwitchingTransform(const ControlMatrix& cm) : cm_(cm), T_(cm.duration()) {
    const std::size_t m = cm.intervals();
    for (std::size_t j = 0; j <= m; ++j) {
      const double before = j == 0 ? 0.0 : cm.approx().y(j - 1, PauliAxis::z, PauliAxis::z);
      const double after = j == m ? 0.0 : cm.approx().y(j, PauliAxis::z, PauliAxis::z);
      if (before != after) {
        tau_.push_back(cm.approx().breakpoints[j]);
        c_.push_back(before - after);
      }
    }
  }

  std::complex<double> operator()(double w) const {
    if (std::abs(w) * T_ < 1.0) return g1(cm_, w);
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < tau_.size(); ++j) acc += c_[j] * std::polar(1.0, w * tau_[j]);
    return acc / std::complex<double>(0.0, w);
  }

 private:
  const ControlMatrix& cm_;
  double T_;
  std::vector<double> tau_, c_;
};

// |G(w)|^2 = (1/w^2) [sum c_j^2 + 2 sum_{j<l} c_j c_l cos(w (tau_l - tau_j))],
// c_j the jump of y at breakpoint tau_j (y = 0 outside [0, T]).
struct JumpForm {
  double diagonal = 0.0;
  std::vector<std::pair<double, double>> cross;  // (delta, 2 c_j c_l), deltas merged
};

JumpForm jump_form(const ControlMatrix& cm) {
  const auto& bp = cm.approx().breakpoints;
  const std::size_t m = cm.intervals();
  std::vector<double> c(m + 1);
  for (std::size_t j = 0; j <= m; ++j) {
    const double before = j == 0 ? 0.0 : cm.approx().y(j - 1, PauliAxis::z, PauliAxis::z);
    const double after = j == m ? 0.0 : cm.approx().y(j, PauliAxis::z, PauliAxis::z);
    c[j] = before - after;
  }
  JumpForm f;
  std::vector<std::pair<double, double>> raw;
  for (std::size_t j = 0; j <= m; ++j) {
    f.diagonal += c[j] * c[j];
    for (std::size_t l = j + 1; l <= m; ++l) {
      if (c[j] != 0.0 && c[l] != 0.0) raw.emplace_back(bp[l] - bp[j], 2.0 * c[j] * c[l]);
    }
  }
  std::sort(raw.begin(), raw.end());
  const double eps = 1e-13 * cm.duration();
  for (const auto& [d, w] : raw) {
    if (!f.cross.empty() && d - f.cross.back().first < eps) {
      f.cross.back().second += w;
    } else {
      f.cross.emplace_back(d, w);
    }
  }
  return f;
}

// int_{a}^{inf} S(w) |G(w)|^2 dw for the continuous kinds, via the jump form
double tail_integral(const NoiseSpectrum& s, const JumpForm& f, double a) {
  auto h = [&](double x) {
    const double w = a + x;
    return s(w) / (w * w);
  };
  boost::math::quadrature::exp_sinh<double> es;
  double mean = 0.0;
  if (f.diagonal != 0.0) {
    mean = f.diagonal * es.integrate([&](double x) { return h(x); }, 0.0,
                                     std::numeric_limits<double>::infinity(), 1e-12);
  }
  double osc = 0.0;
  if (!f.cross.empty()) {
    boost::math::quadrature::ooura_fourier_cos<double> fc(1e-11);
    boost::math::quadrature::ooura_fourier_sin<double> fs(1e-11);
    for (const auto& [d, w] : f.cross) {
      // cos(d (a + x)) = cos(d a) cos(d x) - sin(d a) sin(d x)
      const double c = fc.integrate(h, d).first;
      const double sn = fs.integrate(h, d).first;
      osc += w * (std::cos(d * a) * c - std::sin(d * a) * sn);
    }
  }
  return mean + osc;
}

void check_tail(const NoiseSpectrum& s) {
  if (s.kind == SpectrumKind::tabulated && s.tail_exponent && *s.tail_exponent <= -1.0) {
    std::ostringstream msg;
    msg << "divergent spectrum tail: S(w) ~ w^" << -*s.tail_exponent
        << " against |G(w)|^2 ~ w^-2 is not integrable (need tail_exponent > -1)";
    throw NumericError(msg.str());
  }
}

}  // namespace

const char* to_string(SpectrumKind kind) {
  switch (kind) {
    case SpectrumKind::white: return "white";
    case SpectrumKind::tone: return "tone";
    case SpectrumKind::lorentzian: return "lorentzian";
    case SpectrumKind::tabulated: return "tabulated";
  }
  return "?";
}

NoiseSpectrum NoiseSpectrum::white_noise(double s0) {
  NoiseSpectrum s;
  s.kind = SpectrumKind::white;
  s.s0 = s0;
  s.validate();
  return s;
}

NoiseSpectrum NoiseSpectrum::single_tone(double amplitude, double w0) {
  NoiseSpectrum s;
  s.kind = SpectrumKind::tone;
  s.amplitude = amplitude;
  s.center = w0;
  s.validate();
  return s;
}

NoiseSpectrum NoiseSpectrum::lorentzian(double s0, double gamma, double w0) {
  NoiseSpectrum s;
  s.kind = SpectrumKind::lorentzian;
  s.s0 = s0;
  s.width = gamma;
  s.center = w0;
  s.validate();
  return s;
}

void NoiseSpectrum::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  switch (kind) {
    case SpectrumKind::white:
      if (!finite(s0) || s0 < 0) throw std::invalid_argument("white spectrum needs s0 >= 0");
      break;
    case SpectrumKind::tone:
      if (!finite(amplitude) || amplitude < 0) throw std::invalid_argument("tone needs amplitude >= 0");
      if (!finite(center)) throw std::invalid_argument("tone needs a finite omega0");
      break;
    case SpectrumKind::lorentzian:
      if (!finite(s0) || s0 < 0) throw std::invalid_argument("lorentzian needs s0 >= 0");
      if (!finite(width) || width <= 0) throw std::invalid_argument("lorentzian needs width > 0");
      if (!finite(center)) throw std::invalid_argument("lorentzian needs a finite omega0");
      break;
    case SpectrumKind::tabulated:
      if (samples.empty()) throw std::invalid_argument("tabulated spectrum needs samples");
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& [w, v] = samples[i];
        if (!finite(w) || !finite(v) || w < 0 || v < 0) {
          throw std::invalid_argument("tabulated samples need w >= 0 and S >= 0");
        }
        if (i > 0 && !(w > samples[i - 1].first)) {
          throw std::invalid_argument("tabulated frequencies must increase");
        }
      }
      if (tail_exponent && !finite(*tail_exponent)) throw std::invalid_argument("bad tail exponent");
      if (tail_exponent && samples.back().first <= 0) {
        throw std::invalid_argument("a power-law tail needs a last sample at w > 0");
      }
      break;
  }
}

double NoiseSpectrum::operator()(double w) const {
  w = std::abs(w);
  switch (kind) {
    case SpectrumKind::white: return s0;
    case SpectrumKind::lorentzian:
      return 0.5 * s0 * (lorentz(w - center, width) + lorentz(w + center, width));
    case SpectrumKind::tabulated: {
      if (w <= samples.front().first) return samples.front().second;
      if (w >= samples.back().first) {
        if (!tail_exponent) return w == samples.back().first ? samples.back().second : 0.0;
        return samples.back().second * std::pow(w / samples.back().first, -*tail_exponent);
      }
      auto it = std::upper_bound(samples.begin(), samples.end(), w,
                                 [](double x, const auto& p) { return x < p.first; });
      const auto& [w1, s1] = *it;
      const auto& [w0, sv0] = *(it - 1);
      return sv0 + (s1 - sv0) * (w - w0) / (w1 - w0);
    }
    case SpectrumKind::tone: break;
  }
  throw std::logic_error("tone spectra have no density");
}

NoiseSpectrum NoiseSpectrum::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw std::invalid_argument("spectrum JSON needs a string field \"kind\"");
  }
  auto num = [&](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number()) {
      throw std::invalid_argument(std::string("spectrum JSON needs numeric \"") + key + "\"");
    }
    return j[key].get<double>();
  };
  NoiseSpectrum s;
  const std::string kind = j["kind"];
  if (kind == "white") {
    s.kind = SpectrumKind::white;
    s.s0 = num("s0");
  } else if (kind == "tone") {
    s.kind = SpectrumKind::tone;
    s.amplitude = num("amplitude");
    s.center = num("omega0");
  } else if (kind == "lorentzian") {
    s.kind = SpectrumKind::lorentzian;
    s.s0 = num("s0");
    s.width = num("width");
    s.center = j.contains("omega0") ? num("omega0") : 0.0;
  } else if (kind == "tabulated") {
    s.kind = SpectrumKind::tabulated;
    if (!j.contains("samples") || !j["samples"].is_array()) {
      throw std::invalid_argument("tabulated spectrum needs \"samples\": [[w, S], ...]");
    }
    for (const auto& p : j["samples"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        throw std::invalid_argument("each sample must be [w, S]");
      }
      s.samples.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    if (j.contains("tail_exponent")) s.tail_exponent = num("tail_exponent");
  } else {
    throw std::invalid_argument("unknown spectrum kind '" + kind + "'");
  }
  if (j.contains("label") && j["label"].is_string()) s.label = j["label"];
  s.validate();
  return s;
}

nlohmann::json NoiseSpectrum::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case SpectrumKind::white: j["s0"] = s0; break;
    case SpectrumKind::tone:
      j["amplitude"] = amplitude;
      j["omega0"] = center;
      break;
    case SpectrumKind::lorentzian:
      j["s0"] = s0;
      j["width"] = width;
      j["omega0"] = center;
      break;
    case SpectrumKind::tabulated: {
      auto arr = nlohmann::json::array();
      for (const auto& [w, v] : samples) arr.push_back({w, v});
      j["samples"] = std::move(arr);
      if (tail_exponent) j["tail_exponent"] = *tail_exponent;
      break;
    }
  }
  if (!label.empty()) j["label"] = label;
  return j;
}

std::string NoiseSpectrum::name() const { return label.empty() ? to_string(kind) : label; }

double chi_gaussian(const ControlMatrix& cm_in, const NoiseSpectrum& s, double T) {
  s.validate();
  const ControlMatrix cm = dephasing_matrix(cm_in, T);
  if (s.kind == SpectrumKind::tone) {
    // 2 (1/2pi) pi A (|G(w0)|^2 + |G(-w0)|^2)
    return 2.0 * s.amplitude * std::norm(g1(cm, s.center));
  }
  check_tail(s);
  // chi = (2/pi) int_0^inf |G|^2 S dw
  std::vector<double> cuts{0.0};
  double head_end = 40.0 * kPi / T;
  if (s.kind == SpectrumKind::lorentzian) {
    head_end = std::max(head_end, s.center + 40.0 * std::min(s.width, 1.0 / T));
    for (double k : {-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0}) cuts.push_back(s.center + k * s.width);
  }
  const bool finite_support = s.kind == SpectrumKind::tabulated && !s.tail_exponent;
  if (s.kind == SpectrumKind::tabulated) {
    for (const auto& [w, v] : s.samples) cuts.push_back(w);
    head_end = finite_support ? s.samples.back().first : std::max(head_end, s.samples.back().first);
  }
  for (double w = kPi / T; w < head_end; w += kPi / T) cuts.push_back(w);
  cuts.push_back(head_end);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double w) { return w < 0 || w > head_end; }),
             cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double a, double b) { return b - a < 1e-12 * head_end; }),
             cuts.end());

  const SwitchingTransform G(cm);
  auto integrand = [&](double w) { return std::norm(G(w)) * s(w); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  // one GK61 pass per panel sets the scale; panels are then bisected until
  // their error estimate is below 1e-13 of the whole
  std::vector<double> coarse(cuts.size() - 1), coarse_err(cuts.size() - 1);
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    coarse[i] = GK::integrate(integrand, cuts[i], cuts[i + 1], 0, 0.0, &coarse_err[i]);
    scale += std::abs(coarse[i]);
  }
  const double abs_tol = 1e-13 * std::max(scale, std::numeric_limits<double>::min());
  std::function<double(double, double, double, double, int)> refine = [&](double a, double b, double val,
                                                                          double err, int depth) {
    if (err <= abs_tol || depth >= 16) return val;
    const double mid = 0.5 * (a + b);
    double e1, e2;
    const double v1 = GK::integrate(integrand, a, mid, 0, 0.0, &e1);
    const double v2 = GK::integrate(integrand, mid, b, 0, 0.0, &e2);
    return refine(a, mid, v1, e1, depth + 1) + refine(mid, b, v2, e2, depth + 1);
  };
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    head += refine(cuts[i], cuts[i + 1], coarse[i], coarse_err[i], 0);
  }
  double tail = finite_support ? 0.0 : tail_integral(s, jump_form(cm), head_end);
  const double chi = 2.0 / kPi * (head + tail);
  if (!std::isfinite(chi)) throw NumericError("divergent spectrum tail: the decay integral is not finite");
  return std::max(chi, 0.0);
}

std::complex<double> classical_decay(const ControlMatrix& cm_in, const CumulantSeries& cs, double T,
                                     int ell, int m) {
  if ((ell != 0 && ell != 1) || (m != 0 && m != 1)) throw std::invalid_argument("l, m must be 0 or 1");
  if (cs.k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (cs.k_max > 6) throw UnsupportedError("k_max > 6 exceeds the cost guard");
  const ControlMatrix cm = dephasing_matrix(cm_in, T);
  if (ell == m) return 0.0;
  const std::complex<double> p(0.0, (m % 2 ? -1.0 : 1.0) - (ell % 2 ? -1.0 : 1.0));
  std::complex<double> total = 0.0;
  std::complex<double> pk = 1.0;
  double kfact = 1.0;
  for (int k = 1; k <= cs.k_max; ++k) {
    pk *= p;
    kfact *= k;
    std::complex<double> integral = 0.0;
    if (k == 1) {
      integral = cs.mean * g1(cm, 0.0);
    } else if (k == 2) {
      if (cs.second) integral = 0.5 * chi_gaussian(cm, *cs.second, T);
    } else {
      auto it = cs.higher.find(k);
      if (it == cs.higher.end()) continue;
      const StationaryCumulant& c = it->second;
      if (!c.spectrum) throw std::invalid_argument("cumulant evaluator missing");
      if (!(c.bandwidth > 0) || c.nodes < 1) throw std::invalid_argument("cumulant needs bandwidth > 0 and nodes >= 1");
      const int dims = k - 1;
      if (std::pow(static_cast<double>(c.nodes), dims) > 2e7) {
        throw UnsupportedError("cumulant quadrature grid exceeds the cost guard");
      }
      const GaussRule& gl = gauss_legendre(c.nodes);
      const SwitchingTransform G(cm);
      std::vector<double> w(c.nodes), wt(c.nodes);
      std::vector<std::complex<double>> gw(c.nodes);
      for (int i = 0; i < c.nodes; ++i) {
        w[i] = -c.bandwidth + 2 * c.bandwidth * gl.nodes[i];
        wt[i] = 2 * c.bandwidth * gl.weights[i];
        gw[i] = G(w[i]);
      }
      std::vector<int> digit(dims, 0);
      std::vector<double> point(dims);
      for (;;) {
        double sum = 0.0, weight = 1.0;
        std::complex<double> gprod = 1.0;
        for (int d = 0; d < dims; ++d) {
          point[d] = w[digit[d]];
          sum += point[d];
          weight *= wt[digit[d]];
          gprod *= gw[digit[d]];
        }
        std::complex<double> sk;
        try {
          sk = c.spectrum(std::span<const double>(point));
        } catch (const std::exception& e) {
          throw NumericError(std::string("cumulant evaluator failed: ") + e.what());
        }
        if (!std::isfinite(sk.real()) || !std::isfinite(sk.imag())) {
          std::ostringstream msg;
          msg << "cumulant evaluator undefined at order " << k << ", w = (";
          for (int d = 0; d < dims; ++d) msg << (d ? ", " : "") << point[d];
          msg << ")";
          throw NumericError(msg.str());
        }
        integral += weight * gprod * G(-sum) * sk;
        int d = dims - 1;
        while (d >= 0 && ++digit[d] == c.nodes) digit[d--] = 0;
        if (d < 0) break;
      }
      integral /= std::pow(2 * kPi, dims);
    }
    total += pk / kfact * integral;
  }
  return total;
}

}  // namespace filterforge
