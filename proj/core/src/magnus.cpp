#include "filterforge/magnus.hpp"

#include "filterforge/gff.hpp"
#include "filterforge/simplex_quadrature.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace filterforge {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

const char* to_string(ToyKind kind) {
  switch (kind) {
    case ToyKind::quantum_single_tone: return "quantum";
    case ToyKind::classical_cos: return "classical-cos";
    case ToyKind::classical_sin: return "classical-sin";
    case ToyKind::quasi_static: return "quasi-static";
  }
  return "?";
}

ToyKind parse_toy_kind(const std::string& s) {
  if (s == "quantum" || s == "quantum-single-tone") return ToyKind::quantum_single_tone;
  if (s == "classical-cos") return ToyKind::classical_cos;
  if (s == "classical-sin") return ToyKind::classical_sin;
  if (s == "quasi-static") return ToyKind::quasi_static;
  throw std::invalid_argument("unknown noise model '" + s + "'");
}

int ToyNoiseModel::bath_dim() const {
  return kind == ToyKind::classical_cos || kind == ToyKind::classical_sin ? 1 : 2;
}

std::vector<BathComponent> ToyNoiseModel::components() const {
  const cd i(0, 1);
  std::vector<BathComponent> out;
  auto scalar = [](cd c) { return Mat::Constant(1, 1, c); };
  const Mat Z = pauli_matrix(PauliAxis::z), Y = pauli_matrix(PauliAxis::y);
  switch (kind) {
    case ToyKind::quantum_single_tone:
      // cos(wt) Z + sin(wt) Y = e^{iwt} (Z - iY)/2 + e^{-iwt} (Z + iY)/2
      out.push_back({omega, (Z - i * Y) / 2.0});
      out.push_back({-omega, (Z + i * Y) / 2.0});
      if (bias != 0.0) out.push_back({0.0, bias * pauli_matrix(PauliAxis::x)});
      break;
    case ToyKind::classical_cos:
      out.push_back({omega, scalar(0.5)});
      out.push_back({-omega, scalar(0.5)});
      if (bias != 0.0) out.push_back({0.0, scalar(bias)});
      break;
    case ToyKind::classical_sin:
      out.push_back({omega, scalar(-0.5 * i)});
      out.push_back({-omega, scalar(0.5 * i)});
      if (bias != 0.0) out.push_back({0.0, scalar(bias)});
      break;
    case ToyKind::quasi_static:
      out.push_back({0.0, Z});
      break;
  }
  return out;
}

double ToyNoiseModel::coupling_bound() const {
  switch (kind) {
    case ToyKind::quantum_single_tone: return std::sqrt(1.0 + bias * bias);
    case ToyKind::classical_cos:
    case ToyKind::classical_sin: return 1.0 + std::abs(bias);
    case ToyKind::quasi_static: return 1.0;
  }
  return 1.0;
}

Mat HpMatrix::to_double() const {
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = (*this)(r, c).to_std();
  }
  return m;
}

Mat MagnusTerms::sum() const {
  Mat s = Mat::Zero(dim(), dim());
  for (const auto& t : terms) s += t;
  return s;
}

namespace {

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    }
  }
  return out;
}

std::vector<PauliAxis> active_axes(const ControlMatrix& cm) {
  if (!cm.has_error_axis(PauliAxis::z)) {
    throw UnsupportedError("toy models couple through sigma_z; the matrix lacks error axis z");
  }
  std::vector<PauliAxis> out;
  for (PauliAxis v : kAllAxes) {
    if (!cm.identically_zero(PauliAxis::z, v)) out.push_back(v);
  }
  return out;
}

ControlMatrix rescaled(const ControlMatrix& cm, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("duration must be positive");
  if (T == cm.duration()) return cm;
  Rational f = rational_from_shortest_decimal(T) / rational_from_shortest_decimal(cm.duration());
  return cm.dilated(f);
}

// Gauss-Legendre nodes on [0,1] with the cumulative integration matrix
// S(i, j) = int_0^{x_i} l_j, l_j the Lagrange basis on the nodes.
struct PanelRule {
  std::vector<double> x, w;
  Eigen::MatrixXd S;
};

const PanelRule& panel_rule(int n) {
  static std::mutex mu;
  static std::map<int, PanelRule> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const GaussRule& g = gauss_legendre(n);
  PanelRule r{g.nodes, g.weights, Eigen::MatrixXd(n, n)};
  std::vector<double> lambda(n, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n; ++m) {
      if (m != j) lambda[j] /= (r.x[j] - r.x[m]);
    }
  }
  for (int i = 0; i < n; ++i) {
    r.S.row(i).setZero();
    for (int k = 0; k < n; ++k) {
      const double s = r.x[i] * r.x[k];
      double denom = 0.0;
      std::vector<double> terms(n);
      int hit = -1;
      for (int j = 0; j < n; ++j) {
        if (s == r.x[j]) hit = j;
        terms[j] = lambda[j] / (s - r.x[j]);
        denom += terms[j];
      }
      for (int j = 0; j < n; ++j) {
        const double lj = hit >= 0 ? (j == hit ? 1.0 : 0.0) : terms[j] / denom;
        r.S(i, j) += r.x[i] * r.w[k] * lj;
      }
    }
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// vec(L X) for L X = [Q, [H, X]], column-major vec.
Mat nested_commutator_super(const Mat& Q, const Mat& H) {
  const Mat I = Mat::Identity(Q.rows(), Q.cols());
  return kron(I, Q * H) - kron(H.transpose(), Q) - kron(Q.transpose(), H) +
         kron((H * Q).transpose(), I);
}

Mat vec(const Mat& m) { return Eigen::Map<const Mat>(m.data(), m.size(), 1); }
Mat unvec(const Mat& v, Eigen::Index d) { return Eigen::Map<const Mat>(v.data(), d, d); }

std::vector<Mat> quadrature_pass(const ControlMatrix& cm, const ToyNoiseModel& model, int order,
                                 int nodes) {
  const auto& bp = cm.approx().breakpoints;
  const Eigen::Index d = 2 * model.bath_dim();
  double nu_max = 0.0;
  for (const auto& c : model.components()) nu_max = std::max(nu_max, std::abs(c.nu));
  const PanelRule& rule = panel_rule(nodes);
  const int n = nodes;

  Mat Q = Mat::Zero(d, d), R = Mat::Zero(d, d), M = Mat::Zero(d * d, d * d);
  Mat O3a = Mat::Zero(d, d), O3b = Mat::Zero(d, d);
  std::vector<Mat> H(n), Qn(n), Rn(n), Mn(n);
  for (std::size_t iv = 0; iv + 1 < bp.size(); ++iv) {
    const double a0 = bp[iv], b0 = bp[iv + 1];
    // sub-panels keep the phase advance per panel below ~2 rad
    const int sub = std::max(1, static_cast<int>(std::ceil(nu_max * (b0 - a0) / 2.0)));
    for (int s = 0; s < sub; ++s) {
      const double a = a0 + (b0 - a0) * s / sub, h = (b0 - a0) / sub;
      for (int i = 0; i < n; ++i) H[i] = toy_hamiltonian(cm, model, iv, a + h * rule.x[i]);
      for (int i = 0; i < n; ++i) {
        Qn[i] = Q;
        for (int j = 0; j < n; ++j) Qn[i] += (h * rule.S(i, j)) * H[j];
      }
      if (order >= 2) {
        for (int i = 0; i < n; ++i) {
          Rn[i] = R;
          for (int j = 0; j < n; ++j) Rn[i] += (h * rule.S(i, j)) * (H[j] * Qn[j] - Qn[j] * H[j]);
        }
      }
      if (order >= 3) {
        std::vector<Mat> L(n);
        for (int j = 0; j < n; ++j) L[j] = nested_commutator_super(Qn[j], H[j]);
        for (int i = 0; i < n; ++i) {
          Mn[i] = M;
          for (int j = 0; j < n; ++j) Mn[i] += (h * rule.S(i, j)) * L[j];
        }
        for (int j = 0; j < n; ++j) {
          const double wj = h * rule.w[j];
          O3a += wj * (H[j] * Rn[j] - Rn[j] * H[j]);
          O3b += wj * unvec(Mn[j] * vec(H[j]), d);
          M += wj * L[j];
        }
      }
      for (int j = 0; j < n; ++j) {
        const double wj = h * rule.w[j];
        if (order >= 2) R += wj * (H[j] * Qn[j] - Qn[j] * H[j]);
        Q += wj * H[j];
      }
    }
  }
  std::vector<Mat> out;
  out.push_back(cd(0, -1) * Q);
  if (order >= 2) out.push_back(-0.5 * R);
  if (order >= 3) out.push_back(cd(0, 1.0 / 6.0) * (O3a + O3b));
  return out;
}

HpMatrix hp_from(const Mat& m) {
  HpMatrix out(static_cast<int>(m.rows()));
  for (int r = 0; r < out.n; ++r) {
    for (int c = 0; c < out.n; ++c) out(r, c) = Cplx<Real>(Real(m(r, c).real()), Real(m(r, c).imag()));
  }
  return out;
}

HpMatrix hp_mul(const HpMatrix& x, const HpMatrix& y) {
  HpMatrix out(x.n);
  for (int r = 0; r < x.n; ++r) {
    for (int c = 0; c < x.n; ++c) {
      Cplx<Real> acc(Real(0));
      for (int k = 0; k < x.n; ++k) acc += x(r, k) * y(k, c);
      out(r, c) = acc;
    }
  }
  return out;
}

std::vector<HpMatrix> closed_form_terms(const ControlMatrix& cm, const ToyNoiseModel& model,
                                        int order, GffCache* cache) {
  const auto axes = active_axes(cm);
  const auto comps = model.components();
  const int d = 2 * model.bath_dim();
  // sigma_v (x) P_j for every letter (v, j)
  std::vector<std::pair<PauliAxis, std::size_t>> letters;
  std::vector<HpMatrix> letter_ops;
  for (PauliAxis v : axes) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      letters.emplace_back(v, j);
      letter_ops.push_back(hp_from(kron(pauli_matrix(v), comps[j].op)));
    }
  }
  std::vector<HpMatrix> out;
  const Real g(model.g);
  Real g_pow(1);
  for (int alpha = 1; alpha <= order; ++alpha) {
    g_pow *= g;
    HpMatrix acc(d);
    for (auto& e : acc.a) e = Cplx<Real>(Real(0));
    if (letters.empty()) {
      out.push_back(std::move(acc));
      continue;
    }
    std::vector<std::size_t> digit(alpha, 0);
    for (;;) {
      std::vector<PauliAxis> u(alpha, PauliAxis::z), v(alpha);
      std::vector<Real> nu(alpha);
      HpMatrix prod = letter_ops[digit[0]];
      for (int p = 0; p < alpha; ++p) {
        v[p] = letters[digit[p]].first;
        nu[p] = Real(comps[letters[digit[p]].second].nu);
        if (p > 0) prod = hp_mul(prod, letter_ops[digit[p]]);
      }
      std::vector<int> vkey;
      std::vector<double> nkey;
      for (int p = 0; p < alpha; ++p) {
        vkey.push_back(index(v[p]));
        nkey.push_back(comps[letters[digit[p]].second].nu);
      }
      Cplx<Real> G;
      auto hit = cache ? cache->values.find({vkey, nkey}) : decltype(cache->values.end()){};
      if (cache && hit != cache->values.end()) {
        G = hit->second;
      } else {
        G = gff_value<Real>(cm, IndexTuple(u, v), std::span<const Real>(nu));
        if (cache) cache->values.emplace(std::make_pair(vkey, nkey), G);
      }
      // coefficient of the word is -iG
      Cplx<Real> c = Cplx<Real>(Real(0), Real(-1)) * G * g_pow;
      for (std::size_t k = 0; k < acc.a.size(); ++k) acc.a[k] += c * prod.a[k];
      int p = alpha - 1;
      while (p >= 0 && ++digit[p] == letters.size()) digit[p--] = 0;
      if (p < 0) break;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace

Mat toy_hamiltonian(const ControlMatrix& cm, const ToyNoiseModel& model, std::size_t interval,
                    double t) {
  const int db = model.bath_dim();
  Mat B = Mat::Zero(db, db);
  for (const auto& c : model.components()) B += std::exp(cd(0, c.nu * t)) * c.op;
  Mat S = Mat::Zero(2, 2);
  for (PauliAxis v : kAllAxes) {
    const double y = cm.approx().y(interval, PauliAxis::z, v);
    if (y != 0.0) S += y * pauli_matrix(v);
  }
  return model.g * kron(S, B);
}

MagnusTerms magnus_terms(const ControlMatrix& cm_in, const ToyNoiseModel& model, double T,
                         int order, const MagnusOptions& options) {
  if (order < 1 || order > 3) throw std::invalid_argument("Magnus order must be 1, 2 or 3");
  if (!(model.g >= 0.0)) throw std::invalid_argument("coupling g must be nonnegative");
  active_axes(cm_in);
  const ControlMatrix cm = rescaled(cm_in, T);
  MagnusTerms out;
  out.order = order;
  out.T = T;
  out.convergence_warning = model.g * model.coupling_bound() * T >= 1.0;
  if (options.method == MagnusMethod::closed_form) {
    out.precise = closed_form_terms(cm, model, order, options.cache);
    for (const auto& m : out.precise) out.terms.push_back(m.to_double());
    return out;
  }
  if (options.initial_nodes < 2) throw std::invalid_argument("need at least 2 nodes per panel");
  std::vector<Mat> prev = quadrature_pass(cm, model, order, options.initial_nodes);
  for (int n = 2 * options.initial_nodes; n <= 512; n *= 2) {
    std::vector<Mat> next = quadrature_pass(cm, model, order, n);
    double diff = 0.0;
    for (int a = 0; a < order; ++a) diff = std::max(diff, (next[a] - prev[a]).cwiseAbs().maxCoeff());
    prev = std::move(next);
    if (diff <= options.tol) {
      out.terms = std::move(prev);
      return out;
    }
  }
  throw NumericError("Magnus quadrature did not reach the requested tolerance");
}

MagnusTerms rescale_coupling(const MagnusTerms& terms, double factor) {
  MagnusTerms out = terms;
  double f = 1.0;
  Real fr(1);
  for (std::size_t a = 0; a < out.terms.size(); ++a) {
    f *= factor;
    fr *= Real(factor);
    out.terms[a] *= f;
    if (a < out.precise.size()) {
      for (auto& e : out.precise[a].a) e *= fr;
    }
  }
  return out;
}

Mat system_projection(const Mat& x) {
  const Eigen::Index d = x.rows() / 2;
  Mat trace = x.block(0, 0, d, d) + x.block(d, d, d, d);
  Mat out = x;
  out.block(0, 0, d, d) -= 0.5 * trace;
  out.block(d, d, d, d) -= 0.5 * trace;
  return out;
}

namespace {

Mat projected_action(const MagnusTerms& terms) {
  if (terms.terms.empty()) throw std::invalid_argument("no Magnus terms");
  if (!terms.precise.empty()) {
    // project before rounding: the bath-only part can dwarf the system part
    const int n = terms.precise.front().n, d = n / 2;
    HpMatrix x(n);
    for (auto& e : x.a) e = Cplx<Real>(Real(0));
    for (const auto& t : terms.precise) {
      for (std::size_t k = 0; k < x.a.size(); ++k) x.a[k] += Cplx<Real>(Real(0), Real(1)) * t.a[k];
    }
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        Cplx<Real> half = (x(r, c) + x(r + d, c + d)) * Real(0.5);
        x(r, c) -= half;
        x(r + d, c + d) -= half;
      }
    }
    return x.to_double();
  }
  return system_projection(cd(0, 1) * terms.sum());
}

}  // namespace

double error_action_norm(const MagnusTerms& terms) {
  Mat p = projected_action(terms);
  const double scale = p.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(p / scale);
  return scale * svd.singularValues()(0);
}

double error_action_frobenius(const MagnusTerms& terms) { return projected_action(terms).norm(); }

PropagatorResult exact_propagator(const ControlMatrix& cm_in, const ToyNoiseModel& model, double T,
                                  double tol) {
  active_axes(cm_in);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const ControlMatrix cm = rescaled(cm_in, T);
  const auto& bp = cm.approx().breakpoints;
  const Eigen::Index d = 2 * model.bath_dim();
  // Dormand-Prince 5(4) tableau
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static const double A[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static const double b4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
  PropagatorResult res{Mat::Identity(d, d), 0, 0};
  const double hnorm = std::max(model.g * model.coupling_bound(), 1e-300);
  for (std::size_t iv = 0; iv + 1 < bp.size(); ++iv) {
    double t = bp[iv];
    const double end = bp[iv + 1];
    double h = std::min(end - t, 0.1 / hnorm);
    while (t < end) {
      h = std::min(h, end - t);
      if (h < 1e-15 * std::max(1.0, std::abs(t))) {
        throw NumericError("step size underflow at t = " + shortest_decimal(t));
      }
      Mat k[7];
      for (int s = 0; s < 7; ++s) {
        Mat y = res.U;
        for (int j = 0; j < s; ++j) y += (h * A[s][j]) * k[j];
        k[s] = cd(0, -1) * toy_hamiltonian(cm, model, iv, t + c[s] * h) * y;
      }
      Mat y5 = res.U, y4 = res.U;
      for (int s = 0; s < 7; ++s) {
        y5 += (h * b5[s]) * k[s];
        y4 += (h * b4[s]) * k[s];
      }
      const double err = (y5 - y4).cwiseAbs().maxCoeff();
      if (err <= tol) {
        res.U = y5;
        t += h;
        ++res.steps;
      } else {
        ++res.rejected;
      }
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 5.0);
      h *= fac;
    }
  }
  Eigen::JacobiSVD<Mat> svd(res.U, Eigen::ComputeFullU | Eigen::ComputeFullV);
  res.U = svd.matrixU() * svd.matrixV().adjoint();
  return res;
}

Mat magnus_propagator(const MagnusTerms& terms) { return terms.sum().exp(); }

}  // namespace filterforge
