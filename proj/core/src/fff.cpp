#include "filterforge/fff.hpp"

#include "filterforge/simplex_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace filterforge {

IndexTuple::IndexTuple(std::vector<PauliAxis> u_axes, std::vector<PauliAxis> v_axes)
    : u(std::move(u_axes)), v(std::move(v_axes)) {
  if (u.size() != v.size()) throw std::invalid_argument("u and v must have equal length");
  if (u.empty()) throw std::invalid_argument("index tuple needs alpha >= 1");
}

IndexTuple IndexTuple::parse(const std::string& u_axes, const std::string& v_axes) {
  return IndexTuple(parse_axes(u_axes), parse_axes(v_axes));
}

IndexTuple IndexTuple::repeated(int alpha, PauliAxis u_axis, PauliAxis v_axis) {
  if (alpha < 1) throw std::invalid_argument("index tuple needs alpha >= 1");
  return IndexTuple(std::vector<PauliAxis>(alpha, u_axis), std::vector<PauliAxis>(alpha, v_axis));
}

std::string IndexTuple::label() const { return axes_label(u) + "/" + axes_label(v); }

IndexTuple IndexTuple::slice(int begin, int end) const {
  return IndexTuple(std::vector<PauliAxis>(u.begin() + begin, u.begin() + end),
                    std::vector<PauliAxis>(v.begin() + begin, v.begin() + end));
}

int total_degree(const MultiIndex& k) {
  int s = 0;
  for (int x : k) s += x;
  return s;
}

Real moment_bound(const Real& T, int alpha, int total) {
  Real f(1);
  for (int j = 2; j <= alpha; ++j) f *= j;
  return Real(pow(T, alpha + total) / f);
}

MomentTable::MomentTable(IndexTuple index, Real duration, ScalarKind kind, std::string tag)
    : index_(std::move(index)), duration_(std::move(duration)), kind_(kind), tag_(std::move(tag)) {}

const Scalar* MomentTable::find(const MultiIndex& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? nullptr : &it->second;
}

bool MomentTable::is_zero(const MultiIndex& k) const {
  const Scalar* s = find(k);
  if (!s) throw std::out_of_range("moment outside the computed degree cap");
  return s->is_zero(moment_bound(duration_, index_.alpha(), total_degree(k)));
}

bool MomentTable::level_vanishes(int total) const {
  for (const auto& [k, val] : entries_) {
    if (total_degree(k) != total) continue;
    if (!val.is_zero(moment_bound(duration_, index_.alpha(), total))) return false;
  }
  return true;
}

std::optional<int> MomentTable::leading_degree() const {
  for (int d = 0; d <= degree_cap_; ++d) {
    if (!level_vanishes(d)) return d;
  }
  return std::nullopt;
}

void MomentTable::insert(MultiIndex k, Scalar value) {
  if (static_cast<int>(k.size()) != index_.alpha()) throw std::invalid_argument("multi-index size");
  entries_[std::move(k)] = std::move(value);
}

std::complex<double> MomentTable::taylor_value(std::span<const double> omega) const {
  if (static_cast<int>(omega.size()) != index_.alpha()) {
    throw std::invalid_argument("frequency tuple size must equal alpha");
  }
  std::complex<double> acc = 0.0;
  for (const auto& [k, val] : entries_) {
    std::complex<double> term = val.to_double();
    for (std::size_t j = 0; j < k.size(); ++j) {
      std::complex<double> iw(0.0, omega[j]);
      double fact = std::tgamma(k[j] + 1.0);
      term *= std::pow(iw, k[j]) / fact;
    }
    acc += term;
  }
  return std::pow(std::complex<double>(0.0, -1.0), index_.alpha()) * acc;
}

nlohmann::json MomentTable::to_json() const {
  nlohmann::json j;
  j["kind"] = tag_;
  j["alpha"] = index_.alpha();
  j["u"] = axes_label(index_.u);
  j["v"] = axes_label(index_.v);
  j["T"] = to_double(duration_);
  j["degree_cap"] = degree_cap_;
  j["scalar_kind"] = to_string(kind_);
  auto entries = nlohmann::json::array();
  for (const auto& [k, val] : entries_) {
    nlohmann::json e;
    e["k"] = k;
    e["re"] = val.to_double();
    if (val.is_exact()) e["exact"] = val.str();
    entries.push_back(std::move(e));
  }
  j["entries"] = std::move(entries);
  return j;
}

void check_index(const ControlMatrix& cm, const IndexTuple& idx) {
  if (idx.alpha() < 1) throw std::invalid_argument("index tuple needs alpha >= 1");
  for (PauliAxis a : idx.u) {
    if (!cm.has_error_axis(a)) {
      throw UnsupportedError(std::string("error axis ") + label(a) +
                             " is not among the control matrix's error axes");
    }
  }
}

namespace {

// ---- moments: piecewise polynomials in the global time variable ----

template <class S>
using Poly = std::vector<S>;

template <class S>
S horner(const Poly<S>& p, const S& t) {
  S acc(0);
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * t + *it;
  return acc;
}

template <class S>
struct Piecewise {
  std::vector<Poly<S>> pieces;  // P restricted to each interval
  S total;                      // P(T)
};

// P_new(t) = int_0^t y(s) s^k P_inner(s) ds, P_inner == 1 when inner is null.
template <class S>
Piecewise<S> antiderivative_pass(const PiecewiseControl<S>& pc, PauliAxis u, PauliAxis v, int k,
                                 const Piecewise<S>* inner) {
  const std::size_t m = pc.intervals();
  Piecewise<S> out;
  out.pieces.resize(m);
  S carry(0);
  for (std::size_t i = 0; i < m; ++i) {
    const S& c = pc.y(i, u, v);
    if (c == 0) {
      out.pieces[i] = Poly<S>{carry};
      continue;
    }
    const Poly<S> one{S(1)};
    const Poly<S>& q = inner ? inner->pieces[i] : one;
    Poly<S> r(q.size() + k + 1, S(0));
    for (std::size_t j = 0; j < q.size(); ++j) {
      const std::size_t pw = j + k + 1;
      r[pw] = c * q[j] / S(static_cast<long>(pw));
    }
    const S ra = horner(r, pc.breakpoints[i]);
    const S rb = horner(r, pc.breakpoints[i + 1]);
    r[0] += carry - ra;
    carry += rb - ra;
    out.pieces[i] = std::move(r);
  }
  out.total = carry;
  return out;
}

template <class S>
void moment_dfs(const PiecewiseControl<S>& pc, const IndexTuple& idx, int level,
                const Piecewise<S>* inner, int remaining, bool exact_total, MultiIndex& k,
                std::vector<std::pair<MultiIndex, Scalar>>& out) {
  const int lo = (level == 0 && exact_total) ? remaining : 0;
  for (int kj = lo; kj <= remaining; ++kj) {
    k[level] = kj;
    Piecewise<S> p = antiderivative_pass(pc, idx.u[level], idx.v[level], kj, inner);
    if (level == 0) {
      out.emplace_back(k, Scalar(p.total));
    } else {
      moment_dfs(pc, idx, level - 1, &p, remaining - kj, exact_total, k, out);
    }
  }
}

template <class S>
std::vector<std::pair<MultiIndex, Scalar>> moments_upto(const PiecewiseControl<S>& pc,
                                                        const IndexTuple& idx, int total,
                                                        bool exact_total) {
  std::vector<std::pair<MultiIndex, Scalar>> out;
  MultiIndex k(idx.alpha(), 0);
  moment_dfs<S>(pc, idx, idx.alpha() - 1, nullptr, total, exact_total, k, out);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<std::pair<MultiIndex, Scalar>> dispatch_moments(const ControlMatrix& cm,
                                                            const IndexTuple& idx, int total,
                                                            bool exact_total) {
  check_index(cm, idx);
  if (total < 0) throw std::invalid_argument("degree must be nonnegative");
  if (cm.is_exact()) return moments_upto(cm.exact(), idx, total, exact_total);
  return moments_upto(cm.real(), idx, total, exact_total);
}

// ---- closed-form evaluation ----

template <class S>
S working_epsilon() {
  return std::numeric_limits<S>::epsilon();
}

template <class S>
S to_scalar(double d) {
  return S(d);
}

template <class S>
using CMat = std::vector<Cplx<S>>;  // row-major, upper triangular

template <class S>
CMat<S> upper_mul(const CMat<S>& a, const CMat<S>& b, int n) {
  CMat<S> c(n * n, Cplx<S>(S(0)));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Cplx<S> acc(S(0));
      for (int l = i; l <= j; ++l) acc += a[i * n + l] * b[l * n + j];
      c[i * n + j] = acc;
    }
  }
  return c;
}

template <class S>
double max_abs(const CMat<S>& a) {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, to_double(z.abs()));
  return m;
}

// exp(G) for upper-triangular G by Taylor series with scaling and squaring.
// Products of upper-triangular matrices only mix entries on the same path
// (i -> j), so every entry keeps its own relative accuracy.
template <class S>
CMat<S> upper_expm(CMat<S> g, int n) {
  double norm = 0.0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = i; j < n; ++j) row += to_double(g[i * n + j].abs());
    norm = std::max(norm, row);
  }
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  if (squarings > 0) {
    const S scale = S(std::ldexp(1.0, -squarings));
    for (auto& z : g) z *= scale;
    norm *= std::ldexp(1.0, -squarings);
  }
  const double eps = to_double(working_epsilon<S>());
  CMat<S> result(n * n, Cplx<S>(S(0)));
  for (int i = 0; i < n; ++i) result[i * n + i] = Cplx<S>(S(1));
  CMat<S> term = result;
  // tail after the nilpotent depth n-1 shrinks like norm^q / q!
  double tail = 1.0;
  for (int p = 1;; ++p) {
    term = upper_mul(term, g, n);
    const S inv = S(1) / S(p);
    for (auto& z : term) z *= inv;
    for (int i = 0; i < n * n; ++i) result[i] += term[i];
    if (p >= n) {
      tail *= norm / (p - n + 1);
      if (tail < eps || max_abs(term) == 0.0) break;
    }
    if (p > 4000) throw NumericError("matrix exponential series failed to converge");
  }
  for (int s = 0; s < squarings; ++s) result = upper_mul(result, result, n);
  return result;
}

template <class S>
Cplx<S> fff_value_alpha1(const PiecewiseControl<S>& pc, const IndexTuple& idx, const S& w) {
  Cplx<S> acc(S(0));
  for (std::size_t i = 0; i < pc.intervals(); ++i) {
    const S& c = pc.y(i, idx.u[0], idx.v[0]);
    if (c == 0) continue;
    const S& a = pc.breakpoints[i];
    const S h = pc.breakpoints[i + 1] - a;
    Cplx<S> term = expi(S(w * a)) * kernel_epsilon(0, Cplx<S>(S(0), S(w * h)));
    acc += term * S(c * h);
  }
  return Cplx<S>(S(0), S(-1)) * acc;
}

template <class S>
const PiecewiseControl<S>& working_control(const ControlMatrix& cm);

template <>
const PiecewiseControl<double>& working_control<double>(const ControlMatrix& cm) {
  return cm.approx();
}

template <>
const PiecewiseControl<Real>& working_control<Real>(const ControlMatrix& cm) {
  return cm.real();
}

}  // namespace

template <class S>
Cplx<S> kernel_epsilon(int m, const Cplx<S>& z) {
  if (m < 0) throw std::invalid_argument("kernel order must be nonnegative");
  using std::exp;
  const S mag = z.abs();
  const S eps = working_epsilon<S>();
  if (mag < S(1) || S(m) >= mag) {
    // sum_p z^p / (p! (m + p + 1))
    Cplx<S> sum(S(0));
    Cplx<S> power(S(1));
    for (int p = 0;; ++p) {
      Cplx<S> term = power / S(m + p + 1);
      sum += term;
      if (p > 0 && term.abs() < eps * sum.abs()) break;
      if (p > 100000) throw NumericError("kernel series failed to converge");
      power = power * z / S(p + 1);
    }
    return sum;
  }
  const Cplx<S> ez = Cplx<S>(exp(z.re)) * expi(z.im);
  Cplx<S> e = (ez - Cplx<S>(S(1))) / z;
  for (int j = 1; j <= m; ++j) e = (ez - e * S(j)) / z;
  return e;
}

template Cplx<double> kernel_epsilon<double>(int, const Cplx<double>&);
template Cplx<Real> kernel_epsilon<Real>(int, const Cplx<Real>&);

template <class S>
Cplx<S> fff_value(const ControlMatrix& cm, const IndexTuple& idx, std::span<const S> omega) {
  check_index(cm, idx);
  const int alpha = idx.alpha();
  if (static_cast<int>(omega.size()) != alpha) {
    throw std::invalid_argument("frequency tuple size must equal alpha");
  }
  const PiecewiseControl<S>& pc = working_control<S>(cm);
  if (alpha == 1) return fff_value_alpha1(pc, idx, omega[0]);

  // State X = D(t) Y with D = diag(e^{i theta_j t}), theta_j = sum_{l >= j} omega_l,
  // so that Y is propagated by exp((A_i - i Theta) h_i) on every interval.
  const int n = alpha + 1;
  std::vector<S> theta(n, S(0));
  for (int j = alpha - 1; j >= 0; --j) theta[j] = theta[j + 1] + omega[j];

  std::vector<Cplx<S>> w(n, Cplx<S>(S(0)));
  w[alpha] = Cplx<S>(S(1));
  for (std::size_t i = 0; i < pc.intervals(); ++i) {
    const S h = pc.breakpoints[i + 1] - pc.breakpoints[i];
    CMat<S> g(n * n, Cplx<S>(S(0)));
    for (int j = 0; j < n; ++j) g[j * n + j] = Cplx<S>(S(0), S(-theta[j] * h));
    for (int j = 0; j < alpha; ++j) g[j * n + j + 1] = Cplx<S>(S(pc.y(i, idx.u[j], idx.v[j]) * h));
    CMat<S> e = upper_expm(std::move(g), n);
    std::vector<Cplx<S>> next(n, Cplx<S>(S(0)));
    for (int r = 0; r < n; ++r) {
      for (int c = r; c < n; ++c) next[r] += e[r * n + c] * w[c];
    }
    w = std::move(next);
  }
  const S& T = pc.duration();
  return ipow<S>(-alpha) * expi(S(theta[0] * T)) * w[0];
}

template Cplx<double> fff_value<double>(const ControlMatrix&, const IndexTuple&,
                                        std::span<const double>);
template Cplx<Real> fff_value<Real>(const ControlMatrix&, const IndexTuple&,
                                    std::span<const Real>);

Scalar moment(const ControlMatrix& cm, const IndexTuple& idx, const MultiIndex& k) {
  check_index(cm, idx);
  if (static_cast<int>(k.size()) != idx.alpha()) throw std::invalid_argument("multi-index size");
  for (int x : k) {
    if (x < 0) throw std::invalid_argument("multi-index entries must be nonnegative");
  }
  auto single = [&](const auto& pc) {
    using S = std::decay_t<decltype(pc.breakpoints[0])>;
    std::optional<Piecewise<S>> cur;
    for (int j = idx.alpha() - 1; j >= 0; --j) {
      Piecewise<S> next = antiderivative_pass(pc, idx.u[j], idx.v[j], k[j], cur ? &*cur : nullptr);
      cur = std::move(next);
    }
    return Scalar(cur->total);
  };
  if (cm.is_exact()) return single(cm.exact());
  return single(cm.real());
}

std::vector<std::pair<MultiIndex, Scalar>> moment_level(const ControlMatrix& cm,
                                                        const IndexTuple& idx, int total) {
  return dispatch_moments(cm, idx, total, true);
}

MomentTable fff_taylor(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap) {
  if (degree_cap < 0) throw std::invalid_argument("degree_cap must be nonnegative");
  MomentTable table(idx, cm.real().duration(), cm.kind());
  for (auto& [k, val] : dispatch_moments(cm, idx, degree_cap, false)) {
    table.insert(std::move(k), std::move(val));
  }
  table.set_degree_cap(degree_cap);
  return table;
}

void extend_table(MomentTable& table, const ControlMatrix& cm, int new_cap) {
  for (int d = table.degree_cap() + 1; d <= new_cap; ++d) {
    for (auto& [k, val] : moment_level(cm, table.index(), d)) {
      table.insert(std::move(k), std::move(val));
    }
    table.set_degree_cap(d);
  }
}

FilterEvaluation fff_eval(const ControlMatrix& cm, const IndexTuple& idx,
                          std::span<const double> omega, unsigned precision) {
  check_precision(precision);
  for (double w : omega) {
    if (!std::isfinite(w)) throw std::invalid_argument("frequencies must be finite");
  }
  FilterEvaluation out{idx, std::vector<double>(omega.begin(), omega.end()), {}};
  if (precision <= 53) {
    out.value = fff_value<double>(cm, idx, omega).to_std();
  } else {
    std::vector<Real> w(omega.begin(), omega.end());
    out.value = fff_value<Real>(cm, idx, std::span<const Real>(w)).to_std();
  }
  return out;
}

FilterEvaluation fff_eval_quadrature(const ControlMatrix& cm, const IndexTuple& idx,
                                     std::span<const double> omega, int n_nodes) {
  check_index(cm, idx);
  const int alpha = idx.alpha();
  if (alpha > 4) throw UnsupportedError("quadrature oracle is limited to alpha <= 4");
  if (n_nodes < 2) throw std::invalid_argument("quadrature needs at least 2 nodes");
  if (static_cast<int>(omega.size()) != alpha) {
    throw std::invalid_argument("frequency tuple size must equal alpha");
  }
  std::vector<LevelFunction> levels;
  for (int j = 0; j < alpha; ++j) {
    const PauliAxis u = idx.u[j], v = idx.v[j];
    const double w = omega[j];
    levels.emplace_back([&cm, u, v, w](double t) {
      return cm.y_at(t, u, v) * std::complex<double>(std::cos(w * t), std::sin(w * t));
    });
  }
  const auto& bp = cm.approx().breakpoints;
  std::complex<double> val = ordered_simplex_quadrature(levels, bp, n_nodes);
  return {idx, std::vector<double>(omega.begin(), omega.end()),
          std::pow(std::complex<double>(0.0, -1.0), alpha) * val};
}

}  // namespace filterforge
