#include "filterforge/gff.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <mutex>
#include <stdexcept>

namespace filterforge {

std::vector<int> Composition::prefix_sums() const {
  std::vector<int> s{0};
  for (int p : parts) s.push_back(s.back() + p);
  return s;
}

namespace {

std::vector<WeightedComposition> enumerate(int alpha) {
  std::vector<WeightedComposition> out;
  // each subset of the alpha-1 cut points gives one composition
  const unsigned cuts = static_cast<unsigned>(alpha - 1);
  for (unsigned mask = 0; mask < (1u << cuts); ++mask) {
    Composition c{alpha, {}};
    int run = 1;
    for (unsigned b = 0; b < cuts; ++b) {
      if (mask & (1u << b)) {
        c.parts.push_back(run);
        run = 1;
      } else {
        ++run;
      }
    }
    c.parts.push_back(run);
    const int j = static_cast<int>(c.parts.size());
    Rational coeff = j == 1 ? Rational(1) : Rational((j % 2 == 0) ? -1 : 1, j);
    out.push_back({std::move(c), std::move(coeff)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.composition.size() < b.composition.size();
  });
  return out;
}

Rational inverse_factorial(int j) {
  Rational f(1);
  for (int i = 2; i <= j; ++i) f *= i;
  return Rational(1) / f;
}

template <class S>
S rational_as(const Rational& q) {
  if constexpr (std::is_same_v<S, double>) {
    return to_double(q);
  } else {
    return to_real(q);
  }
}

template <class S>
std::vector<S> slice_of(std::span<const S> w, int b, int e) {
  return std::vector<S>(w.begin() + b, w.begin() + e);
}

// Sum over compositions of weight(c) * prod over slices of table entries.
MomentTable combine(const SliceTables& tables, const IndexTuple& idx, int degree_cap,
                    const std::string& tag, const std::function<Rational(const WeightedComposition&)>& weight) {
  const int alpha = idx.alpha();
  const MomentTable& whole = tables.at({0, alpha});
  if (whole.degree_cap() < degree_cap) throw std::invalid_argument("slice tables below degree cap");
  ScalarKind kind = ScalarKind::exact_rational;
  for (const auto& [key, t] : tables) {
    if (t.scalar_kind() != ScalarKind::exact_rational) kind = ScalarKind::high_precision_real;
  }
  MomentTable out(idx, whole.duration(), kind, tag);
  for (const auto& [k, unused] : whole.entries()) {
    if (total_degree(k) > degree_cap) continue;
    Scalar acc(Rational(0));
    for (const auto& wc : compositions(alpha)) {
      const auto s = wc.composition.prefix_sums();
      Scalar prod(weight(wc));
      for (std::size_t r = 0; r + 1 < s.size(); ++r) {
        MultiIndex sub(k.begin() + s[r], k.begin() + s[r + 1]);
        const Scalar* m = tables.at({s[r], s[r + 1]}).find(sub);
        if (!m) throw std::logic_error("missing slice moment");
        prod = prod * *m;
      }
      acc += prod;
    }
    out.insert(k, std::move(acc));
  }
  out.set_degree_cap(degree_cap);
  return out;
}

}  // namespace

const std::vector<WeightedComposition>& compositions(int alpha) {
  if (alpha < 1) throw std::invalid_argument("compositions need alpha >= 1");
  if (alpha > kMaxAlpha) throw UnsupportedError("alpha exceeds the configured cap of 7");
  static std::mutex mu;
  static std::array<std::vector<WeightedComposition>, kMaxAlpha + 1> cache;
  std::lock_guard lock(mu);
  if (cache[alpha].empty()) cache[alpha] = enumerate(alpha);
  return cache[alpha];
}

template <class S>
Cplx<S> gff_value(const ControlMatrix& cm, const IndexTuple& idx, std::span<const S> omega) {
  const int alpha = idx.alpha();
  if (static_cast<int>(omega.size()) != alpha) {
    throw std::invalid_argument("frequency tuple size must equal alpha");
  }
  std::map<std::pair<int, int>, Cplx<S>> cache;
  auto slice_value = [&](int b, int e) -> const Cplx<S>& {
    auto it = cache.find({b, e});
    if (it != cache.end()) return it->second;
    auto w = slice_of(omega, b, e);
    return cache.emplace(std::make_pair(b, e),
                         fff_value<S>(cm, idx.slice(b, e), std::span<const S>(w)))
        .first->second;
  };
  Cplx<S> acc(S(0));
  for (const auto& wc : compositions(alpha)) {
    const auto s = wc.composition.prefix_sums();
    Cplx<S> prod(rational_as<S>(wc.coefficient));
    for (std::size_t r = 0; r + 1 < s.size(); ++r) prod *= slice_value(s[r], s[r + 1]);
    acc += prod;
  }
  return Cplx<S>(S(0), S(1)) * acc;
}

template Cplx<double> gff_value<double>(const ControlMatrix&, const IndexTuple&,
                                        std::span<const double>);
template Cplx<Real> gff_value<Real>(const ControlMatrix&, const IndexTuple&,
                                    std::span<const Real>);

GffEvaluation gff_eval(const ControlMatrix& cm, const IndexTuple& idx,
                       std::span<const double> omega, unsigned precision) {
  check_precision(precision);
  check_index(cm, idx);
  GffEvaluation out{idx, std::vector<double>(omega.begin(), omega.end()), {}};
  if (precision <= 53) {
    out.value = gff_value<double>(cm, idx, omega).to_std();
  } else {
    std::vector<Real> w(omega.begin(), omega.end());
    out.value = gff_value<Real>(cm, idx, std::span<const Real>(w)).to_std();
  }
  return out;
}

SliceTables fff_slice_tables(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap) {
  SliceTables out;
  const int alpha = idx.alpha();
  for (int b = 0; b < alpha; ++b) {
    for (int e = b + 1; e <= alpha; ++e) {
      out.emplace(std::make_pair(b, e), fff_taylor(cm, idx.slice(b, e), degree_cap));
    }
  }
  return out;
}

MomentTable gff_from_fff(const SliceTables& fff, const IndexTuple& idx, int degree_cap) {
  return combine(fff, idx, degree_cap, "gff",
                 [](const WeightedComposition& wc) { return wc.coefficient; });
}

MomentTable gff_taylor(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap) {
  check_index(cm, idx);
  if (degree_cap < 0) throw std::invalid_argument("degree_cap must be nonnegative");
  return gff_from_fff(fff_slice_tables(cm, idx, degree_cap), idx, degree_cap);
}

std::complex<double> gff_taylor_value(const MomentTable& table, std::span<const double> omega) {
  return std::complex<double>(0.0, 1.0) * table.taylor_value(omega);
}

SliceTables gff_slice_tables(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap) {
  SliceTables fff = fff_slice_tables(cm, idx, degree_cap);
  SliceTables out;
  for (const auto& [key, table] : fff) {
    SliceTables sub;
    const int b = key.first, e = key.second;
    for (const auto& [k2, t2] : fff) {
      if (k2.first >= b && k2.second <= e) sub.emplace(std::make_pair(k2.first - b, k2.second - b), t2);
    }
    out.emplace(key, gff_from_fff(sub, idx.slice(b, e), degree_cap));
  }
  return out;
}

MomentTable dyson_from_magnus(const SliceTables& gff, const IndexTuple& idx, int degree_cap) {
  return combine(gff, idx, degree_cap, "fff", [](const WeightedComposition& wc) {
    return inverse_factorial(static_cast<int>(wc.composition.size()));
  });
}

double effective_first_order_ff(const ControlMatrix& cm, double omega) {
  if (cm.error_axes() != std::vector<PauliAxis>{PauliAxis::z}) {
    throw UnsupportedError("effective first-order FF needs the single error axis z");
  }
  double acc = 0.0;
  std::vector<double> w{omega};
  for (PauliAxis v : kAllAxes) {
    if (cm.identically_zero(PauliAxis::z, v)) continue;
    acc += std::norm(fff_eval(cm, IndexTuple({PauliAxis::z}, {v}), w).value);
  }
  return acc;
}

}  // namespace filterforge
