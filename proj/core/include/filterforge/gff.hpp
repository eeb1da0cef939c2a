#pragma once

#include "filterforge/fff.hpp"

#include <complex>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace filterforge {

/// Largest order handled by composition-based assembly.
inline constexpr int kMaxAlpha = 7;

/// Ordered composition alpha = parts[0] + ... + parts[j-1].
struct Composition {
  int alpha = 0;
  std::vector<int> parts;

  /// s_0 = 0, s_k = parts[0] + ... + parts[k-1].
  std::vector<int> prefix_sums() const;
  std::size_t size() const { return parts.size(); }
};

struct WeightedComposition {
  Composition composition;
  Rational coefficient;
};

/// All compositions of alpha with the Magnus-from-Dyson weights: +1 for the
/// single part, -(-1)^j / j for j parts. Cached; alpha <= kMaxAlpha.
const std::vector<WeightedComposition>& compositions(int alpha);

struct GffEvaluation {
  IndexTuple index;
  std::vector<double> omega;
  std::complex<double> value;
};

/// G^(alpha) assembled from FFFs, with -iG = sum_c coeff_c prod_k F(slice_k).
template <class S>
Cplx<S> gff_value(const ControlMatrix& cm, const IndexTuple& idx, std::span<const S> omega);

GffEvaluation gff_eval(const ControlMatrix& cm, const IndexTuple& idx,
                       std::span<const double> omega, unsigned precision = 53);

/// Contiguous sub-tuples [begin, end) keyed by (begin, end).
using SliceTables = std::map<std::pair<int, int>, MomentTable>;

/// FFF moment tables for every contiguous slice of idx.
SliceTables fff_slice_tables(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap);

/// Moment-space coefficients N_k of G^(alpha) (tag "gff"):
///   -iG = (-i)^alpha sum_k prod_j (i w_j)^{k_j} / k_j! N_k.
/// Slices use disjoint variables, so every product is an outer product and
/// truncation at degree_cap is exact.
MomentTable gff_taylor(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap);

/// Same, from precomputed FFF slice tables.
MomentTable gff_from_fff(const SliceTables& fff, const IndexTuple& idx, int degree_cap);

/// G from a gff table: i times its Taylor sum.
std::complex<double> gff_taylor_value(const MomentTable& table, std::span<const double> omega);

/// Inverse assembly: Dyson (FFF) table of idx from Magnus (gff) slice tables,
/// M = sum_c (1/j!) prod_k N(slice_k).
MomentTable dyson_from_magnus(const SliceTables& gff, const IndexTuple& idx, int degree_cap);

/// Gff tables for every contiguous slice of idx.
SliceTables gff_slice_tables(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap);

/// sum_v |F^(1)_{zv}(w, T)|^2 for a matrix whose only error axis is z.
double effective_first_order_ff(const ControlMatrix& cm, double omega);

}  // namespace filterforge
