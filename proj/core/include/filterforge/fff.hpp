#pragma once

#include "filterforge/control_matrix.hpp"
#include "filterforge/numeric.hpp"
#include "filterforge/pauli.hpp"

#include <complex>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace filterforge {

/// (u_1..u_alpha, v_1..v_alpha) selecting prod_j y_{u_j v_j}(t_j).
struct IndexTuple {
  std::vector<PauliAxis> u;
  std::vector<PauliAxis> v;

  IndexTuple() = default;
  IndexTuple(std::vector<PauliAxis> u_axes, std::vector<PauliAxis> v_axes);
  /// Parses axis strings such as ("zz", "zx").
  static IndexTuple parse(const std::string& u_axes, const std::string& v_axes);
  /// alpha copies of (u, v).
  static IndexTuple repeated(int alpha, PauliAxis u, PauliAxis v);

  int alpha() const { return static_cast<int>(u.size()); }
  std::string label() const;
  /// Entries [begin, end) of both axis lists.
  IndexTuple slice(int begin, int end) const;

  friend auto operator<=>(const IndexTuple&, const IndexTuple&) = default;
};

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& k);

/// T^(alpha+|k|) / alpha!, the a priori bound on |M_k|.
Real moment_bound(const Real& T, int alpha, int total);

/// Sparse table of ordered-simplex moments
///   M_k = int_{0<=t_alpha<=...<=t_1<=T} prod_j y_{u_j v_j}(t_j) t_j^{k_j} dt.
class MomentTable {
 public:
  MomentTable(IndexTuple index, Real duration, ScalarKind kind, std::string tag = "fff");

  const IndexTuple& index() const { return index_; }
  const Real& duration() const { return duration_; }
  ScalarKind scalar_kind() const { return kind_; }
  int degree_cap() const { return degree_cap_; }
  const std::string& tag() const { return tag_; }
  const std::map<MultiIndex, Scalar>& entries() const { return entries_; }

  /// Entry for k, or nullptr when |k| exceeds the cap.
  const Scalar* find(const MultiIndex& k) const;
  /// Zero test: exact for rationals, relative to moment_bound for reals.
  bool is_zero(const MultiIndex& k) const;
  bool level_vanishes(int total) const;
  /// Smallest total degree with a nonzero entry, if any within the cap.
  std::optional<int> leading_degree() const;

  void insert(MultiIndex k, Scalar value);
  void set_degree_cap(int cap) { degree_cap_ = cap; }

  /// Taylor sum (-i)^alpha sum_k prod_j (i w_j)^{k_j}/k_j! M_k in double precision.
  std::complex<double> taylor_value(std::span<const double> omega) const;

  nlohmann::json to_json() const;

 private:
  IndexTuple index_;
  Real duration_;
  ScalarKind kind_;
  std::string tag_;
  int degree_cap_ = -1;
  std::map<MultiIndex, Scalar> entries_;
};

/// Throws UnsupportedError when idx uses an error axis the matrix does not carry.
void check_index(const ControlMatrix& cm, const IndexTuple& idx);

/// A single moment by nested piecewise-polynomial antiderivatives.
Scalar moment(const ControlMatrix& cm, const IndexTuple& idx, const MultiIndex& k);

/// All moments with |k| == total, in lexicographic order.
std::vector<std::pair<MultiIndex, Scalar>> moment_level(const ControlMatrix& cm,
                                                        const IndexTuple& idx, int total);

/// Moments with |k| <= degree_cap.
MomentTable fff_taylor(const ControlMatrix& cm, const IndexTuple& idx, int degree_cap);

/// Adds levels table.degree_cap()+1 .. new_cap. Not thread-safe for a shared table.
void extend_table(MomentTable& table, const ControlMatrix& cm, int new_cap);

struct FilterEvaluation {
  IndexTuple index;
  std::vector<double> omega;
  std::complex<double> value;
};

/// eps_m(z) = int_0^1 s^m e^{zs} ds. Power series for |z| < 1 (or m >= |z|),
/// upward recurrence eps_m = (e^z - m eps_{m-1}) / z otherwise.
template <class S>
Cplx<S> kernel_epsilon(int m, const Cplx<S>& z);

/// F^(alpha)(omega) at working scalar S (double or Real).
template <class S>
Cplx<S> fff_value(const ControlMatrix& cm, const IndexTuple& idx, std::span<const S> omega);

/// Closed-form evaluation. precision <= 53 runs in double, up to 256 in Real.
FilterEvaluation fff_eval(const ControlMatrix& cm, const IndexTuple& idx,
                          std::span<const double> omega, unsigned precision = 53);

/// Brute-force nested Gauss-Legendre oracle; alpha <= 4.
FilterEvaluation fff_eval_quadrature(const ControlMatrix& cm, const IndexTuple& idx,
                                     std::span<const double> omega, int n_nodes);

}  // namespace filterforge
