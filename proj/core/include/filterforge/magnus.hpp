#pragma once

#include "filterforge/control_matrix.hpp"
#include "filterforge/numeric.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace filterforge {

enum class ToyKind { quantum_single_tone, classical_cos, classical_sin, quasi_static };

const char* to_string(ToyKind kind);
ToyKind parse_toy_kind(const std::string& s);

/// One bath term e^{i nu t} P of the coupling operator B(t) = sum_j e^{i nu_j t} P_j.
struct BathComponent {
  double nu = 0.0;
  Eigen::MatrixXcd op;
};

/// H(t) = g sum_v y_zv(t) sigma_v (x) B(t).
///   quantum_single_tone: B = cos(wt) Z + sin(wt) Y + bias X  (qubit bath)
///   classical_cos / classical_sin: B = cos(wt) or sin(wt), plus bias  (scalar bath)
///   quasi_static: B = Z  (qubit bath, omega ignored)
struct ToyNoiseModel {
  ToyKind kind = ToyKind::quantum_single_tone;
  double g = 1.0;
  double omega = 0.0;
  double bias = 0.0;

  int bath_dim() const;
  std::vector<BathComponent> components() const;
  /// max_t ||B(t)||, so that ||H(t)|| <= g * bound.
  double coupling_bound() const;
};

/// Small dense complex matrix in 256-bit arithmetic, row-major.
struct HpMatrix {
  int n = 0;
  std::vector<Cplx<Real>> a;

  HpMatrix() = default;
  explicit HpMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim) {}
  Cplx<Real>& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
  const Cplx<Real>& operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
  Eigen::MatrixXcd to_double() const;
};

struct MagnusTerms {
  int order = 0;
  double T = 0.0;
  std::vector<Eigen::MatrixXcd> terms;  // Omega_1 .. Omega_order
  std::vector<HpMatrix> precise;        // same terms at 256 bits (closed-form route only)
  bool convergence_warning = false;     // max ||H|| T >= 1

  int dim() const { return terms.empty() ? 0 : static_cast<int>(terms.front().rows()); }
  Eigen::MatrixXcd sum() const;
};

enum class MagnusMethod { quadrature, closed_form };

/// G values keyed by (v axes, frequencies), reusable across models that share
/// a control matrix and tone frequency. Not thread safe.
struct GffCache {
  std::map<std::pair<std::vector<int>, std::vector<double>>, Cplx<Real>> values;
};

struct MagnusOptions {
  MagnusMethod method = MagnusMethod::quadrature;
  double tol = 1e-10;  // absolute, per matrix entry (quadrature route)
  int initial_nodes = 16;
  GffCache* cache = nullptr;  // closed-form route only
};

/// Magnus terms Omega_1..Omega_order (order <= 3) of the toggling-frame
/// Hamiltonian over [0, T]. cm is rescaled to duration T.
///
/// The quadrature route integrates nested commutators with Gauss-Legendre
/// panels aligned to the pulse times and doubles the node count until two
/// passes agree to tol. The closed-form route writes each term as
/// sum over (v, j) of g^alpha (-i G_{z..z,v}(nu_j)) prod_p sigma_{v_p} (x) P_{j_p},
/// with G evaluated at 256 bits; it is exact up to rounding and is what the
/// small-T and low-frequency scans use.
MagnusTerms magnus_terms(const ControlMatrix& cm, const ToyNoiseModel& model, double T, int order,
                         const MagnusOptions& options = {});

/// Terms for coupling factor * g: Omega_alpha scales as factor^alpha.
MagnusTerms rescale_coupling(const MagnusTerms& terms, double factor);

/// Spectral norm of i sum Omega projected onto operators with a nonidentity
/// system factor: X - I (x) Tr_S(X) / 2.
double error_action_norm(const MagnusTerms& terms);
double error_action_frobenius(const MagnusTerms& terms);

/// Removes the identity-system part of a (2 d) x (2 d) matrix on S (x) B.
Eigen::MatrixXcd system_projection(const Eigen::MatrixXcd& x);

/// H(t) on one control interval, at the given time.
Eigen::MatrixXcd toy_hamiltonian(const ControlMatrix& cm, const ToyNoiseModel& model,
                                 std::size_t interval, double t);

struct PropagatorResult {
  Eigen::MatrixXcd U;
  int steps = 0;
  int rejected = 0;
};

/// Toggling-frame propagator from i U' = H U, adaptive Dormand-Prince 5(4)
/// per control interval, then projected onto the nearest unitary.
PropagatorResult exact_propagator(const ControlMatrix& cm, const ToyNoiseModel& model, double T,
                                  double tol = 1e-12);

/// exp(sum Omega) through Eigen's matrix exponential.
Eigen::MatrixXcd magnus_propagator(const MagnusTerms& terms);

}  // namespace filterforge
