#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace filterforge {

enum class PauliAxis : int { x = 0, y = 1, z = 2 };

inline constexpr std::array<PauliAxis, 3> kAllAxes{PauliAxis::x, PauliAxis::y, PauliAxis::z};

char label(PauliAxis a);
PauliAxis parse_axis(char c);
/// Parses strings such as "zzx" into axes; throws std::invalid_argument.
std::vector<PauliAxis> parse_axes(const std::string& s);
std::string axes_label(std::span<const PauliAxis> axes);

inline int index(PauliAxis a) { return static_cast<int>(a); }

/// The Pauli matrix for an axis.
Eigen::Matrix2cd pauli_matrix(PauliAxis a);

/// A Pauli operator up to a phase i^phase: identity when axis is empty.
struct PauliString {
  std::optional<PauliAxis> axis;
  int phase = 0;  // exponent of i, modulo 4

  bool is_identity() const { return !axis.has_value(); }
  friend bool operator==(const PauliString&, const PauliString&) = default;
};

/// sigma_a sigma_b = delta_ab I + i eps_abc sigma_c, with exact phases.
PauliString multiply(const PauliString& lhs, PauliAxis rhs);

/// Ordered product sigma_{v_1} ... sigma_{v_n}.
PauliString pauli_product(std::span<const PauliAxis> axes);

}  // namespace filterforge
