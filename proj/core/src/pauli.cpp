#include "filterforge/pauli.hpp"

#include <stdexcept>
#include <vector>

namespace filterforge {

char label(PauliAxis a) { return "xyz"[index(a)]; }

PauliAxis parse_axis(char c) {
  switch (c) {
    case 'x': case 'X': return PauliAxis::x;
    case 'y': case 'Y': return PauliAxis::y;
    case 'z': case 'Z': return PauliAxis::z;
    default: throw std::invalid_argument(std::string("unknown Pauli axis '") + c + "'");
  }
}

std::vector<PauliAxis> parse_axes(const std::string& s) {
  std::vector<PauliAxis> out;
  for (char c : s) {
    if (c == ',' || c == ' ') continue;
    out.push_back(parse_axis(c));
  }
  return out;
}

std::string axes_label(std::span<const PauliAxis> axes) {
  std::string s;
  for (auto a : axes) s.push_back(label(a));
  return s;
}

Eigen::Matrix2cd pauli_matrix(PauliAxis a) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  switch (a) {
    case PauliAxis::x: m << 0, 1, 1, 0; break;
    case PauliAxis::y: m << 0, C(0, -1), C(0, 1), 0; break;
    case PauliAxis::z: m << 1, 0, 0, -1; break;
  }
  return m;
}

PauliString multiply(const PauliString& lhs, PauliAxis rhs) {
  if (!lhs.axis) return {rhs, lhs.phase};
  int a = index(*lhs.axis);
  int b = index(rhs);
  if (a == b) return {std::nullopt, lhs.phase};
  int c = 3 - a - b;
  // cyclic (x,y),(y,z),(z,x) -> +i, anticyclic -> -i
  bool cyclic = (b - a + 3) % 3 == 1;
  int phase = (lhs.phase + (cyclic ? 1 : 3)) % 4;
  return {static_cast<PauliAxis>(c), phase};
}

PauliString pauli_product(std::span<const PauliAxis> axes) {
  PauliString p;
  for (auto a : axes) p = multiply(p, a);
  return p;
}

}  // namespace filterforge
