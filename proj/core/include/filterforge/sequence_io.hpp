#pragma once

#include "filterforge/sequence.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace filterforge {

/// Malformed input. line and column are 1-based; 0 when the problem is not
/// tied to a position (missing field, bad value).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }
  /// Message without the position suffix.
  const std::string& detail() const { return detail_; }

 private:
  std::string detail_;
  int line_;
  int column_;
};

/// Parses {"duration": T, "pulses": [{"t", "axis", "angle"}], "label"}.
/// Numbers become the rational value of their shortest decimal form. A pulse
/// list matching UDD_n to 1e-12 T gets the high-precision UDD times.
PulseSequence parse_sequence_json(std::string_view text);
PulseSequence read_sequence_file(const std::filesystem::path& path);

/// Canonical form: keys in the order duration, pulses, label; shortest
/// round-trip decimals; one pulse per line.
std::string sequence_to_json(const PulseSequence& seq);

/// 1-based (line, column) of a byte offset.
std::pair<int, int> line_column(std::string_view text, std::size_t offset);

}  // namespace filterforge
