#include "filterforge/sequence_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace filterforge {

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(line > 0 ? what + " at line " + std::to_string(line) + ", column " +
                                        std::to_string(column)
                                  : what),
      detail_(what),
      line_(line),
      column_(column) {}

std::pair<int, int> line_column(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1, column = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

namespace {

double number_field(const nlohmann::json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ParseError(where + ": missing \"" + key + "\"");
  const auto& v = obj[key];
  if (!v.is_number()) throw ParseError(where + ": \"" + key + "\" must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(where + ": \"" + key + "\" must be finite");
  return d;
}

}  // namespace

PulseSequence parse_sequence_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // byte is the 1-based position of the offending character
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError("malformed JSON (" + msg + ")", line, col);
  }
  if (!j.is_object()) throw ParseError("sequence JSON must be an object");
  const double T = number_field(j, "duration", "sequence");
  if (!(T > 0)) throw ParseError("sequence: \"duration\" must be positive");
  std::string label;
  if (j.contains("label")) {
    if (!j["label"].is_string()) throw ParseError("sequence: \"label\" must be a string");
    label = j["label"];
  }
  std::vector<Pulse> pulses;
  if (j.contains("pulses")) {
    if (!j["pulses"].is_array()) throw ParseError("sequence: \"pulses\" must be an array");
    int i = 0;
    for (const auto& pj : j["pulses"]) {
      const std::string where = "pulse " + std::to_string(i++);
      if (!pj.is_object()) throw ParseError(where + ": must be an object");
      Pulse p;
      p.time = Instant(rational_from_shortest_decimal(number_field(pj, "t", where)));
      p.angle = number_field(pj, "angle", where);
      if (!pj.contains("axis") || !pj["axis"].is_string() || pj["axis"].get<std::string>().size() != 1) {
        throw ParseError(where + ": \"axis\" must be \"x\", \"y\" or \"z\"");
      }
      try {
        p.axis = parse_axis(pj["axis"].get<std::string>()[0]);
      } catch (const std::exception&) {
        throw ParseError(where + ": \"axis\" must be \"x\", \"y\" or \"z\"");
      }
      pulses.push_back(std::move(p));
    }
  }
  const Rational duration = rational_from_shortest_decimal(T);
  std::optional<PulseSequence> seq;
  try {
    seq.emplace(Instant(duration), pulses, label);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("sequence: ") + e.what());
  }
  if (auto n = match_udd(*seq)) {
    const PulseSequence udd = udd_sequence(*n, duration);
    for (int i = 0; i < *n; ++i) pulses[i].time = udd.pulses()[i].time;
    seq.emplace(Instant(duration), std::move(pulses), label);
  }
  return std::move(*seq);
}

PulseSequence read_sequence_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_sequence_json(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.detail(), e.line(), e.column());
  }
}

std::string sequence_to_json(const PulseSequence& seq) {
  std::ostringstream out;
  out << "{\n  \"duration\": " << shortest_decimal(seq.duration().to_double()) << ",\n  \"pulses\": [";
  const auto& ps = seq.pulses();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    out << (i ? ",\n" : "\n") << "    {\"t\": " << shortest_decimal(ps[i].time.to_double())
        << ", \"axis\": \"" << label(ps[i].axis) << "\", \"angle\": " << shortest_decimal(ps[i].angle)
        << "}";
  }
  out << (ps.empty() ? "]" : "\n  ]") << ",\n  \"label\": " << nlohmann::json(seq.label()).dump() << "\n}\n";
  return out.str();
}

}  // namespace filterforge
