#include "cli.hpp"

#include "filterforge/figure1.hpp"
#include "filterforge/orders.hpp"
#include "filterforge/parallel.hpp"
#include "filterforge/sequence_io.hpp"
#include "filterforge/spectra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace filterforge::cli {

namespace {

constexpr int kAlphaCap = 7;

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

// log:lo:hi:n | lin:lo:hi:n | a,b,c
std::vector<double> parse_grid(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return parse_number_list(spec);
  const std::string kind = spec.substr(0, colon);
  std::vector<std::string> parts;
  std::stringstream ss(spec.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if ((kind != "log" && kind != "lin") || parts.size() != 3) {
    throw std::invalid_argument("grid must be log:lo:hi:n, lin:lo:hi:n or a comma list, got '" + spec + "'");
  }
  const double lo = parse_number_list(parts[0]).at(0);
  const double hi = parse_number_list(parts[1]).at(0);
  const double nd = parse_number_list(parts[2]).at(0);
  if (nd < 1 || nd != std::floor(nd) || nd > 1e7) throw std::invalid_argument("grid size must be a positive integer");
  const int n = static_cast<int>(nd);
  if (kind == "log") return log_grid(lo, hi, n);
  if (!(hi >= lo)) throw std::invalid_argument("bad linear grid");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(path + ": malformed JSON", line, col);
  }
}

NoiseSpectrum read_spectrum_file(const std::string& path) {
  const auto j = read_json_file(path);
  try {
    return NoiseSpectrum::from_json(j);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

// Writes to --out when given, otherwise to out.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw std::invalid_argument("cannot write " + path);
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string sequence_name(const PulseSequence& seq, const std::string& path) {
  if (!seq.label().empty()) return seq.label();
  return std::filesystem::path(path).stem().string();
}

struct Options {
  std::string sequence;
  std::string spectrum;
  std::string axes = "z";
  int alpha_max = 7;
  int degree_cap = 12;
  unsigned precision = 0;
  std::string grid;
  std::string out;
  std::string format;
  std::string u = "z", v = "z";
  std::string g_list;
  std::string method = "closed-form";
  std::vector<double> durations;
  double T = 1.0;
  std::string family;
  int n = 1;
};

int cmd_orders(const Options& o, std::ostream& out) {
  check_precision(o.precision ? o.precision : kDefaultOrderPrecision);
  if (o.alpha_max < 1 || o.degree_cap < 0) throw std::invalid_argument("caps must be positive");
  if (o.alpha_max > kAlphaCap) {
    throw UnsupportedError("alpha_max " + std::to_string(o.alpha_max) + " exceeds the cap of " +
                           std::to_string(kAlphaCap));
  }
  const PulseSequence seq = read_sequence_file(o.sequence);
  const ControlMatrix cm(seq, parse_axes(o.axes));
  OrderCaps caps;
  caps.alpha_max = o.alpha_max;
  caps.degree_cap = o.degree_cap;
  auto report = analyze_orders(cm, caps).to_json();
  report["protocol"] = sequence_name(seq, o.sequence);
  Sink sink(o.out, out);
  *sink << report.dump(2) << '\n';
  return kOk;
}

int cmd_fff(const Options& o, std::ostream& out) {
  const unsigned precision = o.precision ? o.precision : kDefaultScanPrecision;
  check_precision(precision);
  const IndexTuple idx = IndexTuple::parse(o.u, o.v);
  if (idx.alpha() > kAlphaCap) {
    throw UnsupportedError("alpha " + std::to_string(idx.alpha()) + " exceeds the cap of " +
                           std::to_string(kAlphaCap));
  }
  const PulseSequence seq = read_sequence_file(o.sequence);
  const ControlMatrix cm(seq, parse_axes(o.axes));
  check_index(cm, idx);
  const std::vector<double> axis = parse_grid(o.grid.empty() ? "log:0.1:100:50" : o.grid);
  const int alpha = idx.alpha();
  std::size_t rows = 1;
  for (int a = 0; a < alpha; ++a) {
    rows *= axis.size();
    if (rows > 10'000'000) throw UnsupportedError("grid has more than 1e7 points");
  }
  // row r: component a takes axis[(r / n^(alpha-1-a)) % n], first component slowest
  std::vector<FilterEvaluation> values(rows);
  parallel_for(rows, [&](std::size_t r) {
    std::vector<double> w(alpha);
    std::size_t rest = r;
    for (int a = alpha - 1; a >= 0; --a) {
      w[a] = axis[rest % axis.size()];
      rest /= axis.size();
    }
    values[r] = fff_eval(cm, idx, w, precision);
  });
  const bool json = o.format == "json";
  if (!json && !o.format.empty() && o.format != "csv") throw std::invalid_argument("fff supports csv or json");
  Sink sink(o.out, out);
  if (json) {
    nlohmann::json j;
    j["sequence"] = sequence_name(seq, o.sequence);
    j["index"] = idx.label();
    j["rows"] = nlohmann::json::array();
    for (const auto& e : values) {
      j["rows"].push_back({{"omega", e.omega}, {"re", e.value.real()}, {"im", e.value.imag()}});
    }
    *sink << j.dump(2) << '\n';
    return kOk;
  }
  for (int a = 1; a <= alpha; ++a) *sink << "omega_" << a << ',';
  *sink << "re,im,abs\n";
  for (const auto& e : values) {
    for (double w : e.omega) *sink << shortest_decimal(w) << ',';
    *sink << shortest_decimal(e.value.real()) << ',' << shortest_decimal(e.value.imag()) << ','
          << shortest_decimal(std::abs(e.value)) << '\n';
  }
  return kOk;
}

int cmd_fig1(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.precision) check_precision(o.precision);
  const auto grid = o.grid.empty() ? figure1_default_grid() : parse_grid(o.grid);
  const auto gs = o.g_list.empty() ? figure1_default_couplings() : parse_number_list(o.g_list);
  Figure1Options fo;
  fo.T = o.T;
  if (!(fo.T > 0)) throw std::invalid_argument("T must be positive");
  if (o.method == "closed-form") {
    fo.method = MagnusMethod::closed_form;
  } else if (o.method == "quadrature") {
    fo.method = MagnusMethod::quadrature;
  } else {
    throw std::invalid_argument("method must be closed-form or quadrature");
  }
  const std::string format = o.format.empty() ? (o.out.empty() ? "csv" : "both") : o.format;
  if (format != "csv" && format != "svg" && format != "both") {
    throw std::invalid_argument("fig1 supports csv, svg or both");
  }
  const auto rows = figure1_scan(grid, gs, fo);
  if (o.out.empty()) {
    if (format == "both") throw std::invalid_argument("--format both needs --out");
    if (format == "csv") write_figure1_csv(out, rows);
    if (format == "svg") write_figure1_svg(out, rows);
    return kOk;
  }
  auto write = [&](const std::string& path, bool csv) {
    Sink sink(path, out);
    csv ? write_figure1_csv(*sink, rows) : write_figure1_svg(*sink, rows);
    err << "wrote " << path << '\n';
  };
  std::filesystem::path base(o.out);
  if (base.has_extension() && format != "both") {
    write(o.out, format == "csv");
  } else {
    if (base.has_extension()) base.replace_extension();
    if (format != "svg") write(base.string() + ".csv", true);
    if (format != "csv") write(base.string() + ".svg", false);
  }
  return kOk;
}

int cmd_decay(const Options& o, std::ostream& out) {
  const PulseSequence seq = read_sequence_file(o.sequence);
  const NoiseSpectrum spectrum = read_spectrum_file(o.spectrum);
  const ControlMatrix cm(seq, {PauliAxis::z});
  std::vector<double> Ts = o.durations;
  if (Ts.empty()) Ts.push_back(seq.duration().to_double());
  const bool json = o.format == "json";
  if (!json && !o.format.empty() && o.format != "csv") throw std::invalid_argument("decay supports csv or json");
  std::vector<double> chis;
  for (double T : Ts) chis.push_back(chi_gaussian(cm, spectrum, T));
  const std::string name = sequence_name(seq, o.sequence);
  const std::string sname =
      spectrum.label.empty() ? std::filesystem::path(o.spectrum).stem().string() : spectrum.label;
  Sink sink(o.out, out);
  if (json) {
    auto arr = nlohmann::json::array();
    for (std::size_t i = 0; i < Ts.size(); ++i) {
      arr.push_back({{"sequence", name}, {"spectrum", sname}, {"T", Ts[i]}, {"chi", chis[i]},
                     {"coherence", std::exp(-chis[i])}});
    }
    *sink << arr.dump(2) << '\n';
    return kOk;
  }
  *sink << "sequence,spectrum,T,chi,exp(-chi)\n";
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    *sink << csv_field(name) << ',' << csv_field(sname) << ',' << shortest_decimal(Ts[i]) << ','
          << shortest_decimal(chis[i]) << ',' << shortest_decimal(std::exp(-chis[i])) << '\n';
  }
  return kOk;
}

int cmd_generate(const Options& o, std::ostream& out) {
  if (!(o.T > 0)) throw std::invalid_argument("T must be positive");
  const Rational T = rational_from_shortest_decimal(o.T);
  PulseSequence seq = [&] {
    if (o.family == "udd") return udd_sequence(o.n, T);
    if (o.family == "cdd") {
      if (o.n < 1) throw std::invalid_argument("CDD level must be >= 1");
      return cdd_sequence(o.n, T);
    }
    if (o.family == "free") return free_evolution(T);
    throw std::invalid_argument("family must be udd, cdd or free");
  }();
  Sink sink(o.out, out);
  *sink << sequence_to_json(seq);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Filter functions, filtering and cancellation orders for pulse sequences"};
  app.name("filterforge");
  app.require_subcommand(1);
  Options o;

  auto* orders = app.add_subcommand("orders", "filtering orders per level and cancellation order (JSON)");
  orders->add_option("sequence", o.sequence, "sequence JSON")->required();
  orders->add_option("--axes", o.axes, "error axes, e.g. z or xyz")->capture_default_str();
  orders->add_option("--alpha-max", o.alpha_max, "highest Dyson order")->capture_default_str();
  orders->add_option("--degree-cap", o.degree_cap, "highest Taylor degree searched")->capture_default_str();
  orders->add_option("--precision", o.precision, "working precision in bits (default 192)");
  orders->add_option("--out", o.out, "output file (default stdout)");

  auto* fff = app.add_subcommand("fff", "fundamental filter function on a frequency grid (CSV)");
  fff->add_option("sequence", o.sequence, "sequence JSON")->required();
  fff->add_option("--u", o.u, "error axes u_1..u_alpha, e.g. zz")->capture_default_str();
  fff->add_option("--v", o.v, "control axes v_1..v_alpha, e.g. zx")->capture_default_str();
  fff->add_option("--axes", o.axes, "error axes of the control matrix")->capture_default_str();
  fff->add_option("--grid", o.grid, "log:lo:hi:n, lin:lo:hi:n or a,b,c (tensor grid for alpha > 1)");
  fff->add_option("--precision", o.precision, "working precision in bits (default 53)");
  fff->add_option("--format", o.format, "csv or json");
  fff->add_option("--out", o.out, "output file (default stdout)");

  auto* fig1 = app.add_subcommand("fig1", "UDD4 vs CDD3 Magnus norm ratios (CSV + SVG)");
  fig1->add_option("--g", o.g_list, "comma list of couplings (default 9/40,9/400,9/4000)");
  fig1->add_option("--grid", o.grid, "omega grid (default log:1e-5:10:60)");
  fig1->add_option("--T", o.T, "duration")->capture_default_str();
  fig1->add_option("--method", o.method, "closed-form or quadrature")->capture_default_str();
  fig1->add_option("--precision", o.precision, "accepted for symmetry; projections run at 256 bits");
  fig1->add_option("--format", o.format, "csv, svg or both");
  fig1->add_option("--out", o.out, "output path or prefix");

  auto* decay = app.add_subcommand("decay", "Gaussian dephasing exponent chi (CSV)");
  decay->add_option("sequence", o.sequence, "sequence JSON")->required();
  decay->add_option("spectrum", o.spectrum, "spectrum JSON")->required();
  decay->add_option("--T", o.durations, "durations (default: the sequence duration)");
  decay->add_option("--format", o.format, "csv or json");
  decay->add_option("--out", o.out, "output file (default stdout)");

  auto* gen = app.add_subcommand("generate", "write a UDD, CDD or free-evolution sequence as JSON");
  gen->add_option("family", o.family, "udd | cdd | free")->required();
  gen->add_option("--n", o.n, "UDD pulse count or CDD level")->capture_default_str();
  gen->add_option("--T", o.T, "duration")->capture_default_str();
  gen->add_option("--out", o.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kParseError;
  }

  try {
    if (*orders) return cmd_orders(o, out);
    if (*fff) return cmd_fff(o, out);
    if (*fig1) return cmd_fig1(o, out, err);
    if (*decay) return cmd_decay(o, out);
    if (*gen) return cmd_generate(o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kUnsupported;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace filterforge::cli
