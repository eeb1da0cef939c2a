#include "filterforge/figure1.hpp"

#include "filterforge/fff.hpp"
#include "filterforge/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace filterforge {

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw std::invalid_argument("bad log grid");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> figure1_default_couplings() { return {9.0 / 40, 9.0 / 400, 9.0 / 4000}; }

std::vector<double> figure1_default_grid() { return log_grid(1e-5, 1e1, 60); }

namespace {

const char* const kModels[] = {"quantum", "classical-cos", "classical-sin", "classical-combined"};

struct Cell {
  // unit-coupling terms per model and sequence
  MagnusTerms terms[3][2];
  double combined[2] = {0.0, 0.0};
};

Cell compute_cell(const ControlMatrix* seqs, double omega, const Figure1Options& opt) {
  Cell c;
  const ToyKind kinds[3] = {ToyKind::quantum_single_tone, ToyKind::classical_cos,
                            ToyKind::classical_sin};
  for (int s = 0; s < 2; ++s) {
    GffCache cache;
    MagnusOptions mo;
    mo.method = opt.method;
    mo.cache = &cache;
    for (int k = 0; k < 3; ++k) {
      c.terms[k][s] = magnus_terms(seqs[s], ToyNoiseModel{kinds[k], 1.0, omega, 0.0}, opt.T, 3, mo);
    }
    const ControlMatrix scaled =
        opt.T == seqs[s].duration()
            ? seqs[s]
            : seqs[s].dilated(rational_from_shortest_decimal(opt.T) /
                              rational_from_shortest_decimal(seqs[s].duration()));
    std::vector<Real> w{Real(omega)};
    c.combined[s] = to_double(
        fff_value<Real>(scaled, IndexTuple({PauliAxis::z}, {PauliAxis::z}), std::span<const Real>(w))
            .abs());
  }
  return c;
}

}  // namespace

std::vector<Figure1Row> figure1_scan(const std::vector<double>& omega_grid,
                                     const std::vector<double>& g_list,
                                     const Figure1Options& options) {
  if (omega_grid.empty() || g_list.empty()) throw std::invalid_argument("grids must be nonempty");
  for (double g : g_list) {
    if (!(g > 0.0)) throw std::invalid_argument("couplings must be positive");
  }
  const std::vector<PauliAxis> z{PauliAxis::z};
  const ControlMatrix seqs[2] = {ControlMatrix(udd_sequence(4, 1.0), z),
                                 ControlMatrix(cdd_sequence(3, Rational(1)), z)};
  std::vector<Cell> cells(omega_grid.size());
  parallel_for(omega_grid.size(),
               [&](std::size_t i) { cells[i] = compute_cell(seqs, omega_grid[i], options); });

  std::vector<Figure1Row> rows;
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    for (double g : g_list) {
      for (int k = 0; k < 4; ++k) {
        Figure1Row r;
        r.omega = omega_grid[i];
        r.g = g;
        r.model = kModels[k];
        if (k < 3) {
          r.norm_udd4 = error_action_norm(rescale_coupling(cells[i].terms[k][0], g));
          r.norm_cdd3 = error_action_norm(rescale_coupling(cells[i].terms[k][1], g));
        } else {
          r.norm_udd4 = g * cells[i].combined[0];
          r.norm_cdd3 = g * cells[i].combined[1];
        }
        std::vector<std::string> flags;
        if (g * options.T >= 1.0) flags.push_back("guard");
        if (r.norm_cdd3 < 1e-30) {
          flags.push_back("tiny-denominator");
          r.ratio = std::numeric_limits<double>::quiet_NaN();
        } else {
          r.ratio = r.norm_udd4 / r.norm_cdd3;
        }
        for (std::size_t f = 0; f < flags.size(); ++f) r.flags += (f ? ";" : "") + flags[f];
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

void write_figure1_csv(std::ostream& out, const std::vector<Figure1Row>& rows) {
  out << "omega,g,model,norm_udd4,norm_cdd3,ratio,flags\n";
  for (const auto& r : rows) {
    out << shortest_decimal(r.omega) << ',' << shortest_decimal(r.g) << ',' << r.model << ','
        << shortest_decimal(r.norm_udd4) << ',' << shortest_decimal(r.norm_cdd3) << ','
        << (std::isnan(r.ratio) ? std::string("nan") : shortest_decimal(r.ratio)) << ',' << r.flags
        << '\n';
  }
}

void write_figure1_svg(std::ostream& out, const std::vector<Figure1Row>& rows) {
  const double W = 720, H = 480, L = 70, R = 170, Tm = 20, B = 50;
  std::map<std::pair<double, std::string>, std::vector<std::pair<double, double>>> lines;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : rows) {
    if (!(r.ratio > 0.0) || !std::isfinite(r.ratio)) continue;
    const double x = std::log10(r.omega), y = std::log10(r.ratio);
    lines[{r.g, r.model}].emplace_back(x, y);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }
  if (lines.empty()) {
    xmin = ymin = -1;
    xmax = ymax = 1;
  }
  ymin = std::floor(std::min(ymin, 0.0));
  ymax = std::ceil(std::max(ymax, 0.0));
  xmin = std::floor(xmin);
  xmax = std::ceil(xmax);
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return Tm + (ymax - y) / (ymax - ymin) * (H - Tm - B); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\""
      << H - Tm - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double x = xmin; x <= xmax; x += 1) {
    out << "<text x=\"" << px(x) << "\" y=\"" << H - B + 15 << "\" text-anchor=\"middle\">1e"
        << static_cast<int>(x) << "</text>\n";
  }
  const double ystep = std::max(1.0, std::ceil((ymax - ymin) / 10));
  for (double y = ymin; y <= ymax; y += ystep) {
    out << "<text x=\"" << L - 5 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">1e"
        << static_cast<int>(y) << "</text>\n";
  }
  out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\">omega</text>\n";
  out << "<text x=\"15\" y=\"" << (Tm + H - B) / 2 << "\" transform=\"rotate(-90 15 "
      << (Tm + H - B) / 2 << ")\" text-anchor=\"middle\">norm ratio UDD4 / CDD3</text>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << py(0) << "\" x2=\"" << W - R << "\" y2=\"" << py(0)
      << "\" stroke=\"black\" stroke-dasharray=\"2,3\"/>\n";
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  int idx = 0;
  std::map<double, int> gcolor;
  for (const auto& [key, pts] : lines) {
    if (!gcolor.count(key.first)) gcolor[key.first] = static_cast<int>(gcolor.size());
    const char* color = colors[gcolor[key.first] % 6];
    const bool solid = key.second == "quantum";
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (solid ? "" : " stroke-dasharray=\"6,3\"") << " points=\"";
    for (const auto& [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << W - R + 8 << "\" y=\"" << Tm + 14 * (idx + 1) << "\" fill=\"" << color
        << "\">g=" << shortest_decimal(key.first) << ' ' << key.second << "</text>\n";
    ++idx;
  }
  out << "</svg>\n";
}

}  // namespace filterforge
