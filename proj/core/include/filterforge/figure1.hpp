#pragma once

#include "filterforge/magnus.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace filterforge {

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

/// Coupling values of the reference figure: 9/40, 9/400, 9/4000.
std::vector<double> figure1_default_couplings();

/// 60 points in [1e-5, 1e1].
std::vector<double> figure1_default_grid();

struct Figure1Row {
  double omega = 0.0;
  double g = 0.0;
  std::string model;  // quantum | classical-cos | classical-sin | classical-combined
  double norm_udd4 = 0.0;
  double norm_cdd3 = 0.0;
  double ratio = 0.0;
  std::string flags;  // ';'-separated: guard (||H|| T >= 1), tiny-denominator
};

struct Figure1Options {
  double T = 1.0;
  MagnusMethod method = MagnusMethod::closed_form;
};

/// ||T H_eff||_UDD4 / ||T H_eff||_CDD3 for every (omega, g, model) cell.
/// classical-combined is g |F^(1)(omega, T)| for each sequence. Rows are
/// ordered by omega, then g, then model, whatever the thread count.
std::vector<Figure1Row> figure1_scan(const std::vector<double>& omega_grid,
                                     const std::vector<double>& g_list,
                                     const Figure1Options& options = {});

void write_figure1_csv(std::ostream& out, const std::vector<Figure1Row>& rows);

/// Log-log plot of ratio against omega, one polyline per (g, model).
void write_figure1_svg(std::ostream& out, const std::vector<Figure1Row>& rows);

}  // namespace filterforge
