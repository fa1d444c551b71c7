#pragma once

// Data tables and line plots for the three reproduced figures.
//
//   fig2  E_HZ and E_ph vs g/kappa, fixed N and Poisson number statistics
//   fig3  xi_S (fixed N) and xi_S,ph (Poisson) vs g/kappa, plus the
//         xi sqrt(N) trend at g/kappa = 1e3
//   fig4  Delta phi vs phi/pi for <N> g/kappa in {43.6, 1e3, 1e4}, and E_ph
//         vs <N> g/kappa around its minimum

#include <string>
#include <utility>
#include <vector>

#include "pqslab/sweep/config.hpp"
#include "pqslab/sweep/output.hpp"

namespace pqslab::sweep {

struct FigureOutput {
  std::string name;
  std::vector<std::pair<std::string, Table>> tables;      // file stem -> table
  std::vector<std::pair<std::string, std::string>> svgs;  // file name -> SVG text
  Json metadata;
};

std::vector<std::string> figure_names();

/// Keys: mean_n, tail_mass, g_points_per_decade, fig4_points.
/// Throws ConfigError for an unknown name.
FigureOutput make_figure(const std::string& name, Config& cfg);

}  // namespace pqslab::sweep
