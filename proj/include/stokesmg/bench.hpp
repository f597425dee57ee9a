#pragma once

// Experiment runner: manufactured solution, parameter grids and table
// output.

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "stokesmg/multigrid.hpp"

namespace stokesmg {

/// phi = max(0, min(1, 2 - 4 |xi - (1/2, 1/2)|)),
/// u = phi (xi_2 - 1/2, 1/2 - xi_1), p = phi.
struct ExactSolution {
  static double phi(const Point& x);
  static std::array<double, 2> velocity(const Point& x);
  static double pressure(const Point& x);
};

/// L2 projection of ExactSolution into the Taylor-Hood space of level k.
Vector exact_discrete_solution(const StokesHierarchy& hierarchy, int k);

struct ExperimentGrid {
  std::vector<int> levels;
  std::vector<double> betas;
  std::vector<SmootherConfig> smoothers;
  std::vector<std::pair<int, int>> nus{{3, 3}};
  CycleKind cycle = CycleKind::W;
  bool project_pressure_mean = true;
  SolveOptions solve;

  /// Throws ConfigError on an empty list or a negative entry.
  void validate() const;
};

enum class TablePreset { nu_sweep, normal, uzawa };
TablePreset parse_table(std::string_view s);

/// The three reference experiments. `max_level` bounds the level range of
/// the beta tables (levels 4..max_level); the nu sweep is always level 4.
ExperimentGrid make_preset(TablePreset preset, int max_level);

struct TableRow {
  int level = 0;
  double beta = 0.0;
  std::string smoother;
  int nu_pre = 0;
  int nu_post = 0;
  int n = 0;
  double q = 0.0;
  bool converged = false;
  double wall_time_ms = 0.0;
  std::string error;  // non-empty for cells that could not be run
};

/// One row per (smoother, nu, beta, level). Rows come out in that nesting
/// order. Levels that cannot be built yield error rows.
std::vector<TableRow> run_table(const ExperimentGrid& grid);
/// Same, over an already built hierarchy (levels beyond it are error rows).
std::vector<TableRow> run_table(const ExperimentGrid& grid,
                                const StokesHierarchy& hierarchy);

enum class OutputFormat { csv, markdown };
OutputFormat parse_format(std::string_view s);

inline constexpr std::string_view kCsvHeader =
    "level,beta,smoother,nu_pre,nu_post,n,q,converged,wall_time_ms";

std::string emit(const std::vector<TableRow>& rows, OutputFormat format);
std::vector<TableRow> parse_csv(std::string_view text);

std::string format_beta(double beta);

}  // namespace stokesmg
