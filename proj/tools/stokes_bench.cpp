// Runs the multigrid experiments and prints the iteration tables.
//
//   stokes_bench --table normal --max-level 6 --format markdown
//   stokes_bench --smoother uzawa --beta 0,1e4 --max-level 5 --min-level 4

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "stokesmg/bench.hpp"

namespace {

constexpr int kLargeLevel = 7;

std::vector<double> parse_betas(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw stokesmg::ConfigError("bad beta value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_diagnostics(const stokesmg::ExperimentGrid& grid) {
  using namespace stokesmg;
  const int finest = *std::max_element(grid.levels.begin(), grid.levels.end());
  StokesHierarchy hierarchy(finest);
  for (double beta : grid.betas) {
    MultigridSolver solver(hierarchy, ProblemParams{beta}, finest);
    for (int k : grid.levels) {
      for (const auto& sm : grid.smoothers) {
        const auto& sc = solver.scaling(k, sm.scaling);
        if (sm.kind == SmootherKind::normal_equation) {
          const auto est = estimate_spectral_radius(solver.system(k), sc, sm.kind);
          std::cerr << "k=" << k << " beta=" << format_beta(beta)
                    << " normal: tau*rho = " << sm.tau * est.rho << '\n';
        } else {
          const auto chk = check_uzawa_damping(solver.system(k), sc, sm.tau, sm.sigma);
          std::cerr << "k=" << k << " beta=" << format_beta(beta)
                    << " uzawa: tau*lambda(Ahat^-1 A) = " << chk.velocity_ratio
                    << ", sigma*tau*lambda(Shat^-1 B Ahat^-1 B^T) = " << chk.schur_ratio
                    << (chk.satisfied() ? "" : "  (damping condition violated)") << '\n';
        }
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace stokesmg;
  CLI::App app{"Coupled multigrid for the generalized Stokes problem"};

  int max_level = 4;
  int min_level = -1;
  std::string betas = "1";
  std::string smoother = "normal";
  int nu_pre = 3;
  int nu_post = 3;
  std::string cycle = "w";
  double tau = -1.0;
  double sigma = -1.0;
  std::string scaling = "natural-diag";
  double tol = 1e-9;
  int max_iter = 200;
  std::string format = "csv";
  std::string table;
  bool allow_large = false;
  bool no_projection = false;
  bool diagnostics = false;

  app.add_option("--max-level", max_level, "Finest grid level")->check(CLI::Range(1, 10));
  app.add_option("--min-level", min_level, "Coarsest level to report (default: max level)");
  app.add_option("--beta", betas, "Comma-separated beta values");
  app.add_option("--smoother", smoother, "normal | uzawa")
      ->check(CLI::IsMember({"normal", "uzawa"}));
  app.add_option("--nu-pre", nu_pre, "Pre-smoothing steps")->check(CLI::NonNegativeNumber);
  app.add_option("--nu-post", nu_post, "Post-smoothing steps")->check(CLI::NonNegativeNumber);
  app.add_option("--cycle", cycle, "v | w | two-grid")
      ->check(CLI::IsMember({"v", "w", "two-grid"}));
  app.add_option("--tau", tau, "Damping (default 0.35 normal, 0.8 uzawa)");
  app.add_option("--sigma", sigma, "Uzawa pressure damping (default 0.8)");
  app.add_option("--scaling", scaling, "mass-diag | natural-diag")
      ->check(CLI::IsMember({"mass-diag", "natural-diag"}));
  app.add_option("--tol", tol, "Error reduction factor");
  app.add_option("--max-iter", max_iter, "Iteration cap");
  app.add_option("--format", format, "csv | markdown")->check(CLI::IsMember({"csv", "markdown"}));
  app.add_option("--table", table, "Preset: nu-sweep | normal | uzawa")
      ->check(CLI::IsMember({"nu-sweep", "normal", "uzawa"}));
  app.add_flag("--allow-large-levels", allow_large, "Permit levels >= 7");
  app.add_flag("--no-mean-projection", no_projection, "Skip the pressure-mean projection");
  app.add_flag("--diagnostics", diagnostics, "Print spectral/damping checks to stderr");

  CLI11_PARSE(app, argc, argv);

  try {
    if (max_level >= kLargeLevel && !allow_large)
      throw ConfigError("levels >= " + std::to_string(kLargeLevel) +
                        " need --allow-large-levels");

    ExperimentGrid grid;
    if (!table.empty()) {
      grid = make_preset(parse_table(table), max_level);
    } else {
      const int lo = min_level < 0 ? max_level : min_level;
      for (int k = lo; k <= max_level; ++k) grid.levels.push_back(k);
      grid.betas = parse_betas(betas);
      grid.smoothers = {parse_smoother(smoother) == SmootherKind::uzawa
                            ? SmootherConfig::uzawa()
                            : SmootherConfig::normal_equation()};
      grid.nus = {{nu_pre, nu_post}};
    }
    for (auto& sm : grid.smoothers) {
      if (tau > 0.0) sm.tau = tau;
      if (sigma > 0.0) sm.sigma = sigma;
      sm.scaling = parse_scaling(scaling);
    }
    grid.cycle = parse_cycle(cycle);
    grid.project_pressure_mean = !no_projection;
    grid.solve.tol = tol;
    grid.solve.max_iter = max_iter;
    grid.validate();

    if (diagnostics) print_diagnostics(grid);

    const auto rows = run_table(grid);
    std::cout << emit(rows, parse_format(format));
    const bool all_converged =
        std::all_of(rows.begin(), rows.end(), [](const TableRow& r) { return r.converged; });
    return all_converged ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
