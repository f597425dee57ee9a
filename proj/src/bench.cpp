#include "stokesmg/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <new>
#include <set>
#include <sstream>

namespace stokesmg {

double ExactSolution::phi(const Point& x) {
  const double r = std::hypot(x.x - 0.5, x.y - 0.5);
  return std::max(0.0, std::min(1.0, 2.0 - 4.0 * r));
}

std::array<double, 2> ExactSolution::velocity(const Point& x) {
  const double f = phi(x);
  return {f * (x.y - 0.5), f * (0.5 - x.x)};
}

double ExactSolution::pressure(const Point& x) { return phi(x); }

Vector exact_discrete_solution(const StokesHierarchy& hierarchy, int k) {
  return l2_project(hierarchy.space(k), hierarchy.operators(k), ExactSolution::velocity,
                    ExactSolution::pressure);
}

void ExperimentGrid::validate() const {
  if (levels.empty()) throw ConfigError("experiment grid: empty level list");
  if (betas.empty()) throw ConfigError("experiment grid: empty beta list");
  if (smoothers.empty()) throw ConfigError("experiment grid: empty smoother list");
  if (nus.empty()) throw ConfigError("experiment grid: empty smoothing-step list");
  for (int k : levels)
    if (k < 1) throw ConfigError("experiment grid: level must be >= 1, got " + std::to_string(k));
  for (double b : betas)
    if (!(b >= 0.0)) throw ConfigError("experiment grid: beta must be >= 0");
  for (auto [pre, post] : nus)
    if (pre < 0 || post < 0) throw ConfigError("experiment grid: negative smoothing steps");
}

TablePreset parse_table(std::string_view s) {
  if (s == "nu-sweep") return TablePreset::nu_sweep;
  if (s == "normal") return TablePreset::normal;
  if (s == "uzawa") return TablePreset::uzawa;
  throw ConfigError("unknown table preset '" + std::string(s) + "'");
}

ExperimentGrid make_preset(TablePreset preset, int max_level) {
  ExperimentGrid grid;
  if (preset == TablePreset::nu_sweep) {
    grid.levels = {4};
    grid.betas = {1.0};
    grid.smoothers = {SmootherConfig::normal_equation(), SmootherConfig::uzawa()};
    grid.nus = {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {8, 8}, {16, 16}};
    return grid;
  }
  for (int k = 4; k <= max_level; ++k) grid.levels.push_back(k);
  grid.betas = {0.0, 1e2, 1e4, 1e6, 1e8, 1e10};
  grid.smoothers = {preset == TablePreset::normal ? SmootherConfig::normal_equation()
                                                  : SmootherConfig::uzawa()};
  return grid;
}

namespace {

TableRow error_row(int level, double beta, const SmootherConfig& sm,
                   std::pair<int, int> nu, std::string message) {
  TableRow row;
  row.level = level;
  row.beta = beta;
  row.smoother = std::string(to_string(sm.kind));
  row.nu_pre = nu.first;
  row.nu_post = nu.second;
  row.n = -1;
  row.q = std::numeric_limits<double>::quiet_NaN();
  row.converged = false;
  row.error = std::move(message);
  return row;
}

}  // namespace

std::vector<TableRow> run_table(const ExperimentGrid& grid,
                                const StokesHierarchy& hierarchy) {
  grid.validate();
  const int built = hierarchy.max_level();
  const int finest = std::min(built, *std::max_element(grid.levels.begin(), grid.levels.end()));

  std::map<int, Vector> exact;
  for (int k : grid.levels)
    if (k <= built && !exact.count(k)) exact.emplace(k, exact_discrete_solution(hierarchy, k));

  // Solvers are beta-dependent; build each once.
  std::map<double, std::unique_ptr<MultigridSolver>> solvers;
  for (double beta : grid.betas)
    if (!solvers.count(beta))
      solvers.emplace(beta, std::make_unique<MultigridSolver>(
                                hierarchy, ProblemParams{beta}, finest));

  std::vector<TableRow> rows;
  for (const auto& sm : grid.smoothers) {
    for (auto nu : grid.nus) {
      for (double beta : grid.betas) {
        const MultigridSolver& solver = *solvers.at(beta);
        for (int k : grid.levels) {
          if (k > built) {
            rows.push_back(error_row(k, beta, sm, nu,
                                     "level " + std::to_string(k) + " not available"));
            continue;
          }
          CycleConfig cfg;
          cfg.cycle = grid.cycle;
          cfg.nu_pre = nu.first;
          cfg.nu_post = nu.second;
          cfg.smoother = sm;
          cfg.project_pressure_mean = grid.project_pressure_mean;

          const Vector& x_star = exact.at(k);
          const Vector rhs = manufactured_rhs(solver.system(k), x_star);
          const auto start = std::chrono::steady_clock::now();
          const SolveReport report =
              solver.solve(k, rhs, x_star, Vector::Zero(x_star.size()), cfg, grid.solve);
          const auto stop = std::chrono::steady_clock::now();

          TableRow row;
          row.level = k;
          row.beta = beta;
          row.smoother = std::string(to_string(sm.kind));
          row.nu_pre = nu.first;
          row.nu_post = nu.second;
          row.n = report.n;
          row.q = report.q;
          row.converged = report.converged;
          row.wall_time_ms =
              std::chrono::duration<double, std::milli>(stop - start).count();
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::vector<TableRow> run_table(const ExperimentGrid& grid) {
  grid.validate();
  const int max_level = *std::max_element(grid.levels.begin(), grid.levels.end());
  std::unique_ptr<StokesHierarchy> hierarchy;
  std::string failure;
  // Back off one level at a time when the finest level does not fit.
  for (int k = max_level; k >= 0 && !hierarchy; --k) {
    try {
      hierarchy = std::make_unique<StokesHierarchy>(k);
    } catch (const ResourceError& e) {
      if (failure.empty()) failure = e.what();
    } catch (const std::bad_alloc&) {
      if (failure.empty())
        failure = "out of memory building " + std::to_string(k + 1) + " levels";
    }
  }
  if (!hierarchy) throw ResourceError(failure);
  auto rows = run_table(grid, *hierarchy);
  if (!failure.empty())
    for (auto& row : rows)
      if (!row.error.empty()) row.error = failure;
  return rows;
}

OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "markdown" || s == "md") return OutputFormat::markdown;
  throw ConfigError("unknown output format '" + std::string(s) + "'");
}

std::string format_beta(double beta) {
  if (beta > 0.0) {
    const double e = std::log10(beta);
    const double r = std::round(e);
    if (std::abs(e - r) < 1e-12 && r >= 2) return "10^" + std::to_string(static_cast<int>(r));
  }
  std::ostringstream os;
  os << beta;
  return os.str();
}

namespace {

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string nu_label(const TableRow& r) {
  return std::to_string(r.nu_pre) + "+" + std::to_string(r.nu_post);
}

// (n, q) cell pair
std::pair<std::string, std::string> cells(const TableRow& r) {
  if (!r.error.empty()) return {"error", ""};
  if (!r.converged) return {"divergent", ""};
  return {std::to_string(r.n), fixed(r.q, 3)};
}

std::string emit_csv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.level << ',' << std::setprecision(17) << r.beta << ',' << r.smoother << ','
       << r.nu_pre << ',' << r.nu_post << ',' << r.n << ',' << fixed(r.q, 6) << ','
       << (r.converged ? "true" : "false") << ',' << fixed(r.wall_time_ms, 3) << '\n';
  }
  return os.str();
}

std::string emit_markdown(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  if (rows.empty()) return "";

  std::set<std::pair<int, double>> level_beta;
  std::vector<std::string> nus;
  for (const auto& r : rows) {
    level_beta.insert({r.level, r.beta});
    if (std::find(nus.begin(), nus.end(), nu_label(r)) == nus.end()) nus.push_back(nu_label(r));
  }

  if (level_beta.size() == 1 && nus.size() > 1) {
    // Smoothing-step sweep: smoothers as rows, nu as column groups.
    os << "Level k=" << rows.front().level << ", beta=" << format_beta(rows.front().beta)
       << "\n\n| smoother |";
    for (const auto& nu : nus) os << " nu=" << nu << " n | q |";
    os << "\n|---|";
    for (std::size_t i = 0; i < nus.size(); ++i) os << "---|---|";
    os << '\n';
    std::vector<std::string> smoothers;
    for (const auto& r : rows)
      if (std::find(smoothers.begin(), smoothers.end(), r.smoother) == smoothers.end())
        smoothers.push_back(r.smoother);
    for (const auto& sm : smoothers) {
      os << "| " << sm << " |";
      for (const auto& nu : nus) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const TableRow& r) {
          return r.smoother == sm && nu_label(r) == nu;
        });
        if (it == rows.end()) {
          os << "  |  |";
        } else {
          auto [n, q] = cells(*it);
          os << ' ' << n << " | " << q << " |";
        }
      }
      os << '\n';
    }
    return os.str();
  }

  // Levels as rows, beta as column groups; one table per (smoother, nu).
  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& r : rows) {
    std::pair<std::string, std::string> g{r.smoother, nu_label(r)};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  bool first = true;
  for (const auto& [sm, nu] : groups) {
    std::vector<double> betas;
    std::vector<int> levels;
    for (const auto& r : rows) {
      if (r.smoother != sm || nu_label(r) != nu) continue;
      if (std::find(betas.begin(), betas.end(), r.beta) == betas.end()) betas.push_back(r.beta);
      if (std::find(levels.begin(), levels.end(), r.level) == levels.end())
        levels.push_back(r.level);
    }
    if (!first) os << '\n';
    first = false;
    os << "Smoother " << sm << ", nu=" << nu << "\n\n|   |";
    for (double b : betas) os << " beta=" << format_beta(b) << " n | q |";
    os << "\n|---|";
    for (std::size_t i = 0; i < betas.size(); ++i) os << "---|---|";
    os << '\n';
    for (int k : levels) {
      os << "| k=" << k << " |";
      for (double b : betas) {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const TableRow& r) {
          return r.smoother == sm && nu_label(r) == nu && r.level == k && r.beta == b;
        });
        if (it == rows.end()) {
          os << "  |  |";
        } else {
          auto [n, q] = cells(*it);
          os << ' ' << n << " | " << q << " |";
        }
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace

std::string emit(const std::vector<TableRow>& rows, OutputFormat format) {
  return format == OutputFormat::csv ? emit_csv(rows) : emit_markdown(rows);
}

std::vector<TableRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw ConfigError("parse_csv: missing or unexpected header");
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 9)
      throw ConfigError("parse_csv: expected 9 fields, got " + std::to_string(f.size()));
    TableRow r;
    r.level = std::stoi(f[0]);
    r.beta = std::stod(f[1]);
    r.smoother = f[2];
    r.nu_pre = std::stoi(f[3]);
    r.nu_post = std::stoi(f[4]);
    r.n = std::stoi(f[5]);
    r.q = std::stod(f[6]);
    r.converged = f[7] == "true";
    r.wall_time_ms = std::stod(f[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace stokesmg
