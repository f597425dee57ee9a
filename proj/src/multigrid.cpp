#include "stokesmg/multigrid.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <limits>
#include <string>

namespace stokesmg {

std::string_view to_string(CycleKind c) {
  switch (c) {
    case CycleKind::V: return "v";
    case CycleKind::W: return "w";
    case CycleKind::two_grid: return "two-grid";
  }
  return "?";
}

CycleKind parse_cycle(std::string_view s) {
  if (s == "v" || s == "V") return CycleKind::V;
  if (s == "w" || s == "W") return CycleKind::W;
  if (s == "two-grid" || s == "two_grid") return CycleKind::two_grid;
  throw ConfigError("unknown cycle '" + std::string(s) + "'");
}

StokesHierarchy::StokesHierarchy(int max_level) : mesh_(build_hierarchy(max_level)) {
  spaces_.reserve(mesh_.levels.size());
  for (const auto& level : mesh_.levels) spaces_.emplace_back(level);
  for (const auto& space : spaces_) operators_.push_back(assemble_level(space));
  transfers_.resize(spaces_.size());
  for (std::size_t k = 1; k < spaces_.size(); ++k)
    transfers_[k] = build_prolongation(spaces_[k - 1], spaces_[k]);
}

const TransferOperators& StokesHierarchy::transfer(int k) const {
  if (k < 1 || k > max_level())
    throw ContractViolation("no transfer into level " + std::to_string(k));
  return transfers_[k];
}

NormOperator::NormOperator(const SaddleSystem& system) : system_(&system) {
  const double hm2 = 1.0 / (system.h * system.h);
  wu_ = hm2 + system.params.beta;
  wp_ = hm2 / (system.params.beta + hm2);
}

double NormOperator::operator()(const Vector& x) const {
  if (x.size() != system_->size())
    throw ContractViolation("triple_norm: vector of size " + std::to_string(x.size()) +
                            ", system size " + std::to_string(system_->size()));
  const auto u = x.head(system_->nu());
  const auto p = x.tail(system_->np());
  const double sq = wu_ * u.dot(system_->M_U * u) + wp_ * p.dot(system_->M_P * p);
  return std::sqrt(std::max(sq, 0.0));
}

double triple_norm(const Vector& x, const NormOperator& norm) { return norm(x); }

namespace {

// [[K, c], [c^T, 0]] with c = (0, M_P 1): the multiplier pins the pressure
// mean. The matrix is returned symmetrically equilibrated, S M S, with
// S = diag(d_u^-1/2, d_p^-1/2, 1/|S_p c|); beta = 1e10 otherwise leaves the
// divergence block below the pivot threshold.
Triplets augmented_triplets(const SaddleSystem& s, const Vector& scale) {
  Triplets t;
  const Index nu = s.nu();
  const Index np = s.np();
  t.reserve(s.A.nonZeros() + 2 * s.B.nonZeros() + 2 * np);
  for (Index i = 0; i < s.A.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s.A, i); it; ++it)
      t.emplace_back(it.row(), it.col(), scale[it.row()] * it.value() * scale[it.col()]);
  for (Index i = 0; i < s.B.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(s.B, i); it; ++it) {
      const double v = scale[nu + it.row()] * it.value() * scale[it.col()];
      t.emplace_back(nu + it.row(), it.col(), v);
      t.emplace_back(it.col(), nu + it.row(), v);
    }
  for (Index i = 0; i < np; ++i) {
    const double v = scale[nu + np] * s.mass_p_ones[i] * scale[nu + i];
    t.emplace_back(nu + np, nu + i, v);
    t.emplace_back(nu + i, nu + np, v);
  }
  return t;
}

Vector equilibration(const SaddleSystem& s, const ScalingOperator& natural) {
  Vector scale(s.size() + 1);
  scale.head(s.nu()) = natural.d_u.array().rsqrt();
  scale.segment(s.nu(), s.np()) = natural.d_p.array().rsqrt();
  scale[s.size()] = 1.0 / scale.segment(s.nu(), s.np()).cwiseProduct(s.mass_p_ones).norm();
  return scale;
}

Vector augment(const Vector& rhs, const Vector& scale) {
  Vector b(rhs.size() + 1);
  b.head(rhs.size()) = rhs;
  b[rhs.size()] = 0.0;
  return b.cwiseProduct(scale);
}

Vector unscale(const Vector& y, const Vector& scale) {
  return y.cwiseProduct(scale).head(y.size() - 1);
}

}  // namespace

struct MultigridSolver::DirectSolver {
  Vector scale;
  Eigen::SparseMatrix<double> matrix;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
};

MultigridSolver::MultigridSolver(const StokesHierarchy& hierarchy, ProblemParams params,
                                 int finest)
    : hierarchy_(&hierarchy), params_(params) {
  if (finest < 0) finest = hierarchy.max_level();
  if (finest > hierarchy.max_level())
    throw ContractViolation("MultigridSolver: level " + std::to_string(finest) +
                            " not built (max " + std::to_string(hierarchy.max_level()) +
                            ")");
  systems_.reserve(finest + 1);
  for (int k = 0; k <= finest; ++k) {
    systems_.push_back(make_system(hierarchy.operators(k), params));
    natural_.push_back(build_scaling(systems_.back(), ScalingVariant::natural_diag));
    mass_.push_back(build_scaling(systems_.back(), ScalingVariant::mass_diag));
  }
  const SaddleSystem& s0 = systems_[0];
  const Index n = s0.size();
  coarse_scale_ = equilibration(s0, natural_[0]);
  DenseMatrix aug = DenseMatrix::Zero(n + 1, n + 1);
  for (const auto& t : augmented_triplets(s0, coarse_scale_))
    aug(t.row(), t.col()) += t.value();
  try {
    coarse_ = std::make_unique<DenseFactorization>(aug);
  } catch (const SingularMatrixError& e) {
    throw ConfigError(std::string("coarse saddle system is singular: ") + e.what());
  }
  direct_.resize(systems_.size());
}

void MultigridSolver::check_level(int k) const {
  if (k < 0 || k > finest_level())
    throw ContractViolation("level " + std::to_string(k) + " not built (finest " +
                            std::to_string(finest_level()) + ")");
}

const SaddleSystem& MultigridSolver::system(int k) const {
  check_level(k);
  return systems_[k];
}

const ScalingOperator& MultigridSolver::scaling(int k, ScalingVariant variant) const {
  check_level(k);
  return variant == ScalingVariant::natural_diag ? natural_[k] : mass_[k];
}

Vector MultigridSolver::coarse_solve(const Vector& rhs) const {
  const SaddleSystem& s0 = systems_[0];
  if (rhs.size() != s0.size())
    throw ContractViolation("coarse_solve: rhs of size " + std::to_string(rhs.size()) +
                            ", level-0 size " + std::to_string(s0.size()));
  return unscale(coarse_->solve(augment(rhs, coarse_scale_)), coarse_scale_);
}

Vector MultigridSolver::direct_solve(int k, const Vector& rhs) const {
  check_level(k);
  if (k == 0) return coarse_solve(rhs);
  const SaddleSystem& s = systems_[k];
  if (rhs.size() != s.size())
    throw ContractViolation("direct_solve: rhs of size " + std::to_string(rhs.size()) +
                            ", level size " + std::to_string(s.size()));
  std::shared_ptr<DirectSolver> solver;
  {
    std::lock_guard lock(direct_mutex_);
    if (!direct_[k]) {
      auto d = std::make_shared<DirectSolver>();
      const Index n = s.size() + 1;
      d->matrix.resize(n, n);
      d->scale = equilibration(s, natural_[k]);
      const Triplets t = augmented_triplets(s, d->scale);
      d->matrix.setFromTriplets(t.begin(), t.end());
      d->matrix.makeCompressed();
      d->lu.analyzePattern(d->matrix);
      d->lu.factorize(d->matrix);
      if (d->lu.info() != Eigen::Success)
        throw SingularMatrixError("direct_solve: factorization of level " +
                                  std::to_string(k) + " failed: " +
                                  d->lu.lastErrorMessage());
      direct_[k] = d;
    }
    solver = direct_[k];
  }
  const Vector y = solver->lu.solve(augment(rhs, solver->scale));
  return unscale(y, solver->scale);
}

Vector MultigridSolver::mg_cycle(int level, const Vector& x_in, const Vector& rhs,
                                 const CycleConfig& config) const {
  check_level(level);
  const SaddleSystem& s = systems_[level];
  if (x_in.size() != s.size() || rhs.size() != s.size())
    throw ContractViolation("mg_cycle: dimension mismatch on level " +
                            std::to_string(level));
  if (level == 0) return coarse_solve(rhs);

  const ScalingOperator& sc = scaling(level, config.smoother.scaling);
  Vector x = x_in;
  smooth(s, sc, config.smoother, x, rhs, config.nu_pre);

  const TransferOperators& t = hierarchy_->transfer(level);
  const Vector rc = restrict_residual(t, s.residual(rhs, x));
  Vector z;
  if (config.cycle == CycleKind::two_grid) {
    z = direct_solve(level - 1, rc);
  } else if (level == 1) {
    z = coarse_solve(rc);
  } else {
    z = Vector::Zero(rc.size());
    const int recursions = config.cycle == CycleKind::W ? 2 : 1;
    for (int i = 0; i < recursions; ++i) z = mg_cycle(level - 1, z, rc, config);
  }
  x += prolongate(t, z);

  smooth(s, sc, config.smoother, x, rhs, config.nu_post);
  if (config.project_pressure_mean) project_pressure_mean(s, x);
  return x;
}

SolveReport MultigridSolver::solve(int level, const Vector& rhs, const Vector& x_exact,
                                   const Vector& x0, const CycleConfig& config,
                                   const SolveOptions& options) const {
  check_level(level);
  const NormOperator norm(systems_[level]);
  SolveReport report;
  report.x = x0;
  const double e0 = norm(x0 - x_exact);
  report.history.push_back(e0);
  if (e0 == 0.0) {
    report.converged = true;
    return report;
  }
  for (int i = 1; i <= options.max_iter; ++i) {
    report.x = mg_cycle(level, report.x, rhs, config);
    const double e = norm(report.x - x_exact);
    report.history.push_back(e);
    report.n = i;
    if (e <= options.tol * e0) {
      report.converged = true;
      break;
    }
    if (!std::isfinite(e) || e > options.divergence_factor * e0) break;
  }
  const double ratio = report.history.back() / e0;
  report.q = std::isfinite(ratio) ? std::pow(ratio, 1.0 / report.n)
                                  : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace stokesmg
