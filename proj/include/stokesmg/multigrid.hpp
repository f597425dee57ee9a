#pragma once

// Coupled multigrid for the generalized Stokes saddle system: smoothing on
// the full (u, p) system, canonical transfers, exact solve on level 0.

#include <memory>
#include <mutex>
#include <vector>

#include "stokesmg/assembly.hpp"
#include "stokesmg/mesh.hpp"
#include "stokesmg/smoother.hpp"
#include "stokesmg/transfer.hpp"

namespace stokesmg {

/// Everything that does not depend on beta: meshes, spaces, the four
/// operator blocks and the transfers. Immutable after construction.
class StokesHierarchy {
 public:
  explicit StokesHierarchy(int max_level);
  StokesHierarchy(const StokesHierarchy&) = delete;
  StokesHierarchy& operator=(const StokesHierarchy&) = delete;

  int max_level() const { return mesh_.max_level(); }
  const MeshHierarchy& meshes() const { return mesh_; }
  const MeshLevel& mesh(int k) const { return mesh_.levels.at(k); }
  const TaylorHoodSpace& space(int k) const { return spaces_.at(k); }
  const LevelOperators& operators(int k) const { return operators_.at(k); }
  /// Transfer between level k-1 and level k (k >= 1).
  const TransferOperators& transfer(int k) const;

 private:
  MeshHierarchy mesh_;
  std::vector<TaylorHoodSpace> spaces_;
  std::vector<LevelOperators> operators_;
  std::vector<TransferOperators> transfers_;  // index k holds k-1 -> k
};

enum class CycleKind { V, W, two_grid };

std::string_view to_string(CycleKind c);
CycleKind parse_cycle(std::string_view s);

struct CycleConfig {
  CycleKind cycle = CycleKind::W;
  int nu_pre = 3;
  int nu_post = 3;
  SmootherConfig smoother;
  bool project_pressure_mean = true;
};

/// |||x|||_k^2 = (h^-2 + beta) <M_U u, u> + h^-2 (beta + h^-2)^-1 <M_P p, p>
/// with the full (consistent) mass matrices.
class NormOperator {
 public:
  explicit NormOperator(const SaddleSystem& system);

  double velocity_weight() const { return wu_; }
  double pressure_weight() const { return wp_; }
  double operator()(const Vector& x) const;

 private:
  const SaddleSystem* system_;
  double wu_;
  double wp_;
};

double triple_norm(const Vector& x, const NormOperator& norm);

struct SolveOptions {
  double tol = 1e-9;
  int max_iter = 200;
  double divergence_factor = 1e6;
};

struct SolveReport {
  int n = 0;
  double q = 0.0;
  std::vector<double> history;  // |||x^(i) - x*|||, i = 0..n
  bool converged = false;
  Vector x;
};

class MultigridSolver {
 public:
  /// Builds the saddle systems of levels 0..finest (default: all levels).
  MultigridSolver(const StokesHierarchy& hierarchy, ProblemParams params,
                  int finest = -1);

  int finest_level() const { return static_cast<int>(systems_.size()) - 1; }
  const StokesHierarchy& hierarchy() const { return *hierarchy_; }
  const SaddleSystem& system(int k) const;
  const ScalingOperator& scaling(int k, ScalingVariant variant) const;
  NormOperator norm(int k) const { return NormOperator(system(k)); }

  /// Exact level-0 solve with the pressure mean pinned to zero.
  Vector coarse_solve(const Vector& rhs) const;
  /// Exact solve on any built level (sparse LU, cached per level).
  Vector direct_solve(int k, const Vector& rhs) const;

  /// One multigrid iteration on `level` starting from x.
  Vector mg_cycle(int level, const Vector& x, const Vector& rhs,
                  const CycleConfig& config) const;

  /// Iterates mg_cycle until the error against `x_exact` in |||.|||_level
  /// has dropped by `options.tol`.
  SolveReport solve(int level, const Vector& rhs, const Vector& x_exact,
                    const Vector& x0, const CycleConfig& config,
                    const SolveOptions& options = {}) const;

 private:
  struct DirectSolver;

  void check_level(int k) const;

  const StokesHierarchy* hierarchy_;
  ProblemParams params_;
  std::vector<SaddleSystem> systems_;
  std::vector<ScalingOperator> natural_;
  std::vector<ScalingOperator> mass_;
  Vector coarse_scale_;
  std::unique_ptr<DenseFactorization> coarse_;
  mutable std::mutex direct_mutex_;
  mutable std::vector<std::shared_ptr<DirectSolver>> direct_;
};

}  // namespace stokesmg
