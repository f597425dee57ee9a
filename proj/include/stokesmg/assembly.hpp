#pragma once

// Taylor-Hood (P2 velocity / P1 pressure) discretization of the generalized
// Stokes operator
//
//   [ A  B^T ] [u]   [f]      A = stiffness + beta * M_U
//   [ B  0   ] [p] = [g],     B_ij = (div phi_j, psi_i)
//
// on the boundary-eliminated velocity space. Vectors of the coupled system
// are laid out as [u_x (interior nodes), u_y (interior nodes), p (vertices)].

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "stokesmg/mesh.hpp"
#include "stokesmg/sparse.hpp"

namespace stokesmg {

/// Points in barycentric coordinates; weights sum to 1 (multiply by the
/// element area).
struct QuadratureRule {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
};

/// Symmetric 6-point rule, exact up to degree 4.
const QuadratureRule& degree4_rule();
/// Symmetric 16-point rule, exact up to degree 8.
const QuadratureRule& degree8_rule();
/// Applies `rule` on each of the 4^subdivisions children of uniform
/// midpoint refinement of the reference triangle.
QuadratureRule composite_rule(const QuadratureRule& rule, int subdivisions);

struct ProblemParams {
  double beta = 0.0;
};

/// P2 shape functions on a triangle, local node order as MeshLevel::p2_nodes.
std::array<double, 6> p2_values(const std::array<double, 3>& lambda);
/// Gradients of the P2 shape functions for the triangle with corners `c`.
std::array<Eigen::Vector2d, 6> p2_gradients(const std::array<Point, 3>& c,
                                            const std::array<double, 3>& lambda);
/// Barycentric coordinates of `p` with respect to the corners `c`.
std::array<double, 3> barycentric(const std::array<Point, 3>& c, const Point& p);

Eigen::Matrix<double, 6, 6> p2_local_stiffness(const std::array<Point, 3>& c);
Eigen::Matrix3d p1_local_mass(const std::array<Point, 3>& c);

class TaylorHoodSpace {
 public:
  explicit TaylorHoodSpace(const MeshLevel& mesh);

  const MeshLevel& mesh() const { return *mesh_; }
  int level() const { return mesh_->level; }
  double h() const { return mesh_->h; }

  Index num_interior_nodes() const { return num_interior_; }
  /// -1 for P2 nodes on the boundary.
  Index interior_index(Index node) const { return interior_index_[node]; }
  Index interior_node(Index i) const { return interior_nodes_[i]; }

  Index full_velocity_dofs() const { return 2 * mesh_->num_p2_nodes(); }
  Index velocity_dofs() const { return 2 * num_interior_; }
  Index pressure_dofs() const { return mesh_->num_vertices(); }
  Index total_dofs() const { return velocity_dofs() + pressure_dofs(); }

  /// Row of component `comp` at interior node index `i`; -1 on the boundary.
  Index velocity_dof(int comp, Index node) const {
    const Index i = interior_index_[node];
    return i < 0 ? -1 : comp * num_interior_ + i;
  }

 private:
  const MeshLevel* mesh_;
  Index num_interior_ = 0;
  std::vector<Index> interior_index_;
  std::vector<Index> interior_nodes_;
};

/// The beta-independent matrices of one level.
struct LevelOperators {
  SparseMatrix stiffness;  // vector Laplacian, interior velocity dofs
  SparseMatrix mass_u;     // interior velocity dofs
  SparseMatrix div;        // B: pressure x interior velocity
  SparseMatrix mass_p;     // all pressure dofs
  double h = 0.0;
};

/// Assembles all four blocks in one pass. `element_order` permutes the
/// traversal (empty means natural order).
LevelOperators assemble_level(const TaylorHoodSpace& space,
                              std::span<const Index> element_order = {});

SparseMatrix assemble_A(const TaylorHoodSpace& space, const ProblemParams& params);
SparseMatrix assemble_B(const TaylorHoodSpace& space);
SparseMatrix assemble_mass_U(const TaylorHoodSpace& space);
SparseMatrix assemble_mass_P(const TaylorHoodSpace& space);

/// One level of the coupled system. Immutable once built.
struct SaddleSystem {
  SparseMatrix A;
  SparseMatrix B;
  SparseMatrix Bt;
  SparseMatrix M_U;
  SparseMatrix M_P;
  Vector mass_p_ones;  // M_P * 1
  ProblemParams params;
  double h = 0.0;

  Index nu() const { return A.rows(); }
  Index np() const { return M_P.rows(); }
  Index size() const { return nu() + np(); }

  /// The saddle operator [[A, B^T], [B, 0]] applied to x.
  Vector apply(const Vector& x) const;
  Vector residual(const Vector& rhs, const Vector& x) const;
};

SaddleSystem make_system(const LevelOperators& ops, const ProblemParams& params);

/// Dense copy of the full saddle matrix (small levels and tests only).
DenseMatrix dense_saddle_matrix(const SaddleSystem& system);

/// Shifts the pressure block so that 1^T M_P p = 0.
void project_pressure_mean(const SaddleSystem& system, Vector& x);
double pressure_mean(const SaddleSystem& system, const Vector& x);

using VelocityField = std::function<std::array<double, 2>(const Point&)>;
using ScalarField = std::function<double(const Point&)>;

/// L2 projection of (u, p) into the discrete space (interior velocity,
/// mean-zero pressure). The integrals use `rule`, applied on
/// 4^subdivisions sub-triangles of every element.
Vector l2_project(const TaylorHoodSpace& space, const LevelOperators& ops,
                  const VelocityField& u, const ScalarField& p,
                  const QuadratureRule& rule = degree8_rule(),
                  int subdivisions = 0);

/// Right-hand side whose exact discrete solution is `x_exact`.
Vector manufactured_rhs(const SaddleSystem& system, const Vector& x_exact);

}  // namespace stokesmg
