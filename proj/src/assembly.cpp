#include "stokesmg/assembly.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <cmath>
#include <numeric>
#include <string>

namespace stokesmg {

namespace {

void add_orbit3(QuadratureRule& r, double w, double a, double b) {
  // (a, b, b) and its cyclic permutations
  r.points.push_back({a, b, b});
  r.points.push_back({b, a, b});
  r.points.push_back({b, b, a});
  r.weights.insert(r.weights.end(), 3, w);
}

void add_orbit6(QuadratureRule& r, double w, double a, double b, double c) {
  const std::array<std::array<double, 3>, 6> perms = {
      {{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
  for (const auto& p : perms) r.points.push_back(p);
  r.weights.insert(r.weights.end(), 6, w);
}

QuadratureRule make_degree4() {
  QuadratureRule r;
  r.degree = 4;
  add_orbit3(r, 0.223381589678011, 0.108103018168070, 0.445948490915965);
  add_orbit3(r, 0.109951743655322, 0.816847572980459, 0.091576213509771);
  return r;
}

QuadratureRule make_degree8() {
  QuadratureRule r;
  r.degree = 8;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.144315607677787);
  add_orbit3(r, 0.095091634267285, 0.081414823414554, 0.459292588292723);
  add_orbit3(r, 0.103217370534718, 0.658861384496480, 0.170569307751760);
  add_orbit3(r, 0.032458497623198, 0.898905543365938, 0.050547228317031);
  add_orbit6(r, 0.027230314174435, 0.008394777409958, 0.263112829634638,
             0.728492392955404);
  return r;
}

using Bary = std::array<double, 3>;

Bary mid(const Bary& a, const Bary& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

void subdivide(const std::array<Bary, 3>& tri, int depth, const QuadratureRule& rule,
               double scale, QuadratureRule& out) {
  if (depth == 0) {
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Bary p{0.0, 0.0, 0.0};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) p[j] += rule.points[q][i] * tri[i][j];
      out.points.push_back(p);
      out.weights.push_back(rule.weights[q] * scale);
    }
    return;
  }
  const Bary m0 = mid(tri[1], tri[2]);
  const Bary m1 = mid(tri[2], tri[0]);
  const Bary m2 = mid(tri[0], tri[1]);
  const double s = 0.25 * scale;
  subdivide({tri[0], m2, m1}, depth - 1, rule, s, out);
  subdivide({m2, tri[1], m0}, depth - 1, rule, s, out);
  subdivide({m1, m0, tri[2]}, depth - 1, rule, s, out);
  subdivide({m0, m1, m2}, depth - 1, rule, s, out);
}

// Per-element scratch: values and gradients of all shape functions at one
// quadrature point.
struct PointData {
  std::array<double, 6> n2;
  std::array<Eigen::Vector2d, 6> g2;
  Bary lambda;
  double weight;  // rule weight * element area
};

Point map_point(const std::array<Point, 3>& c, const Bary& l) {
  return {l[0] * c[0].x + l[1] * c[1].x + l[2] * c[2].x,
          l[0] * c[0].y + l[1] * c[1].y + l[2] * c[2].y};
}

double area(const std::array<Point, 3>& c) {
  return 0.5 * ((c[1].x - c[0].x) * (c[2].y - c[0].y) -
                (c[2].x - c[0].x) * (c[1].y - c[0].y));
}

std::array<Eigen::Vector2d, 3> lambda_gradients(const std::array<Point, 3>& c) {
  const double two_s = 2.0 * area(c);
  std::array<Eigen::Vector2d, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Point& b = c[(i + 1) % 3];
    const Point& d = c[(i + 2) % 3];
    g[i] = Eigen::Vector2d(b.y - d.y, d.x - b.x) / two_s;
  }
  return g;
}

}  // namespace

const QuadratureRule& degree4_rule() {
  static const QuadratureRule rule = make_degree4();
  return rule;
}

const QuadratureRule& degree8_rule() {
  static const QuadratureRule rule = make_degree8();
  return rule;
}

QuadratureRule composite_rule(const QuadratureRule& rule, int subdivisions) {
  if (subdivisions < 0)
    throw ContractViolation("composite_rule: negative subdivision count");
  if (subdivisions == 0) return rule;
  QuadratureRule out;
  out.degree = rule.degree;
  subdivide({Bary{1, 0, 0}, Bary{0, 1, 0}, Bary{0, 0, 1}}, subdivisions, rule, 1.0,
            out);
  return out;
}

std::array<double, 6> p2_values(const std::array<double, 3>& l) {
  return {l[0] * (2 * l[0] - 1), l[1] * (2 * l[1] - 1), l[2] * (2 * l[2] - 1),
          4 * l[1] * l[2],       4 * l[2] * l[0],       4 * l[0] * l[1]};
}

std::array<Eigen::Vector2d, 6> p2_gradients(const std::array<Point, 3>& c,
                                            const std::array<double, 3>& l) {
  const auto gl = lambda_gradients(c);
  std::array<Eigen::Vector2d, 6> g;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    g[i] = (4 * l[i] - 1) * gl[i];
    g[3 + i] = 4 * (l[j] * gl[k] + l[k] * gl[j]);
  }
  return g;
}

std::array<double, 3> barycentric(const std::array<Point, 3>& c, const Point& p) {
  const double s = area(c);
  std::array<double, 3> l;
  for (int i = 0; i < 3; ++i) {
    const Point& b = c[(i + 1) % 3];
    const Point& d = c[(i + 2) % 3];
    l[i] = 0.5 * ((b.x - p.x) * (d.y - p.y) - (d.x - p.x) * (b.y - p.y)) / s;
  }
  return l;
}

Eigen::Matrix<double, 6, 6> p2_local_stiffness(const std::array<Point, 3>& c) {
  const QuadratureRule& rule = degree4_rule();
  const double s = area(c);
  Eigen::Matrix<double, 6, 6> k = Eigen::Matrix<double, 6, 6>::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto g = p2_gradients(c, rule.points[q]);
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) k(a, b) += rule.weights[q] * s * g[a].dot(g[b]);
  }
  return k;
}

Eigen::Matrix3d p1_local_mass(const std::array<Point, 3>& c) {
  const QuadratureRule& rule = degree4_rule();
  const double s = area(c);
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& l = rule.points[q];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m(a, b) += rule.weights[q] * s * l[a] * l[b];
  }
  return m;
}

TaylorHoodSpace::TaylorHoodSpace(const MeshLevel& mesh) : mesh_(&mesh) {
  const Index n = mesh.num_p2_nodes();
  interior_index_.assign(n, -1);
  for (Index node = 0; node < n; ++node) {
    if (!mesh.p2_node_on_boundary(node)) {
      interior_index_[node] = num_interior_++;
      interior_nodes_.push_back(node);
    }
  }
}

LevelOperators assemble_level(const TaylorHoodSpace& space,
                              std::span<const Index> element_order) {
  const MeshLevel& mesh = space.mesh();
  const Index nt = mesh.num_triangles();
  if (!element_order.empty() && static_cast<Index>(element_order.size()) != nt)
    throw ContractViolation("assemble_level: element order has " +
                            std::to_string(element_order.size()) +
                            " entries for " + std::to_string(nt) + " triangles");

  const QuadratureRule& rule = degree4_rule();
  const Index nu = space.velocity_dofs();
  const Index np = space.pressure_dofs();

  Triplets stiff, mass_u, div, mass_p;
  stiff.reserve(nt * 72);
  mass_u.reserve(nt * 72);
  div.reserve(nt * 36);
  mass_p.reserve(nt * 9);

  std::vector<PointData> pts(rule.size());
  for (Index e = 0; e < nt; ++e) {
    const Index t = element_order.empty() ? e : element_order[e];
    const auto c = mesh.corners(t);
    const double s = area(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      pts[q].lambda = rule.points[q];
      pts[q].n2 = p2_values(rule.points[q]);
      pts[q].g2 = p2_gradients(c, rule.points[q]);
      pts[q].weight = rule.weights[q] * s;
    }

    Eigen::Matrix<double, 6, 6> k_loc = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> m_loc = Eigen::Matrix<double, 6, 6>::Zero();
    // b_loc[comp](i, a) = int d_comp(N_a) * lambda_i
    std::array<Eigen::Matrix<double, 3, 6>, 2> b_loc = {
        Eigen::Matrix<double, 3, 6>::Zero(), Eigen::Matrix<double, 3, 6>::Zero()};
    Eigen::Matrix3d mp_loc = Eigen::Matrix3d::Zero();
    for (const auto& pd : pts) {
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          k_loc(a, b) += pd.weight * pd.g2[a].dot(pd.g2[b]);
          m_loc(a, b) += pd.weight * pd.n2[a] * pd.n2[b];
        }
        for (int i = 0; i < 3; ++i) {
          b_loc[0](i, a) += pd.weight * pd.g2[a].x() * pd.lambda[i];
          b_loc[1](i, a) += pd.weight * pd.g2[a].y() * pd.lambda[i];
        }
      }
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          mp_loc(i, j) += pd.weight * pd.lambda[i] * pd.lambda[j];
    }

    const auto nodes = mesh.p2_nodes(t);
    const auto& verts = mesh.triangles[t].vertices;
    for (int comp = 0; comp < 2; ++comp) {
      for (int a = 0; a < 6; ++a) {
        const Index ra = space.velocity_dof(comp, nodes[a]);
        if (ra < 0) continue;
        for (int b = 0; b < 6; ++b) {
          const Index rb = space.velocity_dof(comp, nodes[b]);
          if (rb < 0) continue;
          stiff.emplace_back(ra, rb, k_loc(a, b));
          mass_u.emplace_back(ra, rb, m_loc(a, b));
        }
        for (int i = 0; i < 3; ++i) div.emplace_back(verts[i], ra, b_loc[comp](i, a));
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) mass_p.emplace_back(verts[i], verts[j], mp_loc(i, j));
  }

  LevelOperators ops;
  ops.stiffness = from_triplets(nu, nu, stiff);
  ops.mass_u = from_triplets(nu, nu, mass_u);
  ops.div = from_triplets(np, nu, div);
  ops.mass_p = from_triplets(np, np, mass_p);
  ops.h = space.h();
  return ops;
}

SparseMatrix assemble_A(const TaylorHoodSpace& space, const ProblemParams& params) {
  LevelOperators ops = assemble_level(space);
  SparseMatrix a = ops.stiffness + params.beta * ops.mass_u;
  a.makeCompressed();
  return a;
}

SparseMatrix assemble_B(const TaylorHoodSpace& space) {
  return assemble_level(space).div;
}

SparseMatrix assemble_mass_U(const TaylorHoodSpace& space) {
  return assemble_level(space).mass_u;
}

SparseMatrix assemble_mass_P(const TaylorHoodSpace& space) {
  return assemble_level(space).mass_p;
}

Vector SaddleSystem::apply(const Vector& x) const {
  if (x.size() != size())
    throw ContractViolation("SaddleSystem::apply: vector of size " +
                            std::to_string(x.size()) + ", system size " +
                            std::to_string(size()));
  Vector y(size());
  y.head(nu()).noalias() = A * x.head(nu());
  y.head(nu()).noalias() += Bt * x.tail(np());
  y.tail(np()).noalias() = B * x.head(nu());
  return y;
}

Vector SaddleSystem::residual(const Vector& rhs, const Vector& x) const {
  if (rhs.size() != size())
    throw ContractViolation("SaddleSystem::residual: rhs of size " +
                            std::to_string(rhs.size()) + ", system size " +
                            std::to_string(size()));
  return rhs - apply(x);
}

SaddleSystem make_system(const LevelOperators& ops, const ProblemParams& params) {
  if (params.beta < 0.0)
    throw ConfigError("beta must be nonnegative, got " + std::to_string(params.beta));
  SaddleSystem s;
  s.A = ops.stiffness + params.beta * ops.mass_u;
  s.A.makeCompressed();
  s.B = ops.div;
  s.Bt = transpose(ops.div);
  s.M_U = ops.mass_u;
  s.M_P = ops.mass_p;
  s.mass_p_ones = s.M_P * Vector::Ones(s.M_P.cols());
  s.params = params;
  s.h = ops.h;
  return s;
}

DenseMatrix dense_saddle_matrix(const SaddleSystem& system) {
  const Index nu = system.nu();
  const Index np = system.np();
  DenseMatrix m = DenseMatrix::Zero(nu + np, nu + np);
  m.topLeftCorner(nu, nu) = DenseMatrix(system.A);
  m.topRightCorner(nu, np) = DenseMatrix(system.Bt);
  m.bottomLeftCorner(np, nu) = DenseMatrix(system.B);
  return m;
}

double pressure_mean(const SaddleSystem& system, const Vector& x) {
  const double volume = system.mass_p_ones.sum();
  return system.mass_p_ones.dot(x.tail(system.np())) / volume;
}

void project_pressure_mean(const SaddleSystem& system, Vector& x) {
  const double mean = pressure_mean(system, x);
  x.tail(system.np()).array() -= mean;
}

namespace {

Vector solve_mass(const SparseMatrix& m, const Vector& b) {
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-15);
  cg.setMaxIterations(10 * m.rows() + 100);
  cg.compute(m);
  Vector x = cg.solve(b);
  return x;
}

}  // namespace

Vector l2_project(const TaylorHoodSpace& space, const LevelOperators& ops,
                  const VelocityField& u, const ScalarField& p,
                  const QuadratureRule& base_rule, int subdivisions) {
  const MeshLevel& mesh = space.mesh();
  const QuadratureRule rule = composite_rule(base_rule, subdivisions);
  const Index nu = space.velocity_dofs();
  const Index np = space.pressure_dofs();
  Vector bu = Vector::Zero(nu);
  Vector bp = Vector::Zero(np);

  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    const double s = area(c);
    const auto nodes = mesh.p2_nodes(t);
    const auto& verts = mesh.triangles[t].vertices;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.points[q];
      const Point x = map_point(c, l);
      const double w = rule.weights[q] * s;
      const auto uv = u(x);
      const double pv = p(x);
      const auto n2 = p2_values(l);
      for (int a = 0; a < 6; ++a) {
        for (int comp = 0; comp < 2; ++comp) {
          const Index r = space.velocity_dof(comp, nodes[a]);
          if (r >= 0) bu[r] += w * uv[comp] * n2[a];
        }
      }
      for (int i = 0; i < 3; ++i) bp[verts[i]] += w * pv * l[i];
    }
  }

  Vector x(nu + np);
  x.head(nu) = nu > 0 ? solve_mass(ops.mass_u, bu) : Vector();
  x.tail(np) = solve_mass(ops.mass_p, bp);
  const Vector ones_m = ops.mass_p * Vector::Ones(np);
  x.tail(np).array() -= ones_m.dot(x.tail(np)) / ones_m.sum();
  return x;
}

Vector manufactured_rhs(const SaddleSystem& system, const Vector& x_exact) {
  return system.apply(x_exact);
}

}  // namespace stokesmg
