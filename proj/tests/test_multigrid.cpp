#include <doctest.h>

#include <Eigen/Cholesky>

#include <random>

#include "oracles.hpp"
#include "stokesmg/bench.hpp"
#include "stokesmg/multigrid.hpp"

using namespace stokesmg;

namespace {

CycleConfig config(SmootherConfig s, int nu = 3, CycleKind c = CycleKind::W) {
  CycleConfig cfg;
  cfg.smoother = s;
  cfg.nu_pre = cfg.nu_post = nu;
  cfg.cycle = c;
  return cfg;
}

// Dense exact solve with the pressure mean pinned by a multiplier.
Vector dense_exact(const SaddleSystem& s, const Vector& rhs) {
  // eliminate the velocity with a Cholesky factor of A, then solve the
  // Schur system with the pressure mean pinned by a multiplier
  const DenseMatrix a = DenseMatrix(s.A);
  const DenseMatrix b = DenseMatrix(s.B);
  const Eigen::LLT<DenseMatrix> llt(a);
  const Vector f = rhs.head(s.nu());
  const Vector g = rhs.tail(s.np());
  const DenseMatrix schur = b * llt.solve(b.transpose());
  const Vector d = schur.diagonal().cwiseSqrt().cwiseInverse();
  Vector c = d.cwiseProduct(s.mass_p_ones);
  const double cn = c.norm();
  c /= cn;
  const Index np = s.np();
  DenseMatrix m = DenseMatrix::Zero(np + 1, np + 1);
  m.topLeftCorner(np, np) = d.asDiagonal() * schur * d.asDiagonal();
  m.block(0, np, np, 1) = c;
  m.block(np, 0, 1, np) = c.transpose();
  Vector r = Vector::Zero(np + 1);
  r.head(np) = d.cwiseProduct(b * llt.solve(f) - g);
  const Vector p = d.cwiseProduct(dense_solve(m, r).head(np));
  Vector x(s.size());
  x << llt.solve(f - b.transpose() * p), p;
  return x;
}

}  // namespace

TEST_CASE("coarse solve recovers the exact solution") {
  StokesHierarchy h(1);
  for (double beta : {0.0, 1.0, 1e6, 1e10}) {
    CAPTURE(beta);
    MultigridSolver mg(h, {beta});
    const SaddleSystem& s = mg.system(0);
    std::mt19937 rng(11);
    Vector xs = oracle::random_vector(s.size(), rng);
    project_pressure_mean(s, xs);
    const Vector z = mg.coarse_solve(s.apply(xs));
    const NormOperator norm(s);
    CHECK(norm(z - xs) <= 1e-8 * norm(xs));
    CHECK(std::abs(pressure_mean(s, z)) <= 1e-10);
    CHECK(mg.coarse_solve(Vector::Zero(s.size())).norm() == 0.0);
    CHECK_THROWS_AS(mg.coarse_solve(Vector::Zero(2)), ContractViolation);
  }
}

TEST_CASE("direct solve on a fine level matches the dense oracle") {
  StokesHierarchy h(1);
  MultigridSolver mg(h, {1e4});
  const SaddleSystem& s = mg.system(1);
  std::mt19937 rng(12);
  const Vector rhs = oracle::random_vector(s.size(), rng);
  Vector r = rhs;
  r.tail(s.np()).array() -= r.tail(s.np()).mean();  // compatible data
  const Vector expect = dense_exact(s, r);
  const Vector got = mg.direct_solve(1, r);
  CHECK((got - expect).cwiseAbs().maxCoeff() <= 1e-8 * expect.cwiseAbs().maxCoeff());
}

TEST_CASE("two-grid cycle against a dense oracle") {
  StokesHierarchy h(1);
  MultigridSolver mg(h, {1.0});
  const SaddleSystem& s = mg.system(1);
  const SaddleSystem& c = mg.system(0);
  const TransferOperators& t = h.transfer(1);
  std::mt19937 rng(13);
  const Vector x0 = oracle::random_vector(s.size(), rng);
  Vector xs = oracle::random_vector(s.size(), rng);
  project_pressure_mean(s, xs);
  const Vector rhs = s.apply(xs);

  for (const auto& sm : {SmootherConfig::normal_equation(), SmootherConfig::uzawa()}) {
    const CycleConfig cfg = config(sm, 2, CycleKind::two_grid);
    const ScalingOperator& sc = mg.scaling(1, ScalingVariant::natural_diag);
    const DenseMatrix k = dense_saddle_matrix(s);
    Vector x = x0;
    smooth(s, sc, sm, x, rhs, 2);
    const DenseMatrix pu = oracle::dense(t.P_u);
    const DenseMatrix pp = oracle::dense(t.P_p);
    const Vector r = rhs - k * x;
    Vector rc(c.size());
    rc << pu.transpose() * r.head(s.nu()), pp.transpose() * r.tail(s.np());
    const Vector z = dense_exact(c, rc);
    x.head(s.nu()) += pu * z.head(c.nu());
    x.tail(s.np()) += pp * z.tail(c.np());
    smooth(s, sc, sm, x, rhs, 2);
    project_pressure_mean(s, x);

    const Vector got = mg.mg_cycle(1, x0, rhs, cfg);
    CHECK((got - x).cwiseAbs().maxCoeff() <= 1e-8 * x.cwiseAbs().maxCoeff());
    // on level 1 the W cycle is the two-grid cycle
    const Vector w = mg.mg_cycle(1, x0, rhs, config(sm, 2));
    CHECK((w - got).cwiseAbs().maxCoeff() <= 1e-8 * x.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("cycle: fixed point, zero data and linearity") {
  StokesHierarchy h(3);
  MultigridSolver mg(h, {1.0});
  const SaddleSystem& s = mg.system(3);
  std::mt19937 rng(14);
  Vector xs = oracle::random_vector(s.size(), rng);
  project_pressure_mean(s, xs);
  const Vector rhs = s.apply(xs);
  const NormOperator norm(s);
  for (const auto& sm : {SmootherConfig::normal_equation(), SmootherConfig::uzawa()}) {
    for (CycleKind ck : {CycleKind::V, CycleKind::W, CycleKind::two_grid}) {
      const CycleConfig cfg = config(sm, 3, ck);
      CHECK(norm(mg.mg_cycle(3, xs, rhs, cfg) - xs) <= 1e-8 * norm(xs));
      CHECK(mg.mg_cycle(3, Vector::Zero(s.size()), Vector::Zero(s.size()), cfg).norm() == 0.0);

      // the error propagation x - x* -> E (x - x*) is linear
      const Vector e1 = oracle::random_vector(s.size(), rng);
      const Vector e2 = oracle::random_vector(s.size(), rng);
      auto prop = [&](const Vector& e) { return Vector(mg.mg_cycle(3, xs + e, rhs, cfg) - xs); };
      const Vector lhs = prop(e1 + 2.0 * e2);
      const Vector rhs_lin = prop(e1) + 2.0 * prop(e2);
      CHECK(norm(lhs - rhs_lin) <= 1e-8 * norm(rhs_lin));
    }
  }
}

TEST_CASE("zero smoothing steps with a zero residual return the input") {
  StokesHierarchy h(2);
  MultigridSolver mg(h, {1.0});
  const SaddleSystem& s = mg.system(2);
  std::mt19937 rng(15);
  Vector xs = oracle::random_vector(s.size(), rng);
  project_pressure_mean(s, xs);
  CycleConfig cfg = config(SmootherConfig::normal_equation(), 0);
  const Vector y = mg.mg_cycle(2, xs, s.apply(xs), cfg);
  CHECK((y - xs).cwiseAbs().maxCoeff() <= 1e-9 * xs.cwiseAbs().maxCoeff());
}

TEST_CASE("triple norm") {
  StokesHierarchy h(2);
  MultigridSolver mg(h, {0.0});
  const SaddleSystem& s = mg.system(2);
  const NormOperator norm(s);
  CHECK(norm(Vector::Zero(s.size())) == 0.0);
  std::mt19937 rng(16);
  const Vector x = oracle::random_vector(s.size(), rng);
  CHECK(triple_norm(-2.5 * x, norm) == doctest::Approx(2.5 * norm(x)).epsilon(1e-14));
  CHECK(norm.velocity_weight() == doctest::Approx(1.0 / (s.h * s.h)));
  CHECK_THROWS_AS(norm(Vector::Zero(3)), ContractViolation);

  // beta = 0, pure velocity: h^-1 times the L2 norm, by direct quadrature
  const auto& sp = h.space(2);
  const auto& mesh = h.mesh(2);
  Vector xu = x;
  xu.tail(s.np()).setZero();
  double l2 = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto c = mesh.corners(t);
    l2 += oracle::integrate_on_element(
        c,
        [&](const Point& p) {
          const double a = oracle::eval_velocity(sp, xu.head(s.nu()), 0, p);
          const double b = oracle::eval_velocity(sp, xu.head(s.nu()), 1, p);
          return a * a + b * b;
        });
  }
  CHECK(norm(xu) == doctest::Approx(std::sqrt(l2) / s.h).epsilon(1e-10));
}

TEST_CASE("solve reports") {
  StokesHierarchy h(3);
  MultigridSolver mg(h, {1.0});
  const Vector xs = exact_discrete_solution(h, 3);
  const SaddleSystem& s = mg.system(3);
  const Vector rhs = manufactured_rhs(s, xs);
  const CycleConfig cfg = config(SmootherConfig::uzawa());

  const SolveReport exact_start = mg.solve(3, rhs, xs, xs, cfg);
  CHECK(exact_start.n == 0);
  CHECK(exact_start.converged);

  const SolveReport r = mg.solve(3, rhs, xs, Vector::Zero(s.size()), cfg);
  CHECK(r.converged);
  CHECK(r.history.size() == static_cast<std::size_t>(r.n + 1));
  CHECK(r.history.back() <= 1e-9 * r.history.front());
  CHECK(r.q == doctest::Approx(std::pow(r.history.back() / r.history.front(), 1.0 / r.n)));
  CHECK(r.q < 0.5);

  SolveOptions few;
  few.max_iter = 2;
  const SolveReport cut = mg.solve(3, rhs, xs, Vector::Zero(s.size()), cfg, few);
  CHECK_FALSE(cut.converged);
  CHECK(cut.n == 2);
}

TEST_CASE("one W cycle reduces the level-4 error") {
  StokesHierarchy h(4);
  MultigridSolver mg(h, {1.0});
  const Vector xs = exact_discrete_solution(h, 4);
  const SaddleSystem& s = mg.system(4);
  const Vector rhs = manufactured_rhs(s, xs);
  const NormOperator norm(s);
  const Vector x0 = Vector::Zero(s.size());
  const Vector x1 = mg.mg_cycle(4, x0, rhs, config(SmootherConfig::normal_equation()));
  CHECK(norm(x1 - xs) < 0.9 * norm(x0 - xs));
  const Vector y1 = mg.mg_cycle(4, x0, rhs, config(SmootherConfig::uzawa()));
  CHECK(norm(y1 - xs) < 0.5 * norm(x0 - xs));
}

TEST_CASE("rates stay bounded across levels and beta") {
  StokesHierarchy h(4);
  for (double beta : {0.0, 1.0, 1e2, 1e4, 1e6, 1e10}) {
    MultigridSolver mg(h, {beta});
    for (int k = 2; k <= 4; ++k) {
      CAPTURE(beta);
      CAPTURE(k);
      const Vector xs = exact_discrete_solution(h, k);
      const Vector rhs = manufactured_rhs(mg.system(k), xs);
      const Vector x0 = Vector::Zero(xs.size());
      const SolveReport n = mg.solve(k, rhs, xs, x0, config(SmootherConfig::normal_equation()));
      const SolveReport u = mg.solve(k, rhs, xs, x0, config(SmootherConfig::uzawa()));
      CHECK(n.converged);
      CHECK(u.converged);
      CHECK(n.q < 0.85);
      CHECK(u.q < 0.45);
    }
  }
}

TEST_CASE("V cycle converges") {
  StokesHierarchy h(3);
  MultigridSolver mg(h, {1.0});
  const Vector xs = exact_discrete_solution(h, 3);
  const Vector rhs = manufactured_rhs(mg.system(3), xs);
  const SolveReport r = mg.solve(3, rhs, xs, Vector::Zero(xs.size()),
                                 config(SmootherConfig::uzawa(), 3, CycleKind::V));
  CHECK(r.converged);
}

TEST_CASE("unbuilt levels are rejected") {
  StokesHierarchy h(2);
  MultigridSolver mg(h, {1.0}, 1);
  CHECK(mg.finest_level() == 1);
  CHECK_THROWS_AS(mg.system(2), ContractViolation);
  CHECK_THROWS_AS(mg.mg_cycle(2, Vector::Zero(3), Vector::Zero(3), CycleConfig{}), ContractViolation);
  CHECK_THROWS_AS(MultigridSolver(h, {1.0}, 3), ContractViolation);
  CHECK_THROWS_AS(make_system(h.operators(0), {-1.0}), ConfigError);
  CHECK(parse_cycle("two-grid") == CycleKind::two_grid);
  CHECK_THROWS_AS(parse_cycle("f"), ConfigError);
}
