#include "stokesmg/smoother.hpp"

#include <cmath>
#include <iostream>
#include <random>

namespace stokesmg {

std::string_view to_string(ScalingVariant v) {
  return v == ScalingVariant::mass_diag ? "mass-diag" : "natural-diag";
}

std::string_view to_string(SmootherKind k) {
  return k == SmootherKind::normal_equation ? "normal" : "uzawa";
}

ScalingVariant parse_scaling(std::string_view s) {
  if (s == "mass-diag" || s == "mass_diag") return ScalingVariant::mass_diag;
  if (s == "natural-diag" || s == "natural_diag") return ScalingVariant::natural_diag;
  throw ConfigError("unknown scaling '" + std::string(s) + "'");
}

SmootherKind parse_smoother(std::string_view s) {
  if (s == "normal" || s == "normal_equation") return SmootherKind::normal_equation;
  if (s == "uzawa") return SmootherKind::uzawa;
  throw ConfigError("unknown smoother '" + std::string(s) + "'");
}

namespace {

void check_positive(const Vector& d, const char* name) {
  for (Index i = 0; i < d.size(); ++i)
    if (!(d[i] > 0.0))
      throw std::runtime_error(std::string("build_scaling: ") + name + "[" +
                               std::to_string(i) + "] = " + std::to_string(d[i]) +
                               " is not positive (assembly bug)");
}

void check_dims(const SaddleSystem& system, const ScalingOperator& scaling,
                const Vector& x, const Vector& rhs) {
  if (x.size() != system.size() || rhs.size() != system.size() ||
      scaling.d_u.size() != system.nu() || scaling.d_p.size() != system.np())
    throw ContractViolation("smoother: dimension mismatch (system " +
                            std::to_string(system.size()) + ", x " +
                            std::to_string(x.size()) + ", rhs " +
                            std::to_string(rhs.size()) + ")");
}

}  // namespace

ScalingOperator build_scaling(const SaddleSystem& system, ScalingVariant variant) {
  ScalingOperator s;
  s.variant = variant;
  s.beta = system.params.beta;
  s.h = system.h;
  if (variant == ScalingVariant::mass_diag) {
    const double hm2 = 1.0 / (system.h * system.h);
    s.d_u = (hm2 + s.beta) * system.M_U.diagonal();
    s.d_p = (hm2 / (s.beta + hm2)) * system.M_P.diagonal();
  } else {
    s.d_u = system.A.diagonal();
    check_positive(s.d_u, "d_u");
    s.d_p = Vector::Zero(system.np());
    for (Index i = 0; i < system.B.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(system.B, i); it; ++it)
        s.d_p[i] += it.value() * it.value() / s.d_u[it.col()];
  }
  check_positive(s.d_u, "d_u");
  check_positive(s.d_p, "d_p");
  return s;
}

Vector normal_equation_step(const SaddleSystem& system, const ScalingOperator& scaling,
                            double tau, const Vector& x, const Vector& rhs) {
  check_dims(system, scaling, x, rhs);
  const Index nu = system.nu();
  const Index np = system.np();
  Vector w = system.residual(rhs, x);
  w.head(nu).array() /= scaling.d_u.array();
  w.tail(np).array() /= scaling.d_p.array();
  Vector v = system.apply(w);
  v.head(nu).array() /= scaling.d_u.array();
  v.tail(np).array() /= scaling.d_p.array();
  return x + tau * v;
}

Vector uzawa_step(const SaddleSystem& system, const ScalingOperator& scaling,
                  double tau, double sigma, const Vector& x, const Vector& rhs) {
  check_dims(system, scaling, x, rhs);
  const Index nu = system.nu();
  const Index np = system.np();
  const auto u = x.head(nu);
  const auto p = x.tail(np);
  const auto f = rhs.head(nu);
  const auto g = rhs.tail(np);

  // f - A u is shared by the predictor and the corrector.
  const Vector f_minus_au = f - system.A * u;
  const Vector u_half =
      u + tau * ((f_minus_au - system.Bt * p).array() / scaling.d_u.array()).matrix();
  Vector out(system.size());
  out.tail(np) =
      p - sigma * ((g - system.B * u_half).array() / scaling.d_p.array()).matrix();
  out.head(nu) =
      u + tau * ((f_minus_au - system.Bt * out.tail(np)).array() / scaling.d_u.array())
                    .matrix();
  return out;
}

void smooth(const SaddleSystem& system, const ScalingOperator& scaling,
            const SmootherConfig& config, Vector& x, const Vector& rhs, int steps) {
  for (int m = 0; m < steps; ++m) {
    if (config.kind == SmootherKind::normal_equation)
      x = normal_equation_step(system, scaling, config.tau, x, rhs);
    else
      x = uzawa_step(system, scaling, config.tau, config.sigma, x, rhs);
  }
}

SpectralEstimate power_iteration(const std::function<Vector(const Vector&)>& op,
                                 Index n, const PowerIterationOptions& options) {
  std::mt19937 rng(options.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = dist(rng);
  y.normalize();

  SpectralEstimate est;
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Vector z = op(y);
    const double mu = y.dot(z);
    est.rho = mu;
    est.iterations = it;
    const double znorm = z.norm();
    if (znorm == 0.0) {
      est.converged = true;
      break;
    }
    if ((z - mu * y).norm() <= options.tolerance * std::abs(mu)) {
      est.converged = true;
      break;
    }
    y = z / znorm;
  }
  return est;
}

SpectralEstimate estimate_spectral_radius(const SaddleSystem& system,
                                          const ScalingOperator& scaling,
                                          SmootherKind kind,
                                          const PowerIterationOptions& options) {
  SpectralEstimate est;
  if (kind == SmootherKind::normal_equation) {
    // L^-1 K L^-1 K is similar to (L^-1/2 K L^-1/2)^2, which is symmetric.
    Vector inv_sqrt(system.size());
    inv_sqrt.head(system.nu()) = scaling.d_u.array().rsqrt();
    inv_sqrt.tail(system.np()) = scaling.d_p.array().rsqrt();
    auto k_sym = [&](const Vector& v) {
      Vector w = inv_sqrt.cwiseProduct(v);
      return Vector(inv_sqrt.cwiseProduct(system.apply(w)));
    };
    est = power_iteration([&](const Vector& v) { return k_sym(k_sym(v)); },
                          system.size(), options);
  } else {
    const Vector inv_sqrt = scaling.d_u.array().rsqrt();
    est = power_iteration(
        [&](const Vector& v) {
          return Vector(inv_sqrt.cwiseProduct(system.A * inv_sqrt.cwiseProduct(v)));
        },
        system.nu(), options);
  }
  if (!est.converged)
    std::cerr << "warning: power iteration did not converge in " << est.iterations
              << " iterations; best estimate " << est.rho << '\n';
  return est;
}

UzawaDampingCheck check_uzawa_damping(const SaddleSystem& system,
                                      const ScalingOperator& scaling, double tau,
                                      double sigma, const PowerIterationOptions& options) {
  UzawaDampingCheck check;
  check.velocity_ratio =
      tau * estimate_spectral_radius(system, scaling, SmootherKind::uzawa, options).rho;
  const Vector inv_d_u = scaling.d_u.cwiseInverse();
  const Vector inv_sqrt_p = scaling.d_p.array().rsqrt();
  const SpectralEstimate schur = power_iteration(
      [&](const Vector& v) {
        const Vector w = system.Bt * inv_sqrt_p.cwiseProduct(v);
        return Vector(inv_sqrt_p.cwiseProduct(system.B * inv_d_u.cwiseProduct(w)));
      },
      system.np(), options);
  check.schur_ratio = sigma * tau * schur.rho;
  return check;
}

}  // namespace stokesmg
