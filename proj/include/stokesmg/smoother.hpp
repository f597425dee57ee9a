#pragma once

// Smoothers for the coupled saddle system. Both act on the full vector
// x = (u, p) and are linear fixed-point iterations x' = x + C (rhs - K x).
//
//  * normal equation: C = tau L^-1 K L^-1, L = diag(d_u, d_p)
//  * symmetric Uzawa: velocity predictor, pressure update, velocity
//    corrector from the original velocity, with diagonal A_hat = diag(d_u)
//    and S_hat = diag(d_p).

#include <functional>
#include <string>
#include <string_view>

#include "stokesmg/assembly.hpp"

namespace stokesmg {

enum class ScalingVariant { mass_diag, natural_diag };
enum class SmootherKind { normal_equation, uzawa };

std::string_view to_string(ScalingVariant v);
std::string_view to_string(SmootherKind k);
ScalingVariant parse_scaling(std::string_view s);
SmootherKind parse_smoother(std::string_view s);

/// Diagonal preconditioner L = diag(d_u, d_p).
///   mass_diag:    d_u = (h^-2 + beta) diag(M_U),  d_p = h^-2 (beta + h^-2)^-1 diag(M_P)
///   natural_diag: d_u = diag(A),  d_p = diag(B diag(A)^-1 B^T)
struct ScalingOperator {
  ScalingVariant variant = ScalingVariant::natural_diag;
  Vector d_u;
  Vector d_p;
  double beta = 0.0;
  double h = 0.0;
};

ScalingOperator build_scaling(const SaddleSystem& system, ScalingVariant variant);

struct SmootherConfig {
  SmootherKind kind = SmootherKind::normal_equation;
  double tau = 0.35;
  double sigma = 0.8;  // uzawa only
  ScalingVariant scaling = ScalingVariant::natural_diag;

  static SmootherConfig normal_equation() { return {SmootherKind::normal_equation, 0.35, 0.8}; }
  static SmootherConfig uzawa() { return {SmootherKind::uzawa, 0.8, 0.8}; }
};

Vector normal_equation_step(const SaddleSystem& system, const ScalingOperator& scaling,
                            double tau, const Vector& x, const Vector& rhs);

Vector uzawa_step(const SaddleSystem& system, const ScalingOperator& scaling,
                  double tau, double sigma, const Vector& x, const Vector& rhs);

/// `steps` applications of the configured smoother, in place.
void smooth(const SaddleSystem& system, const ScalingOperator& scaling,
            const SmootherConfig& config, Vector& x, const Vector& rhs, int steps);

struct PowerIterationOptions {
  int max_iterations = 1000;
  double tolerance = 1e-3;  // relative eigen-residual
  unsigned seed = 20240521;
};

struct SpectralEstimate {
  double rho = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of a symmetric positive semidefinite operator of
/// dimension n. Starts from a fixed pseudo-random vector.
SpectralEstimate power_iteration(const std::function<Vector(const Vector&)>& op,
                                 Index n, const PowerIterationOptions& options = {});

/// normal_equation: rho(L^-1 K L^-1 K) with K the saddle operator.
/// uzawa:           rho(A_hat^-1 A), the quantity bounded by tau^-1.
/// Emits a warning on stderr when the power iteration does not converge.
SpectralEstimate estimate_spectral_radius(const SaddleSystem& system,
                                          const ScalingOperator& scaling,
                                          SmootherKind kind,
                                          const PowerIterationOptions& options = {});

/// The two Uzawa damping conditions tau^-1 A_hat >= A and
/// sigma^-1 S_hat >= tau B A_hat^-1 B^T, as generalized eigenvalue ratios
/// (each condition holds iff its ratio is <= 1).
struct UzawaDampingCheck {
  double velocity_ratio = 0.0;  // tau * lambda_max(A_hat^-1 A)
  double schur_ratio = 0.0;     // sigma * tau * lambda_max(S_hat^-1 B A_hat^-1 B^T)
  bool satisfied() const { return velocity_ratio <= 1.0 && schur_ratio <= 1.0; }
};

UzawaDampingCheck check_uzawa_damping(const SaddleSystem& system,
                                      const ScalingOperator& scaling, double tau,
                                      double sigma,
                                      const PowerIterationOptions& options = {});

}  // namespace stokesmg
