#pragma once

// Canonical intergrid transfer between nested Taylor-Hood spaces. The
// prolongation evaluates coarse shape functions at fine nodes; the
// restriction is its transpose.

#include "stokesmg/assembly.hpp"
#include "stokesmg/sparse.hpp"

namespace stokesmg {

struct TransferOperators {
  SparseMatrix P_u;  // fine interior velocity x coarse interior velocity
  SparseMatrix P_p;  // fine pressure x coarse pressure
  SparseMatrix R_u;  // P_u^T
  SparseMatrix R_p;  // P_p^T

  Index coarse_size() const { return P_u.cols() + P_p.cols(); }
  Index fine_size() const { return P_u.rows() + P_p.rows(); }
};

/// Requires fine.mesh() == refine(coarse.mesh()).
TransferOperators build_prolongation(const TaylorHoodSpace& coarse,
                                     const TaylorHoodSpace& fine);

Vector prolongate(const TransferOperators& t, const Vector& coarse);
Vector restrict_residual(const TransferOperators& t, const Vector& fine);

}  // namespace stokesmg
