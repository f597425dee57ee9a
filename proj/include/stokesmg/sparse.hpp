#pragma once

// Thin sparse/dense linear algebra layer over Eigen. Matrices are stored in
// compressed-row form; every entry point checks dimensions and throws
// ContractViolation on mismatch instead of relying on Eigen's asserts.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stokesmg/errors.hpp"

namespace stokesmg {

using Index = Eigen::Index;

template <typename Scalar>
using SparseMatrixT = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, Index>;
template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using DenseMatrixT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using TripletsT = std::vector<Eigen::Triplet<Scalar, Index>>;

using SparseMatrix = SparseMatrixT<double>;
using Vector = VectorT<double>;
using DenseMatrix = DenseMatrixT<double>;
using Triplets = TripletsT<double>;

namespace detail {

inline std::string dims(Index r, Index c) {
  std::ostringstream os;
  os << r << 'x' << c;
  return os.str();
}

}  // namespace detail

/// Finalizes a coordinate buffer into compressed rows; duplicates are summed.
template <typename Scalar>
SparseMatrixT<Scalar> from_triplets(Index rows, Index cols,
                                    const TripletsT<Scalar>& triplets) {
  for (const auto& t : triplets) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols)
      throw ContractViolation("triplet (" + std::to_string(t.row()) + "," +
                              std::to_string(t.col()) + ") outside " +
                              detail::dims(rows, cols));
  }
  SparseMatrixT<Scalar> m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

template <typename Scalar>
VectorT<Scalar> matvec(const SparseMatrixT<Scalar>& m,
                       const VectorT<Scalar>& x) {
  if (m.cols() != x.size())
    throw ContractViolation("matvec: matrix " + detail::dims(m.rows(), m.cols()) +
                            " applied to vector of size " +
                            std::to_string(x.size()));
  return m * x;
}

template <typename Scalar>
SparseMatrixT<Scalar> transpose(const SparseMatrixT<Scalar>& m) {
  SparseMatrixT<Scalar> t = m.transpose();
  t.makeCompressed();
  return t;
}

/// R * A * P as an exact sparse product.
template <typename Scalar>
SparseMatrixT<Scalar> triple_product(const SparseMatrixT<Scalar>& r,
                                     const SparseMatrixT<Scalar>& a,
                                     const SparseMatrixT<Scalar>& p) {
  if (r.cols() != a.rows() || a.cols() != p.rows())
    throw ContractViolation("triple_product: cannot chain " +
                            detail::dims(r.rows(), r.cols()) + " * " +
                            detail::dims(a.rows(), a.cols()) + " * " +
                            detail::dims(p.rows(), p.cols()));
  SparseMatrixT<Scalar> ap = (a * p).pruned();
  SparseMatrixT<Scalar> rap = (r * ap).pruned();
  rap.makeCompressed();
  return rap;
}

template <typename Scalar>
Scalar max_abs(const SparseMatrixT<Scalar>& m) {
  Scalar v = 0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (typename SparseMatrixT<Scalar>::InnerIterator it(m, k); it; ++it)
      v = std::max(v, std::abs(it.value()));
  return v;
}

/// Full-pivoting LU of a small dense matrix; used for the coarsest level.
template <typename Scalar>
class DenseFactorizationT {
 public:
  explicit DenseFactorizationT(const DenseMatrixT<Scalar>& m) {
    if (m.rows() != m.cols())
      throw ContractViolation("dense factorization of non-square " +
                              detail::dims(m.rows(), m.cols()) + " matrix");
    lu_.setThreshold(Scalar(1e-13));
    lu_.compute(m);
    if (!lu_.isInvertible())
      throw SingularMatrixError("dense factorization: matrix of size " +
                                std::to_string(m.rows()) + " has rank " +
                                std::to_string(lu_.rank()));
  }

  Index size() const { return lu_.rows(); }

  VectorT<Scalar> solve(const VectorT<Scalar>& b) const {
    if (b.size() != lu_.rows())
      throw ContractViolation("dense solve: rhs of size " +
                              std::to_string(b.size()) + " for system of size " +
                              std::to_string(lu_.rows()));
    return lu_.solve(b);
  }

 private:
  Eigen::FullPivLU<DenseMatrixT<Scalar>> lu_;
};

using DenseFactorization = DenseFactorizationT<double>;

template <typename Scalar>
VectorT<Scalar> dense_solve(const DenseMatrixT<Scalar>& m,
                            const VectorT<Scalar>& b) {
  return DenseFactorizationT<Scalar>(m).solve(b);
}

/// MatrixMarket coordinate dump (1-based indices).
template <typename Scalar>
void write_matrix_market(std::ostream& os, const SparseMatrixT<Scalar>& m) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  os.precision(17);
  for (Index k = 0; k < m.outerSize(); ++k)
    for (typename SparseMatrixT<Scalar>::InnerIterator it(m, k); it; ++it)
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

}  // namespace stokesmg
