#pragma once

#include <Eigen/Dense>

#include "crunch/error.hpp"

namespace crunch {

template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using ArrayXX = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Pearson product-moment correlation of the columns of `samples`
// (rows are observations). Columns must have positive variance; callers
// that want a named diagnostic should check variances first.
template <class Derived>
MatrixX<typename Derived::Scalar> pearson_correlation(
    const Eigen::MatrixBase<Derived>& samples) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = samples.rows();
  const Eigen::Index m = samples.cols();
  require(n >= 2, "correlation needs at least 2 observations per series");
  MatrixX<Scalar> centered =
      samples.derived().rowwise() - samples.derived().colwise().mean();
  VectorX<Scalar> norms = centered.colwise().norm();
  for (Eigen::Index j = 0; j < m; ++j) {
    require(norms[j] > Scalar(0), "correlation is undefined for a constant series");
  }
  MatrixX<Scalar> c = centered.transpose() * centered;
  c.array() /= (norms * norms.transpose()).array();
  // Exact unit diagonal and hard [-1, 1] bounds; the products above land
  // within one ulp of both.
  c.diagonal().setOnes();
  c = c.cwiseMin(Scalar(1)).cwiseMax(Scalar(-1));
  // Symmetrize against rounding asymmetry in the GEMM.
  c = ((c + c.transpose()) / Scalar(2)).eval();
  return c;
}

// Elementwise ultrametric embedding d = sqrt(2 (1 - c)) of a correlation
// matrix; returns an expression so callers can fold it into larger ones.
template <class Derived>
auto correlation_to_distance(const Eigen::ArrayBase<Derived>& c) {
  using Scalar = typename Derived::Scalar;
  return ((Scalar(2) * (Scalar(1) - c)).max(Scalar(0))).sqrt();
}

// Cosine similarity between two vectors; all-zero input yields 0.
template <class DerivedA, class DerivedB>
typename DerivedA::Scalar cosine_similarity(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) return Scalar(0);
  const Scalar w = a.dot(b) / (na * nb);
  return std::min(Scalar(1), std::max(Scalar(-1), w));
}

}  // namespace crunch
