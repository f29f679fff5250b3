#pragma once

#include <Eigen/Dense>

#include "hdreg/rng.hpp"
#include "hdreg/types.hpp"

namespace hdreg::testing {

inline Eigen::MatrixXd random_matrix(Philox4x32& rng, Eigen::Index n, Eigen::Index p) {
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.next_normal();
  return x;
}

inline Eigen::VectorXd random_vector(Philox4x32& rng, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_normal();
  return v;
}

inline Dataset make_dataset(Eigen::MatrixXd x, Eigen::VectorXd y) {
  Dataset d;
  d.x = std::move(x);
  d.y = std::move(y);
  return d;
}

/// Center columns of X and y in place (plain helper for fit preconditions).
inline Dataset centered_dataset(Eigen::MatrixXd x, Eigen::VectorXd y) {
  x.rowwise() -= x.colwise().mean().eval();
  y.array() -= y.mean();
  return make_dataset(std::move(x), std::move(y));
}

/// Independent nullspace basis via full-pivot Householder QR of X^T: the
/// trailing columns of Q complement the row space.
inline Eigen::MatrixXd qr_nullspace(const Eigen::MatrixXd& x) {
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(x.transpose());
  const Eigen::Index r = qr.rank();
  Eigen::MatrixXd q = qr.matrixQ();
  return q.rightCols(x.cols() - r);
}

/// Dense KKT solve of min ||beta_delta + v||^2 s.t. X v = 0:
///   [ I  X^T ] [ v      ]   [ -beta_delta ]
///   [ X  0   ] [ lambda ] = [ 0           ]
inline Eigen::VectorXd kkt_projection(const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& beta_delta) {
  const Eigen::Index n = x.rows(), p = x.cols();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + p, n + p);
  kkt.topLeftCorner(p, p).setIdentity();
  kkt.topRightCorner(p, n) = x.transpose();
  kkt.bottomLeftCorner(n, p) = x;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + p);
  rhs.head(p) = -beta_delta;
  return kkt.partialPivLu().solve(rhs).head(p);
}

/// Ridge through the explicit normal equations (X^T X + lambda I)^{-1} X^T y.
inline Eigen::VectorXd dense_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                   double lambda) {
  Eigen::MatrixXd a = x.transpose() * x;
  a.diagonal().array() += lambda;
  return a.ldlt().solve(x.transpose() * y);
}

}  // namespace hdreg::testing
