#pragma once

#include <Eigen/Core>

namespace hdreg {

/// Partitioned SVD X = U diag(sigma) V1^T with an explicit orthonormal basis
/// V0 of the numerical nullspace. V = [V1 V0] is orthogonal; every nullspace
/// operation reuses the cached V0, so the full V is computed eagerly once.
struct SvdFactors {
  Eigen::MatrixXd u;       // n x r
  Eigen::VectorXd sigma;   // r, nonincreasing, all > rank_tolerance
  Eigen::MatrixXd v1;      // p x r, row-space basis
  Eigen::MatrixXd v0;      // p x (p - r), nullspace basis
  double rank_tolerance = 0.0;  // absolute sigma cutoff actually applied

  Eigen::Index rank() const { return sigma.size(); }
  Eigen::Index rows() const { return u.rows(); }
  Eigen::Index cols() const { return v1.rows(); }
  double sigma_max() const { return sigma.size() ? sigma(0) : 0.0; }
};

/// Factor X with numerical rank r = #{sigma_i > rtol * sigma_max}.
/// rtol < 0 selects the default max(n, p) * machine epsilon.
/// Right singular vectors are sign-fixed (largest-magnitude entry positive)
/// so results are reproducible across platforms.
SvdFactors svd_factor(const Eigen::MatrixXd& x, double rtol = -1.0);

/// Minimum-norm solution beta0 = V1 diag(1/sigma) U^T y of X beta = y.
/// beta0 is orthogonal to span(V0).
Eigen::VectorXd pinv_apply(const SvdFactors& f, const Eigen::VectorXd& y);

}  // namespace hdreg
