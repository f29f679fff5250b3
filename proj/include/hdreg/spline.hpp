#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace hdreg {

/// Penalized B-spline smoother on a fixed strictly increasing site grid,
/// with knots at the sites and an integrated-squared-second-derivative
/// penalty. fit_rss_target mirrors residual-target smoothing-spline
/// semantics: it returns the smoothest fit (largest penalty) whose residual
/// sum of squares does not exceed the target.
class SplineSmoother {
 public:
  SplineSmoother(const Eigen::VectorXd& sites, int degree);

  Eigen::Index basis_size() const { return n_basis_; }

  /// Fitted values at the sites for an explicit penalty weight.
  Eigen::VectorXd fit_penalized(const Eigen::VectorXd& values, double penalty) const;

  /// Largest penalty whose RSS <= rss_target, located by bisection in
  /// log-penalty. Throws InputError when even near-interpolation cannot
  /// reach the target.
  Eigen::VectorXd fit_rss_target(const Eigen::VectorXd& values, double rss_target,
                                 double* penalty_out = nullptr) const;

  /// B-spline basis values (or derivative-order deriv values) at x.
  /// Fills the degree+1 non-zero entries and reports their first index.
  void eval_basis(double x, int deriv, Eigen::Index& first, Eigen::VectorXd& out) const;

 private:
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, double penalty) const;

  int degree_;
  Eigen::Index n_basis_;
  Eigen::VectorXd sites_;
  Eigen::VectorXd knots_;
  Eigen::SparseMatrix<double> design_;   // n_sites x n_basis
  Eigen::SparseMatrix<double> gram_;     // N^T N
  Eigen::SparseMatrix<double> penalty_;  // integral of f'' g''
  double penalty_scale_;                 // trace(gram)/trace(penalty)
};

}  // namespace hdreg
