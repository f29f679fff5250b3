#pragma once

#include <Eigen/Cholesky>
#include <vector>

#include "hdreg/types.hpp"

namespace hdreg {

/// Structured penalty matrix D of the generalized lasso. Only the identity
/// (plain lasso) and the first-difference matrix D1 (fused lasso) are
/// supported; D1 has p-1 rows of the form (..., 1, -1, ...).
struct PenaltyMatrix {
  PenaltyKind kind = PenaltyKind::kFirstDifference;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  static PenaltyMatrix identity(Eigen::Index p) {
    return {PenaltyKind::kIdentity, p, p};
  }
  static PenaltyMatrix first_difference(Eigen::Index p) {
    return {PenaltyKind::kFirstDifference, p - 1, p};
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& b) const;             // D b
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& z) const;   // D^T z
  Eigen::MatrixXd dense() const;
};

struct GenLassoConfig {
  double eps_abs = 1e-8;
  double eps_rel = 1e-6;
  int max_iterations = 50000;
  double rho = 1.0;
  bool adapt_rho = true;
  // residual balancing stops after this many changes; a fixed penalty from
  // then on is what guarantees convergence
  int rho_adapt_limit = 100;
  bool throw_on_nonconvergence = true;
};

struct GenLassoReport {
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
  std::vector<double> objective;  // 0.5||y-Xb||^2 + lambda||Db||_1 per iteration
  std::vector<double> primal_residuals;  // ||D b - z|| per iteration
};

struct GenLassoNotConverged : NumericError {
  GenLassoNotConverged(CoefficientVector best_iterate, GenLassoReport rep)
      : NumericError("generalized lasso: iteration limit reached without residual "
                     "convergence (primal " + std::to_string(rep.primal_residual) +
                     ", dual " + std::to_string(rep.dual_residual) + ")"),
        best(std::move(best_iterate)),
        report(std::move(rep)) {}
  CoefficientVector best;
  GenLassoReport report;
};

/// ADMM solver for min_b 0.5||y - X b||^2 + lambda ||D b||_1 on the split
/// (b, z = D b). The quadratic-step factorization is cached per rho, so
/// sweeping a lambda grid with warm starts reuses it.
class GenLassoSolver {
 public:
  GenLassoSolver(Eigen::MatrixXd x, Eigen::VectorXd y, PenaltyMatrix d,
                 GenLassoConfig cfg = {});

  /// Warm-started from the previous fit on this solver instance.
  CoefficientVector fit(double lambda);

  const GenLassoReport& last_report() const { return report_; }
  void reset_warm_start();

 private:
  void refactor(double rho);

  Eigen::MatrixXd x_;
  Eigen::VectorXd y_;
  PenaltyMatrix d_;
  GenLassoConfig cfg_;
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  double factored_rho_ = -1.0;
  Eigen::VectorXd beta_, z_, u_;
  bool warm_ = false;
  GenLassoReport report_;
};

CoefficientVector fit_generalized_lasso(const Dataset& d, double lambda,
                                        const PenaltyMatrix& penalty,
                                        const GenLassoConfig& cfg = {},
                                        GenLassoReport* report = nullptr);

/// Optional exact-fusion post-step: average coefficients within runs where
/// consecutive differences are below fusion_tol.
Eigen::VectorXd fuse_runs(const Eigen::VectorXd& beta, double fusion_tol = 1e-8);

/// Log-spaced default grids; the paper names none.
std::vector<double> default_lasso_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       int points = 50);
std::vector<double> default_ridge_grid(double sigma_max, int points = 50);

}  // namespace hdreg
