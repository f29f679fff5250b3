#pragma once

#include "hdreg/svd.hpp"
#include "hdreg/types.hpp"

namespace hdreg {

enum class GammaStatus {
  kBoundary,              // finite gamma at the outermost feasibility boundary
  kAllFeasible,           // constraint never binds; +inf sentinel, v = v*
  kNoFeasibleRelaxation,  // no scanned gamma satisfies the constraint
};

const char* to_string(GammaStatus s);

/// Result of comparing two coefficient vectors through the nullspace.
struct NullspaceComparison {
  CoefficientVector beta_a;
  CoefficientVector beta_b;
  Eigen::VectorXd beta_delta;  // beta_a - beta_b, exactly
  double gamma = 0.0;          // +inf sentinel when status == kAllFeasible
  Eigen::VectorXd v;           // v_gamma, or v* for the sentinel
  double nrmse_before = 0.0;   // L(X beta_a, y)
  double nrmse_after = 0.0;    // L(X (beta_a + v), y)
  double constraint_c = 0.0;
  GammaStatus status = GammaStatus::kBoundary;
  // bracketing certificate for kBoundary: the adjacent infeasible gamma and
  // its constraint violation
  double gamma_infeasible = 0.0;
  double delta_l_infeasible = 0.0;
};

struct GammaSearchConfig {
  // nondimensional grid bounds: gamma = value / sigma_max^2
  double grid_min = 1e-8;
  double grid_max = 1e12;
  int grid_points = 200;
  int bisection_iterations = 30;
  // evaluate feasibility on this set instead of the training data
  const Dataset* holdout = nullptr;
};

/// Exact projection of -beta_delta onto the nullspace: v* = -V0 V0^T beta_delta.
/// X v* = 0 and v* minimizes ||beta_delta + v|| over v in N(X).
Eigen::VectorXd project_nullspace(const SvdFactors& f, const Eigen::VectorXd& beta_delta);

/// Relaxed projection v_gamma = -(gamma X^T X + I)^{-1} beta_delta, computed
/// in the SVD basis as -beta_delta + V1 diag(g s^2/(g s^2+1)) V1^T beta_delta.
/// gamma = 0 returns -beta_delta exactly; gamma -> inf converges to v*.
Eigen::VectorXd relaxed_nullspace(const SvdFactors& f, const Eigen::VectorXd& beta_delta,
                                  double gamma);
Eigen::VectorXd relaxed_nullspace(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_delta,
                                  double gamma);

/// L(yhat, y) = ||yhat - y|| / (s sqrt(n)) with s = max y - min y.
double nrmse(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y);

/// Locate the binding gamma of the NRMSE constraint |L(X(beta_a + v_gamma))
/// - L(X beta_a)| <= c. The constraint is loose for large gamma (v_gamma
/// approaches the nullspace) and generally violated for small gamma, so the
/// scan walks the log grid for the outermost infeasible point and bisects the
/// infeasible-to-feasible bracket above it, returning the feasible end. When
/// every grid point is feasible the +inf sentinel with v = v* is returned.
NullspaceComparison select_gamma(const Dataset& d, const SvdFactors& f,
                                 const CoefficientVector& beta_a,
                                 const CoefficientVector& beta_b, double c,
                                 const GammaSearchConfig& cfg = {});

/// Comparison at a fixed, externally chosen gamma (+inf selects v*).
NullspaceComparison compare_fixed_gamma(const Dataset& d, const SvdFactors& f,
                                        const CoefficientVector& beta_a,
                                        const CoefficientVector& beta_b, double gamma);

}  // namespace hdreg
