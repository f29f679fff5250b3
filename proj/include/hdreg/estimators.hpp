#pragma once

#include <utility>
#include <vector>

#include "hdreg/svd.hpp"
#include "hdreg/types.hpp"

namespace hdreg {

/// Per-component record of the recursive PLS fit: score vectors z_m, the
/// univariate regression coefficients theta_m, and the Frobenius norm of the
/// deflated matrix after each step.
struct PlsState {
  std::vector<Eigen::VectorXd> z;
  std::vector<double> theta;
  std::vector<double> deflated_norm;
};

struct PlsEarlyTermination : NumericError {
  PlsEarlyTermination(int achieved_components, int requested)
      : NumericError("PLS score collapsed after " + std::to_string(achieved_components) +
                     " of " + std::to_string(requested) + " components"),
        achieved(achieved_components) {}
  int achieved;
};

/// Minimum-norm interpolator beta0 = X^+ y. Expects centered data.
CoefficientVector fit_min_norm(const Dataset& d, const SvdFactors& f);
CoefficientVector fit_min_norm(const Dataset& d);

/// Ridge solution computed in the SVD basis as V1 diag(sigma/(sigma^2+lambda)) U^T y,
/// never forming the p x p inverse. Orthogonal to the nullspace.
CoefficientVector fit_ridge(const Dataset& d, const SvdFactors& f, double lambda);
CoefficientVector fit_ridge(const Dataset& d, double lambda);

/// Principal components regression on the first M right singular vectors.
CoefficientVector fit_pcr(const Dataset& d, const SvdFactors& f, int components);

/// Recursive PLS: z_m = X_{m-1} X_{m-1}^T y, univariate regression of y on
/// z_m, then orthogonalization of the columns of X_{m-1} against z_m. The
/// coefficient vector is the minimum-norm solution of X beta = yhat^(M), so
/// it is orthogonal to the nullspace by construction.
std::pair<CoefficientVector, PlsState> fit_pls(const Dataset& d, const SvdFactors& f,
                                               int components);
std::pair<CoefficientVector, PlsState> fit_pls(const Dataset& d, int components);

/// yhat = X beta, plus the stored y mean when the coefficient vector carries
/// preprocessing provenance. Refuses mismatched provenance unless overridden.
Eigen::VectorXd predict(const CoefficientVector& beta, const Dataset& d,
                        bool allow_provenance_mismatch = false);

/// ||V0^T beta|| / max(||beta||, eps): 0 for vectors orthogonal to the
/// nullspace, 1 for vectors inside it.
double orthogonality_defect(const CoefficientVector& beta, const SvdFactors& f);
double orthogonality_defect(const Eigen::VectorXd& beta, const SvdFactors& f);

}  // namespace hdreg
