#include "hdreg/estimators.hpp"

#include <cmath>
#include <limits>

namespace hdreg {

namespace {

void check_fit_inputs(const Dataset& d) {
  if (!d.x.allFinite() || !d.y.allFinite()) throw InputError("fit: non-finite data");
  if (d.y.size() != d.n()) throw InputError("fit: |y| != n");
}

}  // namespace

CoefficientVector fit_min_norm(const Dataset& d, const SvdFactors& f) {
  check_fit_inputs(d);
  if (f.rank() == 0) throw InputError("fit_min_norm: X has numerical rank 0");
  CoefficientVector cv;
  cv.beta = pinv_apply(f, d.y);
  cv.method = Method::kMinNorm;
  cv.preprocessing = d.preprocessing;
  return cv;
}

CoefficientVector fit_min_norm(const Dataset& d) {
  return fit_min_norm(d, svd_factor(d.x));
}

CoefficientVector fit_ridge(const Dataset& d, const SvdFactors& f, double lambda) {
  check_fit_inputs(d);
  if (!(lambda > 0.0)) throw InputError("fit_ridge: lambda must be positive");
  const Eigen::VectorXd uty = f.u.transpose() * d.y;
  const Eigen::ArrayXd s = f.sigma.array();
  CoefficientVector cv;
  cv.beta = f.v1 * (s / (s.square() + lambda) * uty.array()).matrix();
  cv.method = Method::kRidge;
  cv.hyper.lambda = lambda;
  cv.preprocessing = d.preprocessing;
  return cv;
}

CoefficientVector fit_ridge(const Dataset& d, double lambda) {
  return fit_ridge(d, svd_factor(d.x), lambda);
}

CoefficientVector fit_pcr(const Dataset& d, const SvdFactors& f, int components) {
  check_fit_inputs(d);
  if (components < 1 || components > f.rank())
    throw InputError("fit_pcr: components must be in [1, rank]");
  CoefficientVector cv;
  cv.beta = Eigen::VectorXd::Zero(d.p());
  for (int m = 0; m < components; ++m) {
    // univariate least squares of y on the m-th score X v_m = sigma_m u_m
    const Eigen::VectorXd score = f.sigma[m] * f.u.col(m);
    const double theta = score.dot(d.y) / score.squaredNorm();
    cv.beta += theta * f.v1.col(m);
  }
  cv.method = Method::kPcr;
  cv.hyper.components = components;
  cv.preprocessing = d.preprocessing;
  return cv;
}

std::pair<CoefficientVector, PlsState> fit_pls(const Dataset& d, const SvdFactors& f,
                                               int components) {
  check_fit_inputs(d);
  if (components < 1 || components > f.rank())
    throw InputError("fit_pls: components must be in [1, rank]");
  if (d.y.isZero(0.0)) throw InputError("fit_pls: y is the zero vector");

  const double collapse_tol = 1e-12 * d.x.norm() * d.y.norm();
  Eigen::MatrixXd xm = d.x;
  Eigen::VectorXd yhat = Eigen::VectorXd::Zero(d.n());
  PlsState state;
  for (int m = 0; m < components; ++m) {
    const Eigen::VectorXd z = xm * (xm.transpose() * d.y);
    if (z.norm() <= collapse_tol) throw PlsEarlyTermination(m, components);
    const double theta = z.dot(d.y) / z.squaredNorm();
    yhat += theta * z;
    xm -= z * (z.transpose() * xm) / z.squaredNorm();
    state.z.push_back(z);
    state.theta.push_back(theta);
    state.deflated_norm.push_back(xm.norm());
  }

  CoefficientVector cv;
  cv.beta = pinv_apply(f, yhat);
  cv.method = Method::kPls;
  cv.hyper.components = components;
  cv.preprocessing = d.preprocessing;
  return {std::move(cv), std::move(state)};
}

std::pair<CoefficientVector, PlsState> fit_pls(const Dataset& d, int components) {
  return fit_pls(d, svd_factor(d.x), components);
}

Eigen::VectorXd predict(const CoefficientVector& beta, const Dataset& d,
                        bool allow_provenance_mismatch) {
  if (beta.beta.size() != d.p())
    throw InputError("predict: coefficient length " + std::to_string(beta.beta.size()) +
                     " does not match p=" + std::to_string(d.p()));
  if (!allow_provenance_mismatch) {
    const bool a = static_cast<bool>(beta.preprocessing);
    const bool b = static_cast<bool>(d.preprocessing);
    if (a != b || (a && !beta.preprocessing->equivalent(*d.preprocessing)))
      throw InputError(
          "predict: coefficient/provenance mismatch (fit under a different "
          "preprocessing scheme); pass allow_provenance_mismatch to override");
  }
  Eigen::VectorXd yhat = d.x * beta.beta;
  if (beta.preprocessing) yhat.array() += beta.preprocessing->y_mean;
  return yhat;
}

double orthogonality_defect(const Eigen::VectorXd& beta, const SvdFactors& f) {
  if (beta.size() != f.cols()) throw InputError("orthogonality_defect: dimension mismatch");
  const double norm = beta.norm();
  return (f.v0.transpose() * beta).norm() /
         std::max(norm, std::numeric_limits<double>::min());
}

double orthogonality_defect(const CoefficientVector& beta, const SvdFactors& f) {
  return orthogonality_defect(beta.beta, f);
}

}  // namespace hdreg
