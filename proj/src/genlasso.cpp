#include "hdreg/genlasso.hpp"

#include <cmath>

namespace hdreg {

Eigen::VectorXd PenaltyMatrix::apply(const Eigen::VectorXd& b) const {
  if (b.size() != cols) throw InputError("PenaltyMatrix: dimension mismatch");
  if (kind == PenaltyKind::kIdentity) return b;
  return b.head(cols - 1) - b.tail(cols - 1);
}

Eigen::VectorXd PenaltyMatrix::apply_transpose(const Eigen::VectorXd& z) const {
  if (z.size() != rows) throw InputError("PenaltyMatrix: dimension mismatch");
  if (kind == PenaltyKind::kIdentity) return z;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(cols);
  out.head(cols - 1) += z;
  out.tail(cols - 1) -= z;
  return out;
}

Eigen::MatrixXd PenaltyMatrix::dense() const {
  if (kind == PenaltyKind::kIdentity) return Eigen::MatrixXd::Identity(rows, cols);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    d(i, i) = 1.0;
    d(i, i + 1) = -1.0;
  }
  return d;
}

namespace {

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

GenLassoSolver::GenLassoSolver(Eigen::MatrixXd x, Eigen::VectorXd y, PenaltyMatrix d,
                               GenLassoConfig cfg)
    : x_(std::move(x)), y_(std::move(y)), d_(d), cfg_(cfg) {
  if (d_.cols != x_.cols()) throw InputError("GenLassoSolver: D.cols != p");
  if (y_.size() != x_.rows()) throw InputError("GenLassoSolver: |y| != n");
  xtx_ = x_.transpose() * x_;
  xty_ = x_.transpose() * y_;
  reset_warm_start();
}

void GenLassoSolver::reset_warm_start() {
  beta_ = Eigen::VectorXd::Zero(x_.cols());
  z_ = Eigen::VectorXd::Zero(d_.rows);
  u_ = Eigen::VectorXd::Zero(d_.rows);
  warm_ = false;
}

void GenLassoSolver::refactor(double rho) {
  if (rho == factored_rho_) return;
  Eigen::MatrixXd a = xtx_;
  if (d_.kind == PenaltyKind::kIdentity) {
    a.diagonal().array() += rho;
  } else {
    // D1^T D1 is the tridiagonal second-difference matrix
    const Eigen::Index p = d_.cols;
    a.diagonal().array() += 2.0 * rho;
    a(0, 0) -= rho;
    a(p - 1, p - 1) -= rho;
    for (Eigen::Index i = 0; i + 1 < p; ++i) {
      a(i, i + 1) -= rho;
      a(i + 1, i) -= rho;
    }
  }
  llt_.compute(a);
  if (llt_.info() != Eigen::Success)
    throw NumericError("GenLassoSolver: quadratic step factorization failed");
  factored_rho_ = rho;
}

CoefficientVector GenLassoSolver::fit(double lambda) {
  if (!(lambda > 0.0)) throw InputError("generalized lasso: lambda must be positive");
  const Eigen::Index p = x_.cols();
  const Eigen::Index m = d_.rows;
  double rho = factored_rho_ > 0.0 ? factored_rho_ : cfg_.rho;
  refactor(rho);

  report_ = GenLassoReport{};
  report_.objective.reserve(256);
  auto objective = [&](const Eigen::VectorXd& b) {
    return 0.5 * (y_ - x_ * b).squaredNorm() + lambda * d_.apply(b).lpNorm<1>();
  };

  const double sqrt_m = std::sqrt(static_cast<double>(m));
  const double sqrt_p = std::sqrt(static_cast<double>(p));
  int rho_changes = 0;
  int it = 0;
  for (; it < cfg_.max_iterations; ++it) {
    beta_ = llt_.solve(xty_ + rho * d_.apply_transpose(z_ - u_));
    const Eigen::VectorXd db = d_.apply(beta_);
    const Eigen::VectorXd z_old = z_;
    const double thresh = lambda / rho;
    z_ = (db + u_).unaryExpr([thresh](double v) { return soft_threshold(v, thresh); });
    u_ += db - z_;

    report_.objective.push_back(objective(beta_));
    report_.primal_residuals.push_back((db - z_).norm());
    const double r_norm = (db - z_).norm();
    const double s_norm = rho * d_.apply_transpose(z_ - z_old).norm();
    const double eps_pri =
        sqrt_m * cfg_.eps_abs + cfg_.eps_rel * std::max(db.norm(), z_.norm());
    const double eps_dual =
        sqrt_p * cfg_.eps_abs + cfg_.eps_rel * rho * d_.apply_transpose(u_).norm();
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      report_.converged = true;
      report_.primal_residual = r_norm;
      report_.dual_residual = s_norm;
      ++it;
      break;
    }
    report_.primal_residual = r_norm;
    report_.dual_residual = s_norm;

    // residual balancing; checked sparsely because a rho change refactors
    if (cfg_.adapt_rho && rho_changes < cfg_.rho_adapt_limit && (it + 1) % 10 == 0) {
      if (r_norm > 10.0 * s_norm) {
        rho *= 2.0;
        u_ /= 2.0;
        refactor(rho);
        ++rho_changes;
      } else if (s_norm > 10.0 * r_norm) {
        rho /= 2.0;
        u_ *= 2.0;
        refactor(rho);
        ++rho_changes;
      }
    }
  }
  report_.iterations = it;
  warm_ = true;

  CoefficientVector cv;
  cv.beta = beta_;
  cv.method = d_.kind == PenaltyKind::kIdentity ? Method::kCustom : Method::kFusedLasso;
  cv.hyper.lambda = lambda;
  cv.hyper.penalty = d_.kind;
  if (!report_.converged && cfg_.throw_on_nonconvergence)
    throw GenLassoNotConverged(std::move(cv), report_);
  return cv;
}

CoefficientVector fit_generalized_lasso(const Dataset& d, double lambda,
                                        const PenaltyMatrix& penalty,
                                        const GenLassoConfig& cfg, GenLassoReport* report) {
  GenLassoSolver solver(d.x, d.y, penalty, cfg);
  CoefficientVector cv = solver.fit(lambda);
  cv.preprocessing = d.preprocessing;
  if (report) *report = solver.last_report();
  return cv;
}

Eigen::VectorXd fuse_runs(const Eigen::VectorXd& beta, double fusion_tol) {
  Eigen::VectorXd out = beta;
  Eigen::Index start = 0;
  while (start < beta.size()) {
    Eigen::Index stop = start + 1;
    while (stop < beta.size() && std::abs(beta[stop] - beta[stop - 1]) <= fusion_tol) ++stop;
    const double mean = beta.segment(start, stop - start).mean();
    out.segment(start, stop - start).setConstant(mean);
    start = stop;
  }
  return out;
}

std::vector<double> default_lasso_grid(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                       int points) {
  const double scale = (x.transpose() * y).cwiseAbs().maxCoeff() / x.rows();
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid[i] = scale * std::pow(10.0, -4.0 + 6.0 * t);  // [1e-4, 1e2] * scale
  }
  return grid;
}

std::vector<double> default_ridge_grid(double sigma_max, int points) {
  const double scale = sigma_max * sigma_max;
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
    grid[i] = scale * std::pow(10.0, -6.0 + 10.0 * t);  // [1e-6, 1e4] * scale
  }
  return grid;
}

}  // namespace hdreg
