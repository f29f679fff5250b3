#include "hdreg/nullspace.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hdreg {

const char* to_string(GammaStatus s) {
  switch (s) {
    case GammaStatus::kBoundary: return "boundary";
    case GammaStatus::kAllFeasible: return "all-feasible";
    default: return "no-feasible-relaxation";
  }
}

Eigen::VectorXd project_nullspace(const SvdFactors& f, const Eigen::VectorXd& beta_delta) {
  if (beta_delta.size() != f.cols())
    throw InputError("project_nullspace: dimension mismatch");
  return -(f.v0 * (f.v0.transpose() * beta_delta));
}

Eigen::VectorXd relaxed_nullspace(const SvdFactors& f, const Eigen::VectorXd& beta_delta,
                                  double gamma) {
  if (beta_delta.size() != f.cols())
    throw InputError("relaxed_nullspace: dimension mismatch");
  if (!(gamma >= 0.0)) throw InputError("relaxed_nullspace: gamma must be nonnegative");
  if (std::isinf(gamma)) return project_nullspace(f, beta_delta);
  const Eigen::ArrayXd gs2 = gamma * f.sigma.array().square();
  const Eigen::VectorXd coeffs = (gs2 / (gs2 + 1.0)) * (f.v1.transpose() * beta_delta).array();
  return -beta_delta + f.v1 * coeffs;
}

Eigen::VectorXd relaxed_nullspace(const Eigen::MatrixXd& x, const Eigen::VectorXd& beta_delta,
                                  double gamma) {
  return relaxed_nullspace(svd_factor(x), beta_delta, gamma);
}

double nrmse(const Eigen::VectorXd& y_hat, const Eigen::VectorXd& y) {
  if (y_hat.size() != y.size()) throw InputError("nrmse: length mismatch");
  const Eigen::Index n = y.size();
  if (n < 2) throw InputError("nrmse: need n >= 2");
  const double s = y.maxCoeff() - y.minCoeff();
  if (!(s > 0.0)) throw InputError("nrmse: constant response (range 0)");
  return (y_hat - y).norm() / (s * std::sqrt(static_cast<double>(n)));
}

namespace {

NullspaceComparison make_base(const CoefficientVector& a, const CoefficientVector& b) {
  if (a.beta.size() != b.beta.size())
    throw InputError("nullspace comparison: coefficient length mismatch");
  const bool pa = static_cast<bool>(a.preprocessing), pb = static_cast<bool>(b.preprocessing);
  if (pa && pb && !a.preprocessing->equivalent(*b.preprocessing))
    throw InputError("nullspace comparison: beta_a and beta_b carry different "
                     "preprocessing provenance");
  NullspaceComparison cmp;
  cmp.beta_a = a;
  cmp.beta_b = b;
  cmp.beta_delta = a.beta - b.beta;
  return cmp;
}

}  // namespace

NullspaceComparison compare_fixed_gamma(const Dataset& d, const SvdFactors& f,
                                        const CoefficientVector& beta_a,
                                        const CoefficientVector& beta_b, double gamma) {
  NullspaceComparison cmp = make_base(beta_a, beta_b);
  cmp.gamma = gamma;
  cmp.v = relaxed_nullspace(f, cmp.beta_delta, gamma);
  cmp.nrmse_before = nrmse(d.x * beta_a.beta, d.y);
  cmp.nrmse_after = nrmse(d.x * (beta_a.beta + cmp.v), d.y);
  cmp.constraint_c = std::numeric_limits<double>::quiet_NaN();
  cmp.status = GammaStatus::kBoundary;
  return cmp;
}

NullspaceComparison select_gamma(const Dataset& d, const SvdFactors& f,
                                 const CoefficientVector& beta_a,
                                 const CoefficientVector& beta_b, double c,
                                 const GammaSearchConfig& cfg) {
  if (!(c > 0.0)) throw InputError("select_gamma: c must be positive");
  if (cfg.grid_points < 2) throw InputError("select_gamma: need at least 2 grid points");
  NullspaceComparison cmp = make_base(beta_a, beta_b);
  cmp.constraint_c = c;

  const Eigen::MatrixXd& x_eval = cfg.holdout ? cfg.holdout->x : d.x;
  const Eigen::VectorXd& y_eval = cfg.holdout ? cfg.holdout->y : d.y;
  const double l_base = nrmse(x_eval * beta_a.beta, y_eval);
  cmp.nrmse_before = l_base;

  if (cmp.beta_delta.isZero(0.0)) {
    cmp.gamma = std::numeric_limits<double>::infinity();
    cmp.v = Eigen::VectorXd::Zero(cmp.beta_delta.size());
    cmp.nrmse_after = l_base;
    cmp.status = GammaStatus::kAllFeasible;
    return cmp;
  }

  const double smax2 = f.sigma_max() * f.sigma_max();
  if (!(smax2 > 0.0)) throw InputError("select_gamma: X has rank 0");
  auto delta_l = [&](double gamma) {
    const Eigen::VectorXd v = relaxed_nullspace(f, cmp.beta_delta, gamma);
    return std::abs(nrmse(x_eval * (beta_a.beta + v), y_eval) - l_base);
  };

  // log-spaced grid of nondimensional gamma * sigma_max^2
  std::vector<double> grid(cfg.grid_points);
  const double log_lo = std::log10(cfg.grid_min), log_hi = std::log10(cfg.grid_max);
  for (int i = 0; i < cfg.grid_points; ++i) {
    const double t = static_cast<double>(i) / (cfg.grid_points - 1);
    grid[i] = std::pow(10.0, log_lo + (log_hi - log_lo) * t) / smax2;
  }

  // outermost infeasible grid point (everything above it is feasible)
  int last_infeasible = -1;
  bool top_feasible = false;
  for (int i = cfg.grid_points - 1; i >= 0; --i) {
    if (delta_l(grid[i]) > c) {
      last_infeasible = i;
      break;
    }
    top_feasible = true;
  }

  if (last_infeasible < 0) {
    cmp.gamma = std::numeric_limits<double>::infinity();
    cmp.v = project_nullspace(f, cmp.beta_delta);
    cmp.nrmse_after = nrmse(x_eval * (beta_a.beta + cmp.v), y_eval);
    cmp.status = GammaStatus::kAllFeasible;
    return cmp;
  }
  if (!top_feasible) {
    // even the largest scanned gamma violates the constraint
    cmp.gamma = 0.0;
    cmp.v = Eigen::VectorXd::Zero(cmp.beta_delta.size());
    cmp.nrmse_after = l_base;
    cmp.gamma_infeasible = grid[last_infeasible];
    cmp.delta_l_infeasible = delta_l(grid[last_infeasible]);
    cmp.status = GammaStatus::kNoFeasibleRelaxation;
    return cmp;
  }

  // bisect the infeasible->feasible bracket in log gamma
  double lo = grid[last_infeasible];       // infeasible
  double hi = grid[last_infeasible + 1];   // feasible
  for (int it = 0; it < cfg.bisection_iterations; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (delta_l(mid) <= c)
      hi = mid;
    else
      lo = mid;
  }
  cmp.gamma = hi;
  cmp.v = relaxed_nullspace(f, cmp.beta_delta, hi);
  cmp.nrmse_after = nrmse(x_eval * (beta_a.beta + cmp.v), y_eval);
  cmp.gamma_infeasible = lo;
  cmp.delta_l_infeasible = delta_l(lo);
  cmp.status = GammaStatus::kBoundary;
  return cmp;
}

}  // namespace hdreg
