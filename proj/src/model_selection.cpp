#include "hdreg/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hdreg/estimators.hpp"
#include "hdreg/preprocess.hpp"
#include "hdreg/rng.hpp"
#include "hdreg/svd.hpp"

namespace hdreg {

const char* to_string(CvRule r) { return r == CvRule::kMin ? "min" : "one-se"; }

CoefficientVector fit_at(const Dataset& centered, const CvEstimator& estimator,
                         double hyper) {
  switch (estimator.method) {
    case Method::kRidge:
      return fit_ridge(centered, hyper);
    case Method::kPcr: {
      SvdFactors f = svd_factor(centered.x);
      return fit_pcr(centered, f, static_cast<int>(std::lround(hyper)));
    }
    case Method::kPls:
      return fit_pls(centered, static_cast<int>(std::lround(hyper))).first;
    case Method::kFusedLasso: {
      PenaltyMatrix d = estimator.penalty == PenaltyKind::kIdentity
                            ? PenaltyMatrix::identity(centered.p())
                            : PenaltyMatrix::first_difference(centered.p());
      return fit_generalized_lasso(centered, hyper, d, estimator.genlasso);
    }
    case Method::kMinNorm:
      return fit_min_norm(centered);
    default:
      throw InputError("fit_at: estimator not usable here");
  }
}

namespace {

bool integer_grid(Method m) { return m == Method::kPcr || m == Method::kPls; }

// larger lambda, or fewer components, is the more regularized direction
bool more_regularized(Method m, double a, double b) {
  return integer_grid(m) ? a < b : a > b;
}

}  // namespace

CvResult cross_validate(const Dataset& d, const CvEstimator& estimator,
                        const std::vector<double>& grid, int folds, std::uint64_t seed,
                        CvRule rule, Scheme scheme) {
  const Eigen::Index n = d.n();
  if (grid.empty()) throw InputError("cross_validate: empty grid");
  if (folds < 2 || folds > n) throw InputError("cross_validate: folds must be in [2, n]");
  if (integer_grid(estimator.method))
    for (double g : grid)
      if (g < 1.0 || g != std::floor(g))
        throw InputError("cross_validate: component grid must hold positive integers");

  // seeded shuffle, then contiguous split
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Philox4x32 rng(seed);
  shuffle(order, rng);

  const Eigen::Index g = static_cast<Eigen::Index>(grid.size());
  constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
  Eigen::MatrixXd fold_errors = Eigen::MatrixXd::Constant(folds, g, kNan);
  std::vector<std::string> warnings;

  Eigen::Index start = 0;
  for (int k = 0; k < folds; ++k) {
    const Eigen::Index size = n / folds + (k < n % folds ? 1 : 0);
    std::vector<Eigen::Index> test(order.begin() + start, order.begin() + start + size);
    start += size;
    std::vector<Eigen::Index> train;
    train.reserve(n - size);
    for (Eigen::Index i : order)
      if (std::find(test.begin(), test.end(), i) == test.end()) train.push_back(i);
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());

    Dataset dtr;
    dtr.x = d.x(train, Eigen::all);
    dtr.y = d.y(train);
    dtr.y_transform = d.y_transform;
    Dataset dte;
    dte.x = d.x(test, Eigen::all);
    dte.y = d.y(test);
    dte.y_transform = d.y_transform;

    auto state = fit_preprocess(dtr, scheme);
    Dataset ctr = apply_preprocess(state, dtr);
    Dataset cte = apply_preprocess(state, dte);

    std::optional<GenLassoSolver> solver;
    if (estimator.method == Method::kFusedLasso)
      solver.emplace(ctr.x, ctr.y,
                     estimator.penalty == PenaltyKind::kIdentity
                         ? PenaltyMatrix::identity(ctr.p())
                         : PenaltyMatrix::first_difference(ctr.p()),
                     estimator.genlasso);

    std::optional<SvdFactors> factors;
    if (estimator.method == Method::kRidge || estimator.method == Method::kPcr ||
        estimator.method == Method::kPls)
      factors = svd_factor(ctr.x);

    for (Eigen::Index j = 0; j < g; ++j) {
      try {
        CoefficientVector beta;
        switch (estimator.method) {
          case Method::kRidge:
            beta = fit_ridge(ctr, *factors, grid[j]);
            break;
          case Method::kPcr:
            beta = fit_pcr(ctr, *factors, static_cast<int>(std::lround(grid[j])));
            break;
          case Method::kPls:
            beta = fit_pls(ctr, *factors, static_cast<int>(std::lround(grid[j]))).first;
            break;
          case Method::kFusedLasso:
            beta = solver->fit(grid[j]);
            beta.preprocessing = ctr.preprocessing;
            break;
          default:
            throw InputError("cross_validate: estimator has no hyperparameter grid");
        }
        const Eigen::VectorXd yhat = cte.x * beta.beta;  // centered response space
        fold_errors(k, j) = std::sqrt((yhat - cte.y).squaredNorm() / cte.n());
      } catch (const InputError& e) {
        warnings.push_back("fold " + std::to_string(k) + ", grid[" + std::to_string(j) +
                           "]: " + e.what());
      } catch (const NumericError& e) {
        warnings.push_back("fold " + std::to_string(k) + ", grid[" + std::to_string(j) +
                           "]: " + e.what());
      }
    }
  }

  // drop grid values that failed in every fold
  CvResult res;
  res.rule_used = rule;
  res.integer_grid = integer_grid(estimator.method);
  res.warnings = std::move(warnings);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < g; ++j)
    if (!fold_errors.col(j).array().isNaN().all())
      keep.push_back(j);
    else
      res.warnings.push_back("grid[" + std::to_string(j) + "] = " +
                             std::to_string(grid[j]) + " failed in all folds; dropped");
  if (keep.empty()) throw NumericError("cross_validate: every grid value failed");

  res.grid.reserve(keep.size());
  for (Eigen::Index j : keep) res.grid.push_back(grid[j]);
  res.fold_errors = fold_errors(Eigen::all, keep);
  const Eigen::Index gk = static_cast<Eigen::Index>(keep.size());
  res.mean_curve.resize(gk);
  res.std_curve.resize(gk);
  for (Eigen::Index j = 0; j < gk; ++j) {
    std::vector<double> vals;
    for (int k = 0; k < folds; ++k)
      if (!std::isnan(res.fold_errors(k, j))) vals.push_back(res.fold_errors(k, j));
    const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / vals.size();
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var = vals.size() > 1 ? var / (vals.size() - 1) : 0.0;
    res.mean_curve[j] = mean;
    res.std_curve[j] = std::sqrt(var) / std::sqrt(static_cast<double>(folds));
  }

  // argmin with ties broken toward more regularization
  Eigen::Index jmin = 0;
  for (Eigen::Index j = 1; j < gk; ++j) {
    if (res.mean_curve[j] < res.mean_curve[jmin] ||
        (res.mean_curve[j] == res.mean_curve[jmin] &&
         more_regularized(estimator.method, res.grid[j], res.grid[jmin])))
      jmin = j;
  }
  res.chosen_min = res.grid[jmin];

  const double threshold = res.mean_curve[jmin] + res.std_curve[jmin];
  Eigen::Index j1se = jmin;
  for (Eigen::Index j = 0; j < gk; ++j) {
    if (res.mean_curve[j] <= threshold &&
        more_regularized(estimator.method, res.grid[j], res.grid[j1se]))
      j1se = j;
  }
  res.chosen_1se = res.grid[j1se];
  return res;
}

EvalReport evaluate(const CoefficientVector& beta,
                    const std::vector<std::pair<std::string, Dataset>>& splits,
                    const std::vector<SubsetRule>& subset_rules) {
  if (!beta.preprocessing)
    throw InputError("evaluate: coefficient vector carries no preprocessing provenance");
  const PreprocessState& state = *beta.preprocessing;

  EvalReport report;
  for (const auto& [name, raw] : splits) {
    validate(raw);
    if (raw.y.size() != raw.n()) throw InputError("evaluate: split '" + name + "' has no response");
    Dataset transformed = apply_response_transform(raw, state.y_transform);
    Dataset prepared = apply_preprocess(beta.preprocessing, transformed);
    const Eigen::VectorXd yhat_model = predict(beta, prepared);
    const Eigen::VectorXd yhat = invert_response(state.y_transform, yhat_model);

    SplitReport row;
    row.split = name;
    row.count = raw.n();
    auto rmse_over = [&](const std::vector<Eigen::Index>& idx) -> std::optional<double> {
      if (idx.empty()) return std::nullopt;
      double acc = 0.0;
      for (Eigen::Index i : idx) acc += (yhat[i] - raw.y[i]) * (yhat[i] - raw.y[i]);
      return std::sqrt(acc / idx.size());
    };
    std::vector<Eigen::Index> all(raw.n());
    std::iota(all.begin(), all.end(), Eigen::Index{0});
    row.rmse = rmse_over(all);
    for (const SubsetRule& rule : subset_rules) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index i = 0; i < raw.n(); ++i)
        if (rule.contains(raw.y[i])) idx.push_back(i);
      row.subsets.push_back({rule.name, static_cast<Eigen::Index>(idx.size()), rmse_over(idx)});
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace hdreg
