#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hdreg/genlasso.hpp"
#include "hdreg/types.hpp"

namespace hdreg {

enum class CvRule { kMin, kOneSe };

const char* to_string(CvRule r);

struct CvResult {
  std::vector<double> grid;     // lambda values, or component counts
  bool integer_grid = false;
  Eigen::MatrixXd fold_errors;  // folds x grid, NaN marks a failed cell
  Eigen::VectorXd mean_curve;
  Eigen::VectorXd std_curve;    // std of fold errors / sqrt(folds)
  double chosen_min = 0.0;
  double chosen_1se = 0.0;
  CvRule rule_used = CvRule::kMin;
  std::vector<std::string> warnings;

  double chosen() const { return rule_used == CvRule::kOneSe ? chosen_1se : chosen_min; }
};

/// Which estimator the CV loop drives. The grid supplies lambda (ridge,
/// fused lasso) or component counts (PCR, PLS).
struct CvEstimator {
  Method method = Method::kRidge;
  PenaltyKind penalty = PenaltyKind::kFirstDifference;
  GenLassoConfig genlasso;
};

/// K-fold cross-validation: seeded shuffle, contiguous split, preprocessing
/// refit inside each training fold, held-out RMSE in the model's response
/// space. Identical seeds give bit-identical results.
CvResult cross_validate(const Dataset& d, const CvEstimator& estimator,
                        const std::vector<double>& grid, int folds, std::uint64_t seed,
                        CvRule rule, Scheme scheme);

/// Fit the estimator on the full dataset at one hyperparameter value.
CoefficientVector fit_at(const Dataset& centered, const CvEstimator& estimator,
                         double hyper);

/// Subset predicate on the original-unit response: lower < y <= upper.
struct SubsetRule {
  std::string name;
  std::optional<double> lower;  // exclusive
  std::optional<double> upper;  // inclusive
  bool contains(double y) const {
    return (!lower || y > *lower) && (!upper || y <= *upper);
  }
};

struct SplitReport {
  std::string split;
  Eigen::Index count = 0;
  std::optional<double> rmse;  // original response units
  struct Subset {
    std::string name;
    Eigen::Index count = 0;
    std::optional<double> rmse;
  };
  std::vector<Subset> subsets;
};

struct EvalReport {
  std::vector<SplitReport> rows;
};

/// RMSE per named split (and per subset), computed after inverting the
/// response transform, so a log-trained model reports errors in original
/// units. Splits are raw datasets; the coefficient vector's preprocessing
/// provenance drives the transform chain.
EvalReport evaluate(const CoefficientVector& beta,
                    const std::vector<std::pair<std::string, Dataset>>& splits,
                    const std::vector<SubsetRule>& subset_rules);

}  // namespace hdreg
