#pragma once

#include <Eigen/Core>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdreg {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DegenerateColumnError : InputError {
  DegenerateColumnError(Eigen::Index col, double std)
      : InputError("column " + std::to_string(col) +
                   " is degenerate under z-scoring (std " + std::to_string(std) + ")"),
        column(col) {}
  Eigen::Index column;
};

enum class Scheme { kCenterOnly, kZScore };

enum class ResponseTransform { kNone, kLog10 };

inline const char* to_string(Scheme s) {
  return s == Scheme::kCenterOnly ? "center" : "zscore";
}

/// Per-column training statistics captured by fit_preprocess. Applying the
/// state to test data reuses these training statistics verbatim.
struct PreprocessState {
  Scheme scheme = Scheme::kCenterOnly;
  Eigen::VectorXd column_means;
  std::optional<Eigen::VectorXd> column_stds;  // present iff z-scored
  double y_mean = 0.0;
  ResponseTransform y_transform = ResponseTransform::kNone;

  Eigen::Index p() const { return column_means.size(); }
  bool equivalent(const PreprocessState& o) const {
    return scheme == o.scheme && y_transform == o.y_transform &&
           column_means == o.column_means && y_mean == o.y_mean &&
           column_stds.has_value() == o.column_stds.has_value() &&
           (!column_stds || *column_stds == *o.column_stds);
  }
};

/// Predictor matrix, response, and optional 1-D domain grid (e.g. voltage).
struct Dataset {
  Eigen::MatrixXd x;  // n x p
  Eigen::VectorXd y;  // n
  std::optional<Eigen::VectorXd> domain;  // p, strictly monotone
  std::vector<std::string> sample_ids;    // empty or length n
  ResponseTransform y_transform = ResponseTransform::kNone;
  std::shared_ptr<const PreprocessState> preprocessing;  // null for raw data

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }
};

void validate(const Dataset& d);

enum class Method { kTrue, kMinNorm, kRidge, kPcr, kPls, kFusedLasso, kCustom };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::kTrue: return "true";
    case Method::kMinNorm: return "min_norm";
    case Method::kRidge: return "ridge";
    case Method::kPcr: return "pcr";
    case Method::kPls: return "pls";
    case Method::kFusedLasso: return "fused_lasso";
    default: return "custom";
  }
}

enum class PenaltyKind { kIdentity, kFirstDifference };

/// Method-specific hyperparameter record; unset fields do not apply.
struct Hyper {
  std::optional<double> lambda;
  std::optional<int> components;
  std::optional<PenaltyKind> penalty;
};

struct CoefficientVector {
  Eigen::VectorXd beta;
  Method method = Method::kCustom;
  Hyper hyper;
  std::shared_ptr<const PreprocessState> preprocessing;
};

}  // namespace hdreg
