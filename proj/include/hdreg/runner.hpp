#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hdreg/model_selection.hpp"
#include "hdreg/nullspace.hpp"
#include "hdreg/synthetic.hpp"
#include "hdreg/types.hpp"

namespace hdreg {

struct CvConfig {
  int folds = 5;
  std::uint64_t seed = 0;
  CvRule rule = CvRule::kOneSe;
};

struct EstimatorConfig {
  std::string id;
  Method method = Method::kMinNorm;
  PenaltyKind penalty = PenaltyKind::kFirstDifference;
  std::optional<double> lambda;
  std::optional<int> components;
  std::vector<double> grid;  // empty = default grid when cv is set
  std::optional<CvConfig> cv;
  GenLassoConfig genlasso;
  bool fuse = false;  // exact-fusion post-step for fused lasso
};

struct BetaTrue {};
struct BetaModel { std::string id; };
struct BetaConstant { double value = 0.0; };
struct BetaFile { std::filesystem::path path; };
using BetaSource = std::variant<BetaTrue, BetaModel, BetaConstant, BetaFile>;

struct NullspaceRequest {
  std::string beta_a_id;
  BetaSource beta_b;
  std::optional<double> c;      // c-driven search
  std::optional<double> gamma;  // fixed gamma
  GammaSearchConfig search;
};

struct SplitConfig {
  std::string name;
  std::filesystem::path csv;
  std::filesystem::path response_csv;
};

struct EvaluateConfig {
  std::vector<SplitConfig> splits;  // the training data is always reported
  std::vector<SubsetRule> subsets;
};

struct SnrConfig {
  double smooth_target = 1e-6;
  int degree = 3;
  bool mean_removed_signal = true;
};

struct DatasetConfig {
  // exactly one source
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> response_csv;
  std::optional<ParabolicSpec> parabolic;
  std::optional<SyntheticResponseSpec> synthetic_response;  // attached to csv X
  ResponseTransform response_transform = ResponseTransform::kNone;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  Scheme scheme = Scheme::kCenterOnly;
  DatasetConfig dataset;
  std::vector<EstimatorConfig> estimators;
  std::optional<NullspaceRequest> nullspace;
  std::optional<EvaluateConfig> evaluate;
  std::optional<SnrConfig> snr;
};

/// Parse and validate a JSON run configuration.
RunConfig load_config(const std::filesystem::path& path);

/// Which stages a CLI verb executes.
struct RunStages {
  bool fit = true;
  bool write_cv = true;
  bool nullspace = true;
  bool evaluate = true;
  bool snr = true;
  bool save_dataset = false;  // `synth` verb: archive the generated data
};

/// Execute the configured workflow and write coefficients.csv, cv_*.csv,
/// nullspace.csv, eval.csv, snr.csv and plots/*.svg under out_dir.
void run(const RunConfig& config, const RunStages& stages = {});

/// Resolved dataset plus the true coefficients when a generator supplied them.
struct LoadedData {
  Dataset raw;  // response-transformed, not centered
  std::optional<CoefficientVector> truth;
};
LoadedData load_dataset(const DatasetConfig& cfg, std::uint64_t default_seed);

}  // namespace hdreg
