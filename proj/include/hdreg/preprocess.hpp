#pragma once

#include <memory>

#include "hdreg/types.hpp"

namespace hdreg {

/// Per-column signal-to-noise estimate over the domain grid. The signal is a
/// penalized-spline fit per row; the deviation from the spline is treated as
/// noise.
struct SnrProfile {
  Eigen::VectorXd snr_db;
  Eigen::VectorXd snr_ratio;
  Eigen::VectorXd noise_power;
  Eigen::VectorXd column_mean;
  Eigen::VectorXd column_std;
};

/// Capture per-column mean (and std under z-scoring) of the training data.
/// Population std (divide by n); a column std at or below
/// 1e-12 * max_j std_j raises DegenerateColumnError under z-scoring.
std::shared_ptr<const PreprocessState> fit_preprocess(const Dataset& d, Scheme scheme);

/// Transform a copy of d with training statistics reused verbatim.
Dataset apply_preprocess(const std::shared_ptr<const PreprocessState>& state,
                         const Dataset& d);

/// Undo the column transform and y centering (not the response transform).
Dataset invert_preprocess(const Dataset& d);

/// Replace y by its transformed value (e.g. log10 cycle life) and record the
/// transform on the dataset. Applied before any centering.
Dataset apply_response_transform(Dataset d, ResponseTransform t);

double invert_response(ResponseTransform t, double y_model);
Eigen::VectorXd invert_response(ResponseTransform t, Eigen::VectorXd y_model);

/// Spline-based SNR estimate. smooth_target is the per-row residual sum of
/// squares the spline fit is driven to; mean_removed_signal selects whether
/// signal power excludes the per-row spline mean (default) or keeps the raw
/// offset.
SnrProfile snr_profile(const Dataset& d, double smooth_target, int degree = 3,
                       bool mean_removed_signal = true);

}  // namespace hdreg
