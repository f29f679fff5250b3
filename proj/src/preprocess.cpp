#include "hdreg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hdreg/spline.hpp"

namespace hdreg {

void validate(const Dataset& d) {
  if (!d.x.allFinite()) throw InputError("dataset: non-finite entries in X");
  if (d.y.size() && !d.y.allFinite()) throw InputError("dataset: non-finite entries in y");
  if (d.y.size() && d.y.size() != d.n()) throw InputError("dataset: |y| != n");
  if (!d.sample_ids.empty() && static_cast<Eigen::Index>(d.sample_ids.size()) != d.n())
    throw InputError("dataset: |sample_ids| != n");
  if (d.domain) {
    if (d.domain->size() != d.p()) throw InputError("dataset: |domain| != p");
    const Eigen::VectorXd& g = *d.domain;
    bool inc = true, dec = true;
    for (Eigen::Index i = 1; i < g.size(); ++i) {
      inc = inc && g[i] > g[i - 1];
      dec = dec && g[i] < g[i - 1];
    }
    if (!inc && !dec) throw InputError("dataset: domain grid is not strictly monotone");
  }
}

std::shared_ptr<const PreprocessState> fit_preprocess(const Dataset& d, Scheme scheme) {
  validate(d);
  if (d.n() < 2) throw InputError("fit_preprocess: need n >= 2");
  auto state = std::make_shared<PreprocessState>();
  state->scheme = scheme;
  state->y_transform = d.y_transform;
  state->column_means = d.x.colwise().mean();
  state->y_mean = d.y.size() ? d.y.mean() : 0.0;
  if (scheme == Scheme::kZScore) {
    Eigen::VectorXd stds(d.p());
    for (Eigen::Index j = 0; j < d.p(); ++j) {
      const double m = state->column_means[j];
      stds[j] = std::sqrt((d.x.col(j).array() - m).square().mean());
    }
    const double floor = 1e-12 * stds.maxCoeff();
    for (Eigen::Index j = 0; j < d.p(); ++j)
      if (stds[j] <= floor) throw DegenerateColumnError(j, stds[j]);
    state->column_stds = std::move(stds);
  }
  return state;
}

Dataset apply_preprocess(const std::shared_ptr<const PreprocessState>& state,
                         const Dataset& d) {
  if (!state) throw InputError("apply_preprocess: null state");
  if (state->p() != d.p())
    throw InputError("apply_preprocess: state fit for p=" + std::to_string(state->p()) +
                     ", dataset has p=" + std::to_string(d.p()));
  if (state->y_transform != d.y_transform)
    throw InputError("apply_preprocess: response transform mismatch");
  Dataset out = d;
  out.x.rowwise() -= state->column_means.transpose();
  if (state->column_stds)
    out.x.array().rowwise() /= state->column_stds->transpose().array();
  if (out.y.size()) out.y.array() -= state->y_mean;
  out.preprocessing = state;
  return out;
}

Dataset invert_preprocess(const Dataset& d) {
  if (!d.preprocessing) throw InputError("invert_preprocess: dataset carries no state");
  const PreprocessState& s = *d.preprocessing;
  Dataset out = d;
  if (s.column_stds) out.x.array().rowwise() *= s.column_stds->transpose().array();
  out.x.rowwise() += s.column_means.transpose();
  if (out.y.size()) out.y.array() += s.y_mean;
  out.preprocessing = nullptr;
  return out;
}

Dataset apply_response_transform(Dataset d, ResponseTransform t) {
  if (d.y_transform != ResponseTransform::kNone)
    throw InputError("apply_response_transform: y already transformed");
  if (t == ResponseTransform::kLog10) {
    if ((d.y.array() <= 0.0).any())
      throw InputError("apply_response_transform: log10 requires positive responses");
    d.y = d.y.array().log10();
  }
  d.y_transform = t;
  return d;
}

double invert_response(ResponseTransform t, double y_model) {
  return t == ResponseTransform::kLog10 ? std::pow(10.0, y_model) : y_model;
}

Eigen::VectorXd invert_response(ResponseTransform t, Eigen::VectorXd y_model) {
  if (t == ResponseTransform::kLog10)
    y_model = Eigen::pow(10.0, y_model.array()).matrix();
  return y_model;
}

SnrProfile snr_profile(const Dataset& d, double smooth_target, int degree,
                       bool mean_removed_signal) {
  validate(d);
  if (!d.domain) throw InputError("snr_profile: dataset has no domain grid");
  if (d.n() < 1) throw InputError("snr_profile: empty dataset");
  if (d.p() < degree + 2)
    throw InputError("snr_profile: need p >= degree+2 columns");

  // the smoother wants an increasing grid; reverse a decreasing one
  const Eigen::VectorXd& g = *d.domain;
  const bool reversed = g.size() > 1 && g[1] < g[0];
  Eigen::VectorXd sites = reversed ? g.reverse().eval() : g;
  SplineSmoother smoother(sites, degree);

  const Eigen::Index n = d.n(), p = d.p();
  Eigen::VectorXd signal_power = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd noise_power = Eigen::VectorXd::Zero(p);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd row = d.x.row(i);
    if (reversed) row.reverseInPlace();
    Eigen::VectorXd fit = smoother.fit_rss_target(row, smooth_target);
    Eigen::VectorXd resid = row - fit;
    if (mean_removed_signal) fit.array() -= fit.mean();
    if (reversed) {
      fit.reverseInPlace();
      resid.reverseInPlace();
    }
    signal_power += fit.cwiseAbs2();
    noise_power += resid.cwiseAbs2();
  }
  signal_power /= static_cast<double>(n);
  noise_power /= static_cast<double>(n);

  SnrProfile prof;
  prof.noise_power = noise_power;
  prof.snr_ratio.resize(p);
  prof.snr_db.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    prof.snr_ratio[j] = noise_power[j] > 0.0
                            ? signal_power[j] / noise_power[j]
                            : std::numeric_limits<double>::infinity();
    prof.snr_db[j] = prof.snr_ratio[j] > 0.0 ? 10.0 * std::log10(prof.snr_ratio[j])
                                             : -std::numeric_limits<double>::infinity();
  }
  prof.column_mean = d.x.colwise().mean();
  prof.column_std.resize(p);
  for (Eigen::Index j = 0; j < p; ++j)
    prof.column_std[j] =
        std::sqrt((d.x.col(j).array() - prof.column_mean[j]).square().mean());
  return prof;
}

}  // namespace hdreg
