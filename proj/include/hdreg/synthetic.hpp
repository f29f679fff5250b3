#pragma once

#include <cstdint>
#include <utility>

#include "hdreg/rng.hpp"
#include "hdreg/types.hpp"

namespace hdreg {

/// How a target SNR value is read and how signal power is measured.
/// decibel: the snr field is in dB (ratio 10^(snr/10)); otherwise it is the
/// power ratio itself. mean_removed: signal power excludes the signal mean.
struct NoiseConvention {
  bool decibel = true;
  bool mean_removed = false;
};

/// Parabolic rows x_i = a_i * (d o d) over d = 1.0, 1.01, ..., 3.0 with
/// a_i ~ N(mu, sigma^2), response y* = X* beta* with constant beta* = 1/p,
/// then white Gaussian noise scaled to the target SNRs.
struct ParabolicSpec {
  int n = 50;
  double domain_start = 1.0;
  double domain_step = 0.01;
  double domain_end = 3.0;
  double mu = 0.3;
  double sigma = 0.3;
  double snr_x = 50.0;  // +inf = noiseless
  double snr_y = 50.0;
  NoiseConvention convention;
  std::uint64_t seed = 0;
};

enum class ResponseKind {
  kConstant,    // beta*_j = 1/p
  kColumnMean,  // beta*_j = column mean of X prior to centering
};

struct SyntheticResponseSpec {
  ResponseKind kind = ResponseKind::kConstant;
  double snr_y = 50.0;  // +inf = noiseless
  NoiseConvention convention;
  std::uint64_t seed = 0;
};

std::pair<Dataset, CoefficientVector> gen_parabolic(const ParabolicSpec& spec);

/// Construct y = X beta* + noise on an existing predictor matrix (taken
/// prior to any centering). Returns the dataset with the new response and
/// the true coefficients.
std::pair<Dataset, CoefficientVector> attach_synthetic_response(
    const Dataset& d, const SyntheticResponseSpec& spec);

/// Noise sigma for a signal at the target SNR; +inf SNR gives sigma 0.
double noise_sigma(const Eigen::VectorXd& signal, double snr, NoiseConvention conv);

/// Measured power ratio of signal to (x - signal); mean-removed per conv.
double measured_snr(const Eigen::VectorXd& noisy, const Eigen::VectorXd& signal,
                    NoiseConvention conv);

}  // namespace hdreg
