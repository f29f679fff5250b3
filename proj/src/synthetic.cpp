#include "hdreg/synthetic.hpp"

#include <cmath>
#include <limits>

namespace hdreg {

namespace {

// fixed stream ids so each noise source is reproducible independently
constexpr std::uint64_t kStreamCoefficients = 1;
constexpr std::uint64_t kStreamXNoise = 2;
constexpr std::uint64_t kStreamYNoise = 3;
constexpr std::uint64_t kStreamResponseNoise = 4;

double power(const Eigen::VectorXd& signal, bool mean_removed) {
  if (mean_removed) {
    const double m = signal.mean();
    return (signal.array() - m).square().mean();
  }
  return signal.squaredNorm() / signal.size();
}

}  // namespace

double noise_sigma(const Eigen::VectorXd& signal, double snr, NoiseConvention conv) {
  if (std::isinf(snr)) return 0.0;
  if (!(snr > 0.0)) throw InputError("noise_sigma: SNR must be positive");
  const double ratio = conv.decibel ? std::pow(10.0, snr / 10.0) : snr;
  return std::sqrt(power(signal, conv.mean_removed) / ratio);
}

double measured_snr(const Eigen::VectorXd& noisy, const Eigen::VectorXd& signal,
                    NoiseConvention conv) {
  const Eigen::VectorXd noise = noisy - signal;
  const double pn = noise.squaredNorm() / noise.size();
  if (pn == 0.0) return std::numeric_limits<double>::infinity();
  return power(signal, conv.mean_removed) / pn;
}

std::pair<Dataset, CoefficientVector> gen_parabolic(const ParabolicSpec& spec) {
  if (spec.n < 1) throw InputError("gen_parabolic: n must be positive");
  if (!(spec.domain_step > 0.0) || !(spec.domain_end > spec.domain_start))
    throw InputError("gen_parabolic: invalid domain");
  const Eigen::Index p =
      static_cast<Eigen::Index>(std::llround((spec.domain_end - spec.domain_start) /
                                             spec.domain_step)) + 1;
  Eigen::VectorXd domain(p);
  for (Eigen::Index j = 0; j < p; ++j) domain[j] = spec.domain_start + j * spec.domain_step;
  const Eigen::VectorXd d2 = domain.cwiseProduct(domain);

  Philox4x32 coef_rng(spec.seed, kStreamCoefficients);
  Eigen::VectorXd a(spec.n);
  for (int i = 0; i < spec.n; ++i) a[i] = spec.mu + spec.sigma * coef_rng.next_normal();

  Eigen::MatrixXd x_clean = a * d2.transpose();
  const Eigen::VectorXd beta_star = Eigen::VectorXd::Constant(p, 1.0 / p);
  const Eigen::VectorXd y_clean = x_clean * beta_star;

  Dataset out;
  out.x = x_clean;
  Philox4x32 x_rng(spec.seed, kStreamXNoise);
  for (int i = 0; i < spec.n; ++i) {
    const double sd = noise_sigma(x_clean.row(i), spec.snr_x, spec.convention);
    if (sd > 0.0)
      for (Eigen::Index j = 0; j < p; ++j) out.x(i, j) += sd * x_rng.next_normal();
  }
  out.y = y_clean;
  Philox4x32 y_rng(spec.seed, kStreamYNoise);
  const double sdy = noise_sigma(y_clean, spec.snr_y, spec.convention);
  if (sdy > 0.0)
    for (int i = 0; i < spec.n; ++i) out.y[i] += sdy * y_rng.next_normal();
  out.domain = domain;

  CoefficientVector truth;
  truth.beta = beta_star;
  truth.method = Method::kTrue;
  return {std::move(out), std::move(truth)};
}

std::pair<Dataset, CoefficientVector> attach_synthetic_response(
    const Dataset& d, const SyntheticResponseSpec& spec) {
  if (d.preprocessing)
    throw InputError("attach_synthetic_response: X must be taken prior to centering");
  const Eigen::Index p = d.p();
  CoefficientVector truth;
  truth.method = Method::kTrue;
  truth.beta = spec.kind == ResponseKind::kConstant
                   ? Eigen::VectorXd::Constant(p, 1.0 / p)
                   : Eigen::VectorXd(d.x.colwise().mean());

  Dataset out = d;
  out.y = d.x * truth.beta;
  out.y_transform = ResponseTransform::kNone;
  const double sd = noise_sigma(out.y, spec.snr_y, spec.convention);
  if (sd > 0.0) {
    Philox4x32 rng(spec.seed, kStreamResponseNoise);
    for (Eigen::Index i = 0; i < out.y.size(); ++i) out.y[i] += sd * rng.next_normal();
  }
  return {std::move(out), std::move(truth)};
}

}  // namespace hdreg
