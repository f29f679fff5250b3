#include <doctest.h>

#include "hdreg/estimators.hpp"
#include "hdreg/preprocess.hpp"
#include "hdreg/synthetic.hpp"
#include "helpers.hpp"

using namespace hdreg;
using testing::make_dataset;
using testing::random_matrix;
using testing::random_vector;

TEST_CASE("center-only captures column means") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 3, 3, 1;
  auto state = fit_preprocess(make_dataset(x, Eigen::Vector2d(1, 2)), Scheme::kCenterOnly);
  CHECK(state->column_means.isApprox(Eigen::Vector2d(2, 2)));
  CHECK(state->y_mean == doctest::Approx(1.5));
  CHECK(!state->column_stds);
}

TEST_CASE("z-score uses population std") {
  Eigen::MatrixXd x(2, 2);
  x << 0, 0, 2, 4;
  auto state = fit_preprocess(make_dataset(x, Eigen::Vector2d(0, 0)), Scheme::kZScore);
  CHECK(state->column_means.isApprox(Eigen::Vector2d(1, 2)));
  REQUIRE(state->column_stds);
  CHECK(state->column_stds->isApprox(Eigen::Vector2d(1, 2)));
}

TEST_CASE("constant column is degenerate under z-scoring") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 1, 1, 1, 2;
  try {
    fit_preprocess(make_dataset(x, Eigen::Vector3d::Zero()), Scheme::kZScore);
    FAIL("expected DegenerateColumnError");
  } catch (const DegenerateColumnError& e) {
    CHECK(e.column == 0);
  }
}

TEST_CASE("applying a fitted state normalizes the training set only") {
  Philox4x32 rng(5);
  Dataset train = make_dataset(random_matrix(rng, 8, 5), random_vector(rng, 8));
  Dataset test = make_dataset(random_matrix(rng, 6, 5).array() + 2.0, random_vector(rng, 6));

  auto state = fit_preprocess(train, Scheme::kZScore);
  Dataset ctr = apply_preprocess(state, train);
  CHECK(ctr.x.colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index j = 0; j < ctr.p(); ++j)
    CHECK(std::sqrt(ctr.x.col(j).squaredNorm() / ctr.n()) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(ctr.y.mean()) < 1e-10);

  // out-of-sample transform reuses training statistics, so test columns stay off-center
  Dataset cte = apply_preprocess(state, test);
  CHECK(cte.x.colwise().mean().cwiseAbs().maxCoeff() > 0.5);
}

TEST_CASE("transform then inverse-transform restores the data") {
  Philox4x32 rng(6);
  Dataset d = make_dataset(random_matrix(rng, 7, 4), random_vector(rng, 7));
  for (Scheme scheme : {Scheme::kCenterOnly, Scheme::kZScore}) {
    auto state = fit_preprocess(d, scheme);
    Dataset back = invert_preprocess(apply_preprocess(state, d));
    CHECK((back.x - d.x).cwiseAbs().maxCoeff() <=
          1e-12 * d.x.cwiseAbs().maxCoeff());
    CHECK((back.y - d.y).cwiseAbs().maxCoeff() <= 1e-12 * d.y.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("z-scored fit predicts identically under the linear reparameterization") {
  Philox4x32 rng(8);
  Dataset d = make_dataset(random_matrix(rng, 6, 15), random_vector(rng, 6));
  auto zstate = fit_preprocess(d, Scheme::kZScore);
  auto cstate = fit_preprocess(d, Scheme::kCenterOnly);
  Dataset dz = apply_preprocess(zstate, d);
  Dataset dc = apply_preprocess(cstate, d);

  CoefficientVector bz = fit_ridge(dz, 0.5);
  // rescaling coefficients by 1/std maps them to the centered-only problem
  Eigen::VectorXd rescaled = bz.beta.cwiseQuotient(*zstate->column_stds);
  CHECK((dz.x * bz.beta - dc.x * rescaled).norm() <= 1e-8 * (dz.x * bz.beta).norm());
}

TEST_CASE("dimension and transform mismatches are refused") {
  Philox4x32 rng(9);
  Dataset d = make_dataset(random_matrix(rng, 4, 3), random_vector(rng, 4));
  auto state = fit_preprocess(d, Scheme::kCenterOnly);
  Dataset wide = make_dataset(random_matrix(rng, 4, 5), random_vector(rng, 4));
  CHECK_THROWS_AS(apply_preprocess(state, wide), InputError);
  CHECK_THROWS_AS(fit_preprocess(make_dataset(random_matrix(rng, 1, 3), random_vector(rng, 1)),
                                 Scheme::kCenterOnly),
                  InputError);
}

TEST_CASE("log10 response transform round-trips through evaluation helpers") {
  Dataset d = make_dataset(Eigen::MatrixXd::Ones(3, 2), Eigen::Vector3d(10, 100, 1000));
  Dataset t = apply_response_transform(d, ResponseTransform::kLog10);
  CHECK(t.y.isApprox(Eigen::Vector3d(1, 2, 3)));
  CHECK(invert_response(ResponseTransform::kLog10, t.y).isApprox(d.y));
  CHECK_THROWS_AS(apply_response_transform(t, ResponseTransform::kLog10), InputError);
  Dataset neg = make_dataset(Eigen::MatrixXd::Ones(2, 2), Eigen::Vector2d(1, -1));
  CHECK_THROWS_AS(apply_response_transform(neg, ResponseTransform::kLog10), InputError);
}

namespace {

Dataset cubic_rows(Philox4x32& rng, Eigen::Index n, Eigen::Index p) {
  Eigen::VectorXd grid(p);
  for (Eigen::Index j = 0; j < p; ++j) grid[j] = 3.0 * j / (p - 1);
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = rng.next_normal(), b = rng.next_normal(), c = rng.next_normal(),
                 e = rng.next_normal();
    for (Eigen::Index j = 0; j < p; ++j) {
      const double t = grid[j];
      x(i, j) = a + b * t + c * t * t + e * t * t * t;
    }
  }
  Dataset d = make_dataset(std::move(x), Eigen::VectorXd::Zero(n));
  d.domain = grid;
  return d;
}

}  // namespace

TEST_CASE("snr profile: noiseless cubic rows are all signal") {
  Philox4x32 rng(21);
  Dataset d = cubic_rows(rng, 5, 40);
  SnrProfile prof = snr_profile(d, 1e-18, 3);
  const double signal_scale = d.x.cwiseAbs2().mean();
  CHECK(prof.noise_power.maxCoeff() <= 1e-16 * signal_scale);
  CHECK(prof.snr_db.minCoeff() >= 120.0);
}

TEST_CASE("snr profile recovers an injected ratio-50 noise level") {
  Philox4x32 rng(22);
  const Eigen::Index n = 12, p = 120;
  Eigen::VectorXd grid(p);
  for (Eigen::Index j = 0; j < p; ++j) grid[j] = 1.0 + 2.0 * j / (p - 1);
  Eigen::MatrixXd x(n, p);
  NoiseConvention conv{/*decibel=*/false, /*mean_removed=*/true};
  double expected_rss = 0.0;
  Philox4x32 noise(23);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = 0.3 + 0.3 * rng.next_normal();
    Eigen::VectorXd row = a * grid.cwiseProduct(grid);
    const double sd = noise_sigma(row, 50.0, conv);
    expected_rss += p * sd * sd;
    for (Eigen::Index j = 0; j < p; ++j) row[j] += sd * noise.next_normal();
    x.row(i) = row;
  }
  Dataset d = make_dataset(std::move(x), Eigen::VectorXd::Zero(n));
  d.domain = grid;
  SnrProfile prof = snr_profile(d, expected_rss / n, 3);
  std::vector<double> ratios(prof.snr_ratio.data(), prof.snr_ratio.data() + p);
  std::nth_element(ratios.begin(), ratios.begin() + p / 2, ratios.end());
  const double median = ratios[p / 2];
  CHECK(median >= 25.0);
  CHECK(median <= 100.0);
}

TEST_CASE("snr profile is invariant to a constant row offset") {
  Philox4x32 rng(24);
  Dataset d = cubic_rows(rng, 4, 30);
  d.x.array() += 0.02 * Eigen::ArrayXXd::Random(4, 30);  // some roughness to smooth over
  Dataset shifted = d;
  shifted.x.array() += 7.5;
  SnrProfile a = snr_profile(d, 1e-3, 3);
  SnrProfile b = snr_profile(shifted, 1e-3, 3);
  CHECK((a.noise_power - b.noise_power).cwiseAbs().maxCoeff() <=
        1e-9 * (a.noise_power.maxCoeff() + 1e-30));
  for (Eigen::Index j = 0; j < 30; ++j) {
    if (std::isinf(a.snr_ratio[j]) || std::isinf(b.snr_ratio[j])) continue;
    CHECK(a.snr_ratio[j] == doctest::Approx(b.snr_ratio[j]).epsilon(1e-6));
  }
}

TEST_CASE("snr profile preconditions") {
  Philox4x32 rng(25);
  Dataset d = make_dataset(random_matrix(rng, 3, 4), Eigen::VectorXd::Zero(3));
  CHECK_THROWS_AS(snr_profile(d, 1e-6, 3), InputError);  // no domain
  d.domain = Eigen::Vector4d(0, 1, 2, 3);
  CHECK_THROWS_AS(snr_profile(d, 1e-6, 3), InputError);  // p=4 < degree+2
  Dataset bad = make_dataset(random_matrix(rng, 3, 6), Eigen::VectorXd::Zero(3));
  Eigen::VectorXd grid(6);
  grid << 0, 1, 2, 2, 3, 4;  // not strictly monotone
  bad.domain = grid;
  CHECK_THROWS_AS(snr_profile(bad, 1e-6, 3), InputError);
}

TEST_CASE("snr profile accepts a decreasing domain grid") {
  Philox4x32 rng(26);
  Dataset d = cubic_rows(rng, 4, 30);
  Dataset rev = d;
  rev.domain = d.domain->reverse();
  rev.x = d.x.rowwise().reverse();
  SnrProfile a = snr_profile(d, 1e-12, 3);
  SnrProfile b = snr_profile(rev, 1e-12, 3);
  CHECK(b.noise_power.reverse().isApprox(a.noise_power, 1e-6));
}
