#include <doctest.h>

#include "hdreg/estimators.hpp"
#include "hdreg/model_selection.hpp"
#include "hdreg/preprocess.hpp"
#include "helpers.hpp"

using namespace hdreg;
using testing::make_dataset;
using testing::random_matrix;
using testing::random_vector;

namespace {

Dataset noisy_linear(std::uint64_t seed, Eigen::Index n, Eigen::Index p, double noise) {
  Philox4x32 rng(seed);
  Eigen::MatrixXd x = random_matrix(rng, n, p);
  Eigen::VectorXd beta = random_vector(rng, p);
  Eigen::VectorXd y = x * beta;
  for (Eigen::Index i = 0; i < n; ++i) y[i] += noise * rng.next_normal();
  return make_dataset(std::move(x), std::move(y));
}

}  // namespace

TEST_CASE("singleton grid chooses itself under both rules") {
  Dataset d = noisy_linear(81, 12, 6, 0.1);
  CvResult res = cross_validate(d, {Method::kRidge}, {0.5}, 4, 0, CvRule::kOneSe,
                                Scheme::kCenterOnly);
  CHECK(res.chosen_min == 0.5);
  CHECK(res.chosen_1se == 0.5);
  CHECK(res.grid.size() == 1);
}

TEST_CASE("monotone error curve pins the minimum at the smallest lambda") {
  // near-noiseless tall data: any shrinkage hurts, so the CV curve rises
  Dataset d = noisy_linear(82, 40, 5, 1e-8);
  std::vector<double> grid{1e-6, 1e-2, 1.0, 100.0, 1e4};
  CvResult res =
      cross_validate(d, {Method::kRidge}, grid, 5, 0, CvRule::kOneSe, Scheme::kCenterOnly);
  for (Eigen::Index j = 1; j < res.mean_curve.size(); ++j)
    CHECK(res.mean_curve[j] > res.mean_curve[j - 1]);
  CHECK(res.chosen_min == 1e-6);
  CHECK(res.chosen_1se >= res.chosen_min);
}

TEST_CASE("identical seeds reproduce bit-identical results") {
  Dataset d = noisy_linear(83, 15, 20, 0.3);
  std::vector<double> grid{0.01, 0.1, 1.0};
  CvResult a = cross_validate(d, {Method::kRidge}, grid, 5, 9, CvRule::kMin,
                              Scheme::kCenterOnly);
  CvResult b = cross_validate(d, {Method::kRidge}, grid, 5, 9, CvRule::kMin,
                              Scheme::kCenterOnly);
  CHECK(a.fold_errors == b.fold_errors);
  CHECK(a.chosen_min == b.chosen_min);

  CvResult c = cross_validate(d, {Method::kRidge}, grid, 5, 10, CvRule::kMin,
                              Scheme::kCenterOnly);
  CHECK(a.fold_errors != c.fold_errors);  // different shuffle
}

TEST_CASE("choices are invariant to scaling the response") {
  Dataset d = noisy_linear(84, 18, 25, 0.5);
  Dataset scaled = d;
  scaled.y *= 37.0;
  std::vector<double> grid{1e-3, 1e-2, 0.1, 1.0, 10.0};
  CvResult a =
      cross_validate(d, {Method::kRidge}, grid, 5, 3, CvRule::kOneSe, Scheme::kCenterOnly);
  CvResult b = cross_validate(scaled, {Method::kRidge}, grid, 5, 3, CvRule::kOneSe,
                              Scheme::kCenterOnly);
  CHECK(a.chosen_min == b.chosen_min);
  CHECK(a.chosen_1se == b.chosen_1se);
}

TEST_CASE("one-SE picks the most regularized value within one standard error") {
  Dataset d = noisy_linear(85, 20, 40, 1.0);
  std::vector<double> grid{1, 2, 3, 4, 5, 6};
  CvResult res =
      cross_validate(d, {Method::kPls}, grid, 5, 1, CvRule::kOneSe, Scheme::kCenterOnly);
  // fewer components = more regularized
  CHECK(res.chosen_1se <= res.chosen_min);
  CHECK(res.integer_grid);
  const auto jmin = std::find(res.grid.begin(), res.grid.end(), res.chosen_min) -
                    res.grid.begin();
  const auto j1se = std::find(res.grid.begin(), res.grid.end(), res.chosen_1se) -
                    res.grid.begin();
  const double threshold = res.mean_curve[jmin] + res.std_curve[jmin];
  CHECK(res.mean_curve[j1se] <= threshold);
  for (Eigen::Index j = 0; j < j1se; ++j) CHECK(res.mean_curve[j] > threshold);
}

TEST_CASE("grid values failing in every fold are dropped with a warning") {
  // n=8 with 4 folds leaves 6 training rows, centered rank 5: M=6 must fail
  Dataset d = noisy_linear(86, 8, 12, 0.1);
  std::vector<double> grid{1, 2, 3, 4, 5, 6};
  CvResult res =
      cross_validate(d, {Method::kPls}, grid, 4, 0, CvRule::kMin, Scheme::kCenterOnly);
  CHECK(res.grid.size() < grid.size());
  CHECK(std::find(res.grid.begin(), res.grid.end(), 6.0) == res.grid.end());
  CHECK(!res.warnings.empty());
}

TEST_CASE("cross_validate validates its inputs") {
  Dataset d = noisy_linear(87, 10, 5, 0.1);
  CHECK_THROWS_AS(cross_validate(d, {Method::kRidge}, {}, 5, 0, CvRule::kMin,
                                 Scheme::kCenterOnly),
                  InputError);
  CHECK_THROWS_AS(cross_validate(d, {Method::kRidge}, {0.1}, 1, 0, CvRule::kMin,
                                 Scheme::kCenterOnly),
                  InputError);
  CHECK_THROWS_AS(cross_validate(d, {Method::kRidge}, {0.1}, 11, 0, CvRule::kMin,
                                 Scheme::kCenterOnly),
                  InputError);
  CHECK_THROWS_AS(cross_validate(d, {Method::kPls}, {1.5}, 5, 0, CvRule::kMin,
                                 Scheme::kCenterOnly),
                  InputError);
}

TEST_CASE("evaluate reports zero RMSE for an interpolating fit") {
  Philox4x32 rng(88);
  Dataset raw = make_dataset(random_matrix(rng, 5, 12),
                             random_vector(rng, 5).array() + 10.0);
  auto state = fit_preprocess(raw, Scheme::kCenterOnly);
  CoefficientVector beta = fit_min_norm(apply_preprocess(state, raw));
  EvalReport rep = evaluate(beta, {{"train", raw}}, {});
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].count == 5);
  REQUIRE(rep.rows[0].rmse);
  CHECK(*rep.rows[0].rmse <= 1e-9 * raw.y.norm());
}

TEST_CASE("evaluate inverts a log10 response transform for reporting") {
  Philox4x32 rng(89);
  Eigen::MatrixXd x = random_matrix(rng, 5, 14);
  Eigen::VectorXd beta_true = random_vector(rng, 14) * 0.05;
  Eigen::VectorXd ylog = x * beta_true;
  ylog.array() += 3.0;  // around 1000 cycles
  Dataset raw = make_dataset(x, Eigen::pow(10.0, ylog.array()));

  Dataset logd = apply_response_transform(raw, ResponseTransform::kLog10);
  auto state = fit_preprocess(logd, Scheme::kCenterOnly);
  CoefficientVector beta = fit_min_norm(apply_preprocess(state, logd));

  EvalReport rep = evaluate(beta, {{"train", raw}}, {});
  // perfect predictions in log space must be perfect in cycle space
  CHECK(*rep.rows[0].rmse <= 1e-6 * raw.y.mean());
}

TEST_CASE("subset rules partition counts and empty subsets report no RMSE") {
  Philox4x32 rng(90);
  Eigen::MatrixXd x = random_matrix(rng, 6, 4);
  Eigen::VectorXd y(6);
  y << 500, 800, 1100, 1200, 1500, 2200;
  Dataset raw = make_dataset(x, y);
  auto state = fit_preprocess(raw, Scheme::kCenterOnly);
  CoefficientVector beta = fit_ridge(apply_preprocess(state, raw), 1.0);

  std::vector<SubsetRule> rules{{"low", std::nullopt, 1200.0},
                                {"high", 1200.0, std::nullopt},
                                {"none", std::nullopt, 100.0}};
  EvalReport rep = evaluate(beta, {{"all", raw}}, rules);
  const SplitReport& row = rep.rows[0];
  CHECK(row.subsets[0].count == 4);  // y <= 1200 inclusive
  CHECK(row.subsets[1].count == 2);
  CHECK(row.subsets[0].count + row.subsets[1].count == row.count);
  CHECK(row.subsets[2].count == 0);
  CHECK(!row.subsets[2].rmse);
  CHECK(row.subsets[0].rmse);
}

TEST_CASE("evaluate requires provenance") {
  Philox4x32 rng(91);
  Dataset raw = make_dataset(random_matrix(rng, 4, 3), random_vector(rng, 4));
  CoefficientVector bare;
  bare.beta = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(evaluate(bare, {{"x", raw}}, {}), InputError);
}
