#include <doctest.h>

#include "hdreg/svd.hpp"
#include "hdreg/types.hpp"
#include "helpers.hpp"

using namespace hdreg;
using testing::qr_nullspace;
using testing::random_matrix;
using testing::random_vector;

TEST_CASE("identity matrix has full rank and empty nullspace") {
  SvdFactors f = svd_factor(Eigen::MatrixXd::Identity(3, 3), 1e-12);
  CHECK(f.rank() == 3);
  CHECK(f.v0.cols() == 0);
  CHECK(f.sigma.isApproxToConstant(1.0, 1e-14));
}

TEST_CASE("structural rank deficiency splits off e2") {
  Eigen::MatrixXd x(2, 2);
  x << 1, 0, 0, 0;
  SvdFactors f = svd_factor(x);
  REQUIRE(f.rank() == 1);
  REQUIRE(f.v0.cols() == 1);
  CHECK(std::abs(f.v0(1, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(f.v0(0, 0)) < 1e-12);
  CHECK(f.v0(1, 0) > 0.0);  // sign convention
}

TEST_CASE("wide Gaussian matrix: nullspace agrees with a QR oracle") {
  Philox4x32 rng(42);
  Eigen::MatrixXd x = random_matrix(rng, 5, 12);
  SvdFactors f = svd_factor(x);
  REQUIRE(f.rank() == 5);
  REQUIRE(f.v0.cols() == 7);
  CHECK((f.v0.transpose() * x.transpose()).cwiseAbs().maxCoeff() < 1e-10);

  Eigen::MatrixXd n_qr = qr_nullspace(x);
  REQUIRE(n_qr.cols() == 7);
  // same subspace: the projectors match
  Eigen::MatrixXd pv = f.v0 * f.v0.transpose();
  Eigen::MatrixXd pq = n_qr * n_qr.transpose();
  CHECK((pv - pq).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("factor invariants on random instances") {
  Philox4x32 rng(7);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.next_below(6));
    const Eigen::Index p = 3 + static_cast<Eigen::Index>(rng.next_below(20));
    Eigen::MatrixXd x = random_matrix(rng, n, p);
    SvdFactors f = svd_factor(x);

    for (Eigen::Index i = 1; i < f.sigma.size(); ++i) CHECK(f.sigma[i] <= f.sigma[i - 1]);
    CHECK(f.sigma.minCoeff() > f.rank_tolerance);

    Eigen::MatrixXd v(p, f.v1.cols() + f.v0.cols());
    v << f.v1, f.v0;
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(p, p)).cwiseAbs().maxCoeff() <=
          1e-10);
    Eigen::MatrixXd rec = f.u * f.sigma.asDiagonal() * f.v1.transpose();
    CHECK((x - rec).cwiseAbs().maxCoeff() <= 1e-8 * f.sigma_max());
  }
}

TEST_CASE("svd_factor is deterministic") {
  Philox4x32 rng(3);
  Eigen::MatrixXd x = random_matrix(rng, 4, 9);
  SvdFactors a = svd_factor(x), b = svd_factor(x);
  CHECK(a.v0 == b.v0);
  CHECK(a.v1 == b.v1);
  CHECK(a.sigma == b.sigma);
}

TEST_CASE("rank tolerance cuts tiny singular values") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(2, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1e-20;
  CHECK(svd_factor(x).rank() == 1);
  CHECK(svd_factor(x, 1e-30).rank() == 2);
}

TEST_CASE("pinv_apply on the identity returns y") {
  SvdFactors f = svd_factor(Eigen::MatrixXd::Identity(3, 3));
  Eigen::Vector3d y(1, 2, 3);
  CHECK((pinv_apply(f, y) - y).norm() < 1e-14);
}

TEST_CASE("pinv_apply zeroes the unconstrained coordinate") {
  Eigen::MatrixXd x(1, 2);
  x << 1, 0;
  Eigen::VectorXd y(1);
  y << 2;
  Eigen::VectorXd beta = pinv_apply(svd_factor(x), y);
  CHECK(beta[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(beta[1]) < 1e-14);
}

TEST_CASE("minimum-norm property against random interpolators") {
  Philox4x32 rng(11);
  Eigen::MatrixXd x = random_matrix(rng, 4, 9);
  Eigen::VectorXd y = random_vector(rng, 4);
  SvdFactors f = svd_factor(x);
  Eigen::VectorXd beta0 = pinv_apply(f, y);
  CHECK((x * beta0 - y).norm() <= 1e-10 * y.norm());
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd w = random_vector(rng, f.v0.cols());
    CHECK(beta0.norm() <= (beta0 + f.v0 * w).norm() + 1e-12);
  }
}

TEST_CASE("pinv_apply solves exactly in the column space and avoids V0") {
  Philox4x32 rng(19);
  for (int t = 0; t < 10; ++t) {
    Eigen::MatrixXd x = random_matrix(rng, 6, 14);
    SvdFactors f = svd_factor(x);
    Eigen::VectorXd y = x * random_vector(rng, 14);  // in the column space
    Eigen::VectorXd beta0 = pinv_apply(f, y);
    CHECK((x * beta0 - y).norm() <= 1e-8 * y.norm());
    CHECK((f.v0.transpose() * beta0).norm() <= 1e-10 * beta0.norm());
  }
}

TEST_CASE("input errors") {
  Eigen::MatrixXd x(1, 2);
  x << 1, std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd_factor(x), InputError);

  SvdFactors f = svd_factor(Eigen::MatrixXd::Identity(3, 3));
  CHECK_THROWS_AS(pinv_apply(f, Eigen::VectorXd::Zero(2)), InputError);
}
