#include "hdreg/svd.hpp"

#include <Eigen/SVD>
#include <limits>

#include "hdreg/types.hpp"

namespace hdreg {

SvdFactors svd_factor(const Eigen::MatrixXd& x, double rtol) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (n < 1 || p < 1) throw InputError("svd_factor: empty matrix");
  if (!x.allFinite()) throw InputError("svd_factor: non-finite entries in X");
  if (rtol < 0.0)
    rtol = static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) throw NumericError("svd_factor: SVD did not converge");

  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() ? rtol * sv(0) : 0.0;
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;

  SvdFactors f;
  f.rank_tolerance = cutoff;
  f.sigma = sv.head(r);
  f.u = svd.matrixU().leftCols(r);
  Eigen::MatrixXd v = svd.matrixV();  // p x p
  f.v1 = v.leftCols(r);
  f.v0 = v.rightCols(p - r);

  // Sign convention: largest-magnitude entry of each right singular vector
  // positive; U flipped along to keep X = U diag(sigma) V1^T.
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index imax = 0;
    f.v1.col(j).cwiseAbs().maxCoeff(&imax);
    if (f.v1(imax, j) < 0.0) {
      f.v1.col(j) = -f.v1.col(j);
      f.u.col(j) = -f.u.col(j);
    }
  }
  for (Eigen::Index j = 0; j < f.v0.cols(); ++j) {
    Eigen::Index imax = 0;
    f.v0.col(j).cwiseAbs().maxCoeff(&imax);
    if (f.v0(imax, j) < 0.0) f.v0.col(j) = -f.v0.col(j);
  }
  return f;
}

Eigen::VectorXd pinv_apply(const SvdFactors& f, const Eigen::VectorXd& y) {
  if (y.size() != f.rows())
    throw InputError("pinv_apply: y has length " + std::to_string(y.size()) +
                     ", expected " + std::to_string(f.rows()));
  if (!y.allFinite()) throw InputError("pinv_apply: non-finite entries in y");
  return f.v1 * f.sigma.cwiseInverse().cwiseProduct(f.u.transpose() * y).matrix();
}

}  // namespace hdreg
