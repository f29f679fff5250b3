#include "hdreg/spline.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <vector>

#include "hdreg/types.hpp"

namespace hdreg {
namespace {

// Cox-de Boor basis (values and derivatives) on a clamped knot vector.
// k = degree + 1 entries are written to out; span is the knot interval index.
void bspline_basis(const Eigen::VectorXd& knots, int degree, double x, int deriv,
                   Eigen::Index& span, Eigen::VectorXd& out) {
  const int k = degree + 1;
  const Eigen::Index nk = knots.size();
  const double lo = knots[degree], hi = knots[nk - k];
  x = std::clamp(x, lo, hi);
  Eigen::Index i;
  if (x >= hi) {
    i = nk - k - 1;
    while (i > degree && knots[i] == knots[i + 1]) --i;
  } else {
    i = std::upper_bound(knots.data() + degree, knots.data() + nk - k, x) - knots.data() - 1;
  }
  span = i - degree;

  std::vector<double> left(k), right(k);
  std::vector<std::vector<double>> ndu(k, std::vector<double>(k));
  ndu[0][0] = 1.0;
  for (int j = 1; j < k; ++j) {
    left[j] = x - knots[i + 1 - j];
    right[j] = knots[i + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  out.resize(k);
  if (deriv == 0) {
    for (int j = 0; j < k; ++j) out[j] = ndu[j][k - 1];
    return;
  }
  // derivative recursion (de Boor)
  std::vector<std::vector<double>> ders(deriv + 1, std::vector<double>(k, 0.0));
  for (int j = 0; j < k; ++j) ders[0][j] = ndu[j][k - 1];
  for (int r = 0; r < k; ++r) {
    int s1 = 0, s2 = 1;
    std::vector<std::vector<double>> a(2, std::vector<double>(k, 0.0));
    a[0][0] = 1.0;
    for (int d = 1; d <= deriv; ++d) {
      double acc = 0.0;
      const int rk = r - d, pk = k - 1 - d;
      if (r >= d) {
        a[s2][0] = ndu[pk + 1][rk] == 0.0 ? 0.0 : a[s1][0] / ndu[pk + 1][rk];
        acc = a[s2][0] * ndu[rk][pk];
      }
      for (int j = std::max(0, -rk); j <= std::min(d - 1, k - 1 - r); ++j) {
        if (j == 0 && r >= d) continue;
        const double den = ndu[pk + 1][rk + j];
        a[s2][j] = den == 0.0 ? 0.0 : (a[s1][j] - (j > 0 ? a[s1][j - 1] : 0.0)) / den;
        acc += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][d] = ndu[pk + 1][r] == 0.0 ? 0.0 : -a[s1][d - 1] / ndu[pk + 1][r];
        acc += a[s2][d] * ndu[r][pk];
      }
      ders[d][r] = acc;
      std::swap(s1, s2);
    }
  }
  double factor = degree;
  for (int d = 1; d <= deriv; ++d) {
    for (int j = 0; j < k; ++j) ders[d][j] *= factor;
    factor *= degree - d;
  }
  for (int j = 0; j < k; ++j) out[j] = ders[deriv][j];
}

// Gauss-Legendre nodes/weights on [-1, 1]; q points are exact for the
// piecewise-polynomial products of second derivatives up to degree 5 splines.
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
  switch (q) {
    case 1: nodes = {0.0}; weights = {2.0}; break;
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      nodes = {-a, a}; weights = {1.0, 1.0};
      break;
    }
    case 3: {
      const double a = std::sqrt(0.6);
      nodes = {-a, 0.0, a}; weights = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    default: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      nodes = {-b, -a, a, b}; weights = {wb, wa, wa, wb};
      break;
    }
  }
}

}  // namespace

SplineSmoother::SplineSmoother(const Eigen::VectorXd& sites, int degree)
    : degree_(degree), sites_(sites) {
  const Eigen::Index m = sites.size();
  if (degree < 2 || degree > 5) throw InputError("SplineSmoother: degree must be in [2, 5]");
  if (m < degree + 2) throw InputError("SplineSmoother: need at least degree+2 sites");
  for (Eigen::Index i = 1; i < m; ++i)
    if (!(sites[i] > sites[i - 1]))
      throw InputError("SplineSmoother: sites must be strictly increasing");

  // clamped knots at all sites
  const int k = degree + 1;
  knots_.resize(m - 2 + 2 * k);
  for (int i = 0; i < k; ++i) knots_[i] = sites[0];
  knots_.segment(k, m - 2) = sites.segment(1, m - 2);
  for (int i = 0; i < k; ++i) knots_[m - 2 + k + i] = sites[m - 1];
  n_basis_ = knots_.size() - k;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m * k);
  Eigen::VectorXd b;
  Eigen::Index first;
  for (Eigen::Index i = 0; i < m; ++i) {
    bspline_basis(knots_, degree_, sites[i], 0, first, b);
    for (int j = 0; j < k; ++j)
      if (first + j < n_basis_) trip.emplace_back(i, first + j, b[j]);
  }
  design_.resize(m, n_basis_);
  design_.setFromTriplets(trip.begin(), trip.end());
  gram_ = (design_.transpose() * design_).pruned();

  // penalty: integral of second-derivative products over each knot interval
  std::vector<double> gn, gw;
  gauss_legendre(std::max(2, degree_ - 1), gn, gw);
  trip.clear();
  for (Eigen::Index t = degree_; t + 1 < knots_.size() - degree_; ++t) {
    const double a = knots_[t], c = knots_[t + 1];
    if (c - a <= 0.0) continue;
    for (std::size_t g = 0; g < gn.size(); ++g) {
      const double x = 0.5 * (a + c) + 0.5 * (c - a) * gn[g];
      const double w = 0.5 * (c - a) * gw[g];
      bspline_basis(knots_, degree_, x, 2, first, b);
      for (int r = 0; r < k; ++r) {
        if (first + r >= n_basis_) continue;
        for (int s = 0; s < k; ++s)
          if (first + s < n_basis_)
            trip.emplace_back(first + r, first + s, w * b[r] * b[s]);
      }
    }
  }
  penalty_.resize(n_basis_, n_basis_);
  penalty_.setFromTriplets(trip.begin(), trip.end());

  const double tg = Eigen::VectorXd(gram_.diagonal()).sum();
  const double tp = Eigen::VectorXd(penalty_.diagonal()).sum();
  penalty_scale_ = tp > 0.0 ? tg / tp : 1.0;
}

void SplineSmoother::eval_basis(double x, int deriv, Eigen::Index& first,
                                Eigen::VectorXd& out) const {
  bspline_basis(knots_, degree_, x, deriv, first, out);
}

Eigen::VectorXd SplineSmoother::solve(const Eigen::VectorXd& rhs, double penalty) const {
  Eigen::SparseMatrix<double> a = gram_ + penalty * penalty_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw NumericError("SplineSmoother: penalized system factorization failed");
  return ldlt.solve(rhs);
}

Eigen::VectorXd SplineSmoother::fit_penalized(const Eigen::VectorXd& values,
                                              double penalty) const {
  if (values.size() != sites_.size())
    throw InputError("SplineSmoother: value/site length mismatch");
  Eigen::VectorXd coef = solve(design_.transpose() * values, penalty);
  return design_ * coef;
}

Eigen::VectorXd SplineSmoother::fit_rss_target(const Eigen::VectorXd& values,
                                               double rss_target,
                                               double* penalty_out) const {
  if (rss_target < 0.0) throw InputError("SplineSmoother: negative RSS target");
  const Eigen::VectorXd rhs = design_.transpose() * values;
  auto rss_at = [&](double penalty) {
    Eigen::VectorXd fit = design_ * solve(rhs, penalty);
    return (values - fit).squaredNorm();
  };

  // RSS(penalty) is nondecreasing; bracket the target in log-penalty.
  double lo = 1e-14 * penalty_scale_;
  double hi = 1e12 * penalty_scale_;
  if (rss_at(hi) <= rss_target) {
    if (penalty_out) *penalty_out = hi;
    return fit_penalized(values, hi);
  }
  if (rss_at(lo) > rss_target)
    throw InputError("SplineSmoother: RSS target infeasible for this degree/grid");
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (rss_at(mid) <= rss_target)
      lo = mid;
    else
      hi = mid;
  }
  if (penalty_out) *penalty_out = lo;
  return fit_penalized(values, lo);
}

}  // namespace hdreg
