#pragma once

// Yeo-Johnson power transform: forward/inverse maps and maximum-likelihood
// selection of the transformation parameter lambda.
//
//               { ((x+1)^l - 1) / l                 x >= 0, l != 0
//   Psi(l, x) = { ln(x+1)                           x >= 0, l == 0
//               { -((-x+1)^(2-l) - 1) / (2-l)       x <  0, l != 2
//               { -ln(-x+1)                         x <  0, l == 2

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace tabdrw {

inline double yj_forward(double x, double lambda) {
  if (x >= 0.0) {
    if (lambda == 0.0) return std::log1p(x);
    return std::expm1(lambda * std::log1p(x)) / lambda;
  }
  const double two_ml = 2.0 - lambda;
  if (two_ml == 0.0) return -std::log1p(-x);
  return -std::expm1(two_ml * std::log1p(-x)) / two_ml;
}

// Exact algebraic inverse. Psi maps x >= 0 to y >= 0 and x < 0 to y < 0, so
// the branch is chosen by the sign of y. Throws when y lies outside the
// range of Psi(lambda, .) (possible for lambda < 0 on the positive side and
// lambda > 2 on the negative side).
inline double yj_inverse(double y, double lambda) {
  if (y >= 0.0) {
    if (lambda == 0.0) return std::expm1(y);
    const double t = lambda * y + 1.0;
    if (t <= 0.0) throw std::domain_error("yj_inverse: y outside the range of Psi(lambda,.)");
    return std::expm1(std::log(t) / lambda);
  }
  const double two_ml = 2.0 - lambda;
  if (two_ml == 0.0) return -std::expm1(-y);
  const double t = 1.0 - two_ml * y;
  if (t <= 0.0) throw std::domain_error("yj_inverse: y outside the range of Psi(lambda,.)");
  return -std::expm1(std::log(t) / two_ml);
}

namespace detail {

// Gaussian profile log-likelihood of lambda given the column, up to an
// additive constant:
//   LL(l) = -(N/2) ln Var[Psi(l, x)] + (l - 1) sum_i sign(x_i) ln(|x_i| + 1).
// `sorted` must be in ascending order; all sums run over the sorted values
// so the result is independent of the original row order.
inline double yj_profile_ll(const std::vector<double>& sorted, double lambda, double jacobian_term) {
  const std::size_t n = sorted.size();
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = yj_forward(sorted[i], lambda);
  double mean = 0.0;
  for (double v : psi) mean += v;
  mean /= double(n);
  double var = 0.0;
  for (double v : psi) var += (v - mean) * (v - mean);
  var /= double(n);
  if (!(var > 1e-300) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
  return -0.5 * double(n) * std::log(var) + (lambda - 1.0) * jacobian_term;
}

}  // namespace detail

// MLE of lambda over [-5, 5]: a coarse 0.5-step scan guards against local
// maxima, then golden-section refinement to absolute tolerance 1e-6.
inline double fit_lambda(const std::vector<double>& column) {
  if (column.size() < 2) throw std::invalid_argument("fit_lambda: need at least 2 values");
  std::vector<double> sorted(column);
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw std::invalid_argument("fit_lambda: constant column");

  double jac = 0.0;
  for (double x : sorted) jac += (x >= 0.0 ? 1.0 : -1.0) * std::log1p(std::abs(x));

  const double lo_bound = -5.0, hi_bound = 5.0;
  double best = lo_bound, best_ll = -std::numeric_limits<double>::infinity();
  for (double l = lo_bound; l <= hi_bound + 1e-12; l += 0.5) {
    double ll = detail::yj_profile_ll(sorted, l, jac);
    if (ll > best_ll) {
      best_ll = ll;
      best = l;
    }
  }

  double a = std::max(lo_bound, best - 0.5);
  double b = std::min(hi_bound, best + 0.5);
  const double gr = 0.61803398874989484820458683436564;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = detail::yj_profile_ll(sorted, x1, jac);
  double f2 = detail::yj_profile_ll(sorted, x2, jac);
  while (b - a > 1e-6) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = detail::yj_profile_ll(sorted, x2, jac);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = detail::yj_profile_ll(sorted, x1, jac);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace tabdrw
