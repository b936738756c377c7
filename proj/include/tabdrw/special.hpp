#pragma once

// Special functions needed by the robustness bounds: the standard normal
// CDF / quantile and the exponential integral E1.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tabdrw {

// Standard normal CDF via the complementary error function,
//   Phi(x) = erfc(-x / sqrt(2)) / 2.
inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440084436210485);
}

inline double normal_pdf(double x) {
  return 0.39894228040143267793994605993438 * std::exp(-0.5 * x * x);
}

// Upper quantile helper: normal_quantile(p) = Phi^{-1}(p). Bisection on a
// bracket followed by Newton polishing; good to ~1e-14 over p in (1e-300, 1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0,1)");
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 3; ++i) {
    double f = normal_cdf(x) - p;
    double d = normal_pdf(x);
    if (d <= 0.0) break;
    x -= f / d;
  }
  return x;
}

namespace detail {

// Power series about 0:  E1(u) = -gamma - ln u + sum_{k>=1} (-1)^{k+1} u^k / (k k!).
inline double e1_series(double u) {
  const double euler_gamma = 0.57721566490153286060651209008240;
  double sum = 0.0, term = 1.0;
  for (int k = 1; k <= 60; ++k) {
    term *= -u / k;          // (-1)^k u^k / k!
    double add = -term / k;  // (-1)^{k+1} u^k / (k k!)
    sum += add;
    if (std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
  }
  return -euler_gamma - std::log(u) + sum;
}

// Modified Lentz evaluation of the continued fraction
//   E1(u) = e^{-u} / (u + 1 - 1/(u + 3 - 4/(u + 5 - 9/(u + 7 - ...))))
// i.e. b_k = u + 2k + 1, a_k = -k^2.
inline double e1_continued_fraction(double u) {
  const double tiny = 1e-300;
  double b = u + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int k = 1; k <= 400; ++k) {
    double a = -double(k) * double(k);
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-u) * h;
}

}  // namespace detail

// Exponential integral E1(u) = integral_u^inf e^{-t}/t dt, u > 0.
// Series for u <= 1, continued fraction beyond; absolute error < 1e-10
// everywhere (much better in practice).
inline double exp_integral_e1(double u) {
  if (!(u > 0.0)) throw std::domain_error("exp_integral_e1: u must be positive");
  if (u > 700.0) return 0.0;  // below the smallest normal double
  return u <= 1.0 ? detail::e1_series(u) : detail::e1_continued_fraction(u);
}

}  // namespace tabdrw
