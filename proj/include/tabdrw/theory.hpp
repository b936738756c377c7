#pragma once

// Closed-form distortion predictions and robustness lower bounds.
//
// Distortion (standardized domain, modification set S fixed):
//   Delta x_{i,j} = -alpha * beta_j^T x_i,      alpha = 2 (1 + delta) / p,
//   beta_S(n, j)  = sum_{k in S} sin(2 pi k n / p) sin(2 pi k j / p),
//   Delta r_{jl}  = -alpha ([Sigma beta_l]_j + [Sigma beta_j]_l)
//                   + alpha^2 beta_j^T Sigma beta_l,
//   W2(col_j, col_j^wm) <= alpha sqrt(beta_j^T Sigma beta_j).
//
// Robustness under i.i.d. N(0, sigma^2) cell noise, rows ~ N(0, Sigma) with
// eigenvalues in [lambda_min, lambda_max]:
//   E[Z] >= sqrt(mN) gamma [1 - I(sigma) - I(sigma/delta)]
// with the three-term I(s) below, plus the derived minimum-sample-size bound
// and the sub-Gaussian variant.

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "tabdrw/special.hpp"

namespace tabdrw {

struct SpectrumSet {
  std::set<int> s;  // subset of {1..m}
  int p = 0;

  void validate() const {
    const int m = (p - 1) / 2;
    for (int k : s)
      if (k < 1 || k > m) throw std::invalid_argument("SpectrumSet: index outside {1..m}");
  }
};

struct BoundParams {
  long n_rows = 1000;
  int p = 11;
  double gamma = 0.5;
  double delta = 0.5;
  double sigma = 0.1;
  double lambda_min = 1.0;
  double lambda_max = 1.0;

  int m() const { return (p - 1) / 2; }
  void validate() const {
    if (!(lambda_min > 0.0 && lambda_min <= lambda_max))
      throw std::invalid_argument("BoundParams: need 0 < lambda_min <= lambda_max");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("BoundParams: gamma outside [0,1]");
    if (!(delta > 0.0 && sigma > 0.0))
      throw std::invalid_argument("BoundParams: theorem requires delta, sigma > 0");
    if (n_rows < 1 || m() < 1) throw std::invalid_argument("BoundParams: invalid N or p");
  }
};

inline std::vector<double> beta_vector(const SpectrumSet& ss, int j) {
  ss.validate();
  if (j < 0 || j >= ss.p) throw std::invalid_argument("beta_vector: j out of range");
  std::vector<double> beta(ss.p, 0.0);
  for (int n = 0; n < ss.p; ++n) {
    double v = 0.0;
    for (int k : ss.s)
      v += std::sin(2.0 * M_PI * k * n / ss.p) * std::sin(2.0 * M_PI * k * j / ss.p);
    beta[n] = v;
  }
  return beta;
}

// Entry-wise distortion of one row: Delta x_j = -alpha beta_j^T x.
inline std::vector<double> predicted_delta(const std::vector<double>& x_row,
                                           const SpectrumSet& ss, double delta) {
  if (int(x_row.size()) != ss.p) throw std::invalid_argument("predicted_delta: row length != p");
  const double alpha = 2.0 * (1.0 + delta) / double(ss.p);
  std::vector<double> out(ss.p, 0.0);
  for (int j = 0; j < ss.p; ++j) {
    const auto beta = beta_vector(ss, j);
    double dot = 0.0;
    for (int n = 0; n < ss.p; ++n) dot += beta[n] * x_row[n];
    out[j] = -alpha * dot;
  }
  return out;
}

namespace detail {

inline std::vector<double> mat_vec(const std::vector<std::vector<double>>& a,
                                   const std::vector<double>& v) {
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != v.size()) throw std::invalid_argument("mat_vec: shape mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) s += a[i][k] * v[k];
    out[i] = s;
  }
  return out;
}

}  // namespace detail

// Closed-form PCC change for the column pair (j, l).
inline double delta_pcc(const std::vector<std::vector<double>>& sigma,
                        const std::vector<double>& beta_j, const std::vector<double>& beta_l,
                        int j, int l, double alpha) {
  if (sigma.size() != beta_j.size()) throw std::invalid_argument("delta_pcc: shape mismatch");
  const auto sb_l = detail::mat_vec(sigma, beta_l);
  const auto sb_j = detail::mat_vec(sigma, beta_j);
  double cross = 0.0;
  for (std::size_t n = 0; n < beta_j.size(); ++n) cross += beta_j[n] * sb_l[n];
  return -alpha * (sb_l[j] + sb_j[l]) + alpha * alpha * cross;
}

// Wasserstein-2 upper bound for column j: alpha sqrt(beta_j^T Sigma beta_j).
inline double w2_bound(const std::vector<std::vector<double>>& sigma,
                       const std::vector<double>& beta_j, double alpha) {
  const auto sb = detail::mat_vec(sigma, beta_j);
  double quad = 0.0;
  for (std::size_t n = 0; n < beta_j.size(); ++n) quad += beta_j[n] * sb[n];
  if (quad < -1e-12) throw std::invalid_argument("w2_bound: covariance is not PSD");
  return alpha * std::sqrt(std::max(0.0, quad));
}

// The noise-sensitivity function of the robustness theorem.
inline double script_I(double s, double lambda_min, double lambda_max) {
  if (!(s > 0.0)) throw std::invalid_argument("script_I: s must be positive");
  if (!(lambda_min > 0.0 && lambda_min <= lambda_max))
    throw std::invalid_argument("script_I: need 0 < lambda_min <= lambda_max");
  const double s2 = s * s;
  const double term1 =
      s / std::sqrt(s2 + lambda_min) * (normal_cdf(std::sqrt(1.0 + lambda_min / s2)) - 0.5);
  const double term2 =
      s / std::sqrt(s2 + lambda_max) * (1.0 - normal_cdf(std::sqrt(1.0 + lambda_max / s2)));
  double term3 = 0.0;
  if (lambda_min != lambda_max) {
    const double inv_sqrt_8pie = 1.0 / std::sqrt(8.0 * M_PI * std::exp(1.0));
    term3 = inv_sqrt_8pie *
            (exp_integral_e1(lambda_min / (2.0 * s2)) - exp_integral_e1(lambda_max / (2.0 * s2)));
  }
  return term1 + term2 + term3;
}

// E[Z(gamma, delta, sigma)] >= sqrt(mN) gamma [1 - I(sigma) - I(sigma/delta)].
inline double z_lower_bound(const BoundParams& prm) {
  prm.validate();
  const double bracket = 1.0 - script_I(prm.sigma, prm.lambda_min, prm.lambda_max) -
                         script_I(prm.sigma / prm.delta, prm.lambda_min, prm.lambda_max);
  return std::sqrt(double(prm.m()) * double(prm.n_rows)) * prm.gamma * bracket;
}

// Minimum N achieving power 1-beta at one-sided level alpha:
//   N >= (q_alpha + sqrt(2 m ln(1/beta)))^2 / (m gamma^2 bracket^2),
// returned as the ceiling. Throws when the bracket is non-positive (the
// bound is vacuous there).
inline long sample_size_bound(double alpha, double beta, const BoundParams& prm) {
  prm.validate();
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("sample_size_bound: alpha, beta must lie in (0,1)");
  const double bracket = 1.0 - script_I(prm.sigma, prm.lambda_min, prm.lambda_max) -
                         script_I(prm.sigma / prm.delta, prm.lambda_min, prm.lambda_max);
  if (!(bracket > 0.0) || !(prm.gamma > 0.0))
    throw std::domain_error("sample_size_bound: bound is vacuous for these parameters");
  const double m = double(prm.m());
  const double q = normal_quantile(1.0 - alpha);
  const double num = q + std::sqrt(2.0 * m * std::log(1.0 / beta));
  const double rhs = num * num / (m * prm.gamma * prm.gamma * bracket * bracket);
  return long(std::ceil(rhs - 1e-12));
}

// Sub-Gaussian variant: E[Z] >= sqrt(mN) gamma sup_{theta in (0,1)}
//   rho(kappa, theta) [2 - exp(-theta lambda_min / 2 sigma^2)
//                        - exp(-theta lambda_min delta^2 / 2 sigma^2)],
// rho(kappa, theta) = (1 - theta)^2 / (2 C4 kappa^4). The supremum is found
// by a coarse scan plus golden-section refinement to 1e-8.
inline double subgaussian_z_bound(long n_rows, int m, double gamma, double delta, double sigma,
                                  double lambda_min, double kappa, double c4) {
  if (!(kappa >= 1.0)) throw std::invalid_argument("subgaussian_z_bound: kappa must be >= 1");
  if (!(c4 > 0.0)) throw std::invalid_argument("subgaussian_z_bound: C4 must be positive");
  if (!(sigma > 0.0 && delta > 0.0 && lambda_min > 0.0))
    throw std::invalid_argument("subgaussian_z_bound: sigma, delta, lambda_min must be positive");
  const double k4 = 2.0 * c4 * kappa * kappa * kappa * kappa;
  auto objective = [&](double theta) {
    const double rho = (1.0 - theta) * (1.0 - theta) / k4;
    const double e1 = std::exp(-theta * lambda_min / (2.0 * sigma * sigma));
    const double e2 = std::exp(-theta * lambda_min * delta * delta / (2.0 * sigma * sigma));
    return rho * (2.0 - e1 - e2);
  };

  double best_theta = 0.0, best = -1.0;
  for (int i = 1; i < 1000; ++i) {
    const double theta = double(i) / 1000.0;
    const double v = objective(theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  double a = std::max(1e-12, best_theta - 1e-3), b = std::min(1.0 - 1e-12, best_theta + 1e-3);
  const double gr = 0.61803398874989484820458683436564;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-8) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = objective(x1);
    }
  }
  const double sup = std::max(best, objective(0.5 * (a + b)));
  return std::sqrt(double(m) * double(n_rows)) * gamma * sup;
}

}  // namespace tabdrw
