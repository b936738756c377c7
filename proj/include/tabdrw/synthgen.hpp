#pragma once

// Synthetic multivariate Gaussian tables (identity / AR(1) / explicit
// covariance) for null calibration, bound validation, and robustness
// experiments. Variates come from the pinned keyed PRNG via Box-Muller with
// one derived stream per row, so generation is deterministic regardless of
// any outer parallelism.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabdrw/prng.hpp"
#include "tabdrw/table.hpp"

namespace tabdrw {

struct GaussianSpec {
  int n_rows = 1000;
  int p = 11;
  enum class Cov { identity, ar1, explicit_matrix } cov = Cov::identity;
  double rho = 0.4;                                  // ar1 only
  std::vector<std::vector<double>> sigma;            // explicit only, p x p PSD
  std::uint64_t seed = 0;
};

// Lower-triangular Cholesky factor; throws on non-positive-definite input.
inline std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& a) {
  const int p = int(a.size());
  std::vector<std::vector<double>> l(p, std::vector<double>(p, 0.0));
  for (int i = 0; i < p; ++i) {
    if (int(a[i].size()) != p) throw std::invalid_argument("cholesky: non-square matrix");
    for (int j = 0; j <= i; ++j) {
      double s = a[i][j];
      for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (!(s > 0.0)) throw std::invalid_argument("cholesky: matrix is not positive definite");
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

inline std::vector<std::vector<double>> covariance_of(const GaussianSpec& spec) {
  std::vector<std::vector<double>> sigma(spec.p, std::vector<double>(spec.p, 0.0));
  switch (spec.cov) {
    case GaussianSpec::Cov::identity:
      for (int i = 0; i < spec.p; ++i) sigma[i][i] = 1.0;
      break;
    case GaussianSpec::Cov::ar1:
      for (int i = 0; i < spec.p; ++i)
        for (int j = 0; j < spec.p; ++j) sigma[i][j] = std::pow(spec.rho, std::abs(i - j));
      break;
    case GaussianSpec::Cov::explicit_matrix:
      if (int(spec.sigma.size()) != spec.p)
        throw std::invalid_argument("generate: explicit covariance size mismatch");
      sigma = spec.sigma;
      break;
  }
  return sigma;
}

inline Table generate(const GaussianSpec& spec) {
  if (spec.p < 3) throw std::invalid_argument("generate: p must be >= 3");
  if (spec.n_rows < 0) throw std::invalid_argument("generate: negative row count");
  const auto l = cholesky(covariance_of(spec));

  Table t;
  for (int j = 0; j < spec.p; ++j)
    t.schema.push_back({"x" + std::to_string(j), ColumnKind::make_continuous(), {}, {}});

  Prng root = keyed_prng(spec.seed, "synthgen");
  t.values.resize(spec.n_rows);
  std::vector<double> u(spec.p);
  for (int i = 0; i < spec.n_rows; ++i) {
    Prng g = root.derive(std::uint64_t(i));
    for (int j = 0; j < spec.p; ++j) u[j] = g.normal();
    auto& row = t.values[i];
    row.resize(spec.p);
    for (int j = 0; j < spec.p; ++j) {
      double s = 0.0;
      for (int k = 0; k <= j; ++k) s += l[j][k] * u[k];
      row[j] = s;
    }
  }
  return t;
}

// Adds i.i.d. N(0, sigma^2) to every cell; sigma = 0 is the identity.
inline Table add_gaussian_noise(const Table& t, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: negative sigma");
  Table out = t;
  if (sigma == 0.0) return out;
  Prng root = keyed_prng(seed, "gauss-noise");
  for (std::size_t i = 0; i < out.rows(); ++i) {
    Prng g = root.derive(i);
    for (auto& v : out.values[i]) v += sigma * g.normal();
  }
  return out;
}

}  // namespace tabdrw
