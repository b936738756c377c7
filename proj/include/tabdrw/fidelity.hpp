#pragma once

// Model-free fidelity metrics: Density (KS statistic for numeric columns,
// total variation distance for categorical ones, averaged and flipped to a
// similarity) and Corr (mean absolute pairwise Pearson change, scaled into
// [0,1]), plus the empirical 1-D Wasserstein-2 distance used to check the
// distortion bound.

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabdrw/table.hpp"

namespace tabdrw {

struct FidelityReport {
  double density = 1.0;
  double corr = 1.0;
  double mean_abs_corr_change = 0.0;            // raw mean |Delta r|, unscaled
  std::map<std::string, double> per_column_distances;
  std::vector<std::string> skipped_pairs;       // constant-column pairs
};

// Kolmogorov-Smirnov statistic: sup |F_a - F_b| over the pooled breakpoints.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}

// Total variation distance between the label frequency vectors of two coded
// categorical samples sharing one codebook of `n_labels` entries.
inline double tvd(const std::vector<double>& a, const std::vector<double>& b, int n_labels) {
  if (a.empty() || b.empty()) throw std::invalid_argument("tvd: empty sample");
  std::vector<double> pa(n_labels, 0.0), pb(n_labels, 0.0);
  for (double v : a) {
    const int c = int(v);
    if (c < 0 || c >= n_labels) throw std::invalid_argument("tvd: code outside codebook");
    pa[c] += 1.0 / a.size();
  }
  for (double v : b) {
    const int c = int(v);
    if (c < 0 || c >= n_labels) throw std::invalid_argument("tvd: code outside codebook");
    pb[c] += 1.0 / b.size();
  }
  double d = 0.0;
  for (int c = 0; c < n_labels; ++c) d += std::abs(pa[c] - pb[c]);
  return 0.5 * d;
}

namespace detail {

inline std::vector<double> column_of(const Table& t, int j) {
  std::vector<double> out(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) out[i] = t.values[i][j];
  return out;
}

inline void require_matching_schema(const Table& a, const Table& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("fidelity: column count mismatch");
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (a.schema[j].name != b.schema[j].name ||
        a.schema[j].kind.type != b.schema[j].kind.type)
      throw std::invalid_argument("fidelity: schema mismatch at column " + a.schema[j].name);
}

// Pearson correlation; returns false for constant columns.
inline bool pearson(const std::vector<double>& x, const std::vector<double>& y, double& r) {
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return false;
  r = sxy / std::sqrt(sxx * syy);
  return true;
}

}  // namespace detail

// Density = 1 - mean over columns of (KS for numeric, TVD for categorical).
inline double density_score(const Table& real_t, const Table& synth_t,
                            FidelityReport* report = nullptr) {
  detail::require_matching_schema(real_t, synth_t);
  double total = 0.0;
  for (std::size_t j = 0; j < real_t.cols(); ++j) {
    const auto a = detail::column_of(real_t, int(j));
    const auto b = detail::column_of(synth_t, int(j));
    double d;
    if (real_t.schema[j].kind.type == ColumnType::categorical) {
      if (real_t.schema[j].kind.codebook != synth_t.schema[j].kind.codebook)
        throw std::invalid_argument("density_score: codebook mismatch at " + real_t.schema[j].name);
      d = tvd(a, b, int(real_t.schema[j].kind.codebook.size()));
    } else {
      d = ks_statistic(a, b);
    }
    if (report) report->per_column_distances[real_t.schema[j].name] = d;
    total += d;
  }
  return 1.0 - total / double(real_t.cols());
}

// Corr = 1 - mean over numeric column pairs of |Delta r| / 2. Pairs with a
// constant column in either table are skipped and reported.
inline double corr_score(const Table& real_t, const Table& synth_t,
                         FidelityReport* report = nullptr) {
  detail::require_matching_schema(real_t, synth_t);
  const auto numeric = real_t.numeric_columns();
  if (numeric.size() < 2) throw std::invalid_argument("corr_score: need >= 2 numeric columns");
  double total = 0.0;
  long pairs = 0;
  for (std::size_t a = 0; a < numeric.size(); ++a) {
    const auto xa = detail::column_of(real_t, numeric[a]);
    const auto ya = detail::column_of(synth_t, numeric[a]);
    for (std::size_t b = a + 1; b < numeric.size(); ++b) {
      const auto xb = detail::column_of(real_t, numeric[b]);
      const auto yb = detail::column_of(synth_t, numeric[b]);
      double r_real, r_synth;
      if (!detail::pearson(xa, xb, r_real) || !detail::pearson(ya, yb, r_synth)) {
        if (report)
          report->skipped_pairs.push_back(real_t.schema[numeric[a]].name + "/" +
                                          real_t.schema[numeric[b]].name);
        continue;
      }
      total += std::abs(r_real - r_synth);
      ++pairs;
    }
  }
  if (pairs == 0) throw std::invalid_argument("corr_score: every pair had a constant column");
  const double mean_abs = total / double(pairs);
  if (report) report->mean_abs_corr_change = mean_abs;
  return 1.0 - 0.5 * mean_abs;
}

inline FidelityReport fidelity_report(const Table& real_t, const Table& synth_t) {
  FidelityReport rep;
  rep.density = density_score(real_t, synth_t, &rep);
  rep.corr = corr_score(real_t, synth_t, &rep);
  return rep;
}

// Empirical 1-D Wasserstein-2 distance under the sorted (optimal) coupling.
inline double empirical_w2_1d(std::vector<double> a, std::vector<double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("empirical_w2_1d: length mismatch");
  if (a.empty()) throw std::invalid_argument("empirical_w2_1d: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / double(a.size()));
}

}  // namespace tabdrw
