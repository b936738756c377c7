#pragma once

// Detection: per-row alignment counts, the one-sided Z-score, and the null
// models it is tested against.
//
//   T_i = #{ t in 1..m : Im(y_{i,t}) * (2 zeta_{i,t} - 1) > 0 }   (strict)
//   Z   = (mean(T) - mu_nwm) / (sigma_nwm / sqrt(N))
//
// Under H0 the T_i are i.i.d. Binomial(m, 1/2), so the theoretical null is
// mu = m/2, sigma = sqrt(m)/2. Monte-Carlo calibration over unwatermarked
// tables is available as an alternative.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "tabdrw/embed.hpp"
#include "tabdrw/special.hpp"

namespace tabdrw {

struct NullStats {
  double mu_nwm = 0.0;
  double sigma_nwm = 1.0;
  std::map<double, double> critical_values;  // alpha -> q_alpha
  enum class Source { theoretical, monte_carlo } source = Source::theoretical;
};

struct DetectionReport {
  double z = 0.0;
  std::vector<int> t_counts;
  int n_rows = 0;
  int m = 0;
  double threshold = 6.0;
  bool decision = false;
  const char* null_source = "theoretical";
};

// Optional deviations from the practical (refit) pipeline: a frozen
// transform state, and/or explicit bit sequences. Supplying the
// embedding-time bits gives the fully idealized detection used by the
// theoretical analysis; by default bits are regenerated from the suspect
// table's own ranks.
struct DetectOptions {
  const TransformState* frozen = nullptr;
  const std::vector<std::vector<std::uint8_t>>* bits = nullptr;
};

inline std::vector<int> alignment_counts(const Table& t, std::uint64_t key,
                                         const EmbedConfig& cfg,
                                         const DetectOptions& opt = {}) {
  if (t.rows() == 0) throw std::invalid_argument("alignment_counts: empty table");
  TransformState tmpl;
  if (opt.frozen) {
    tmpl = *opt.frozen;
    tmpl.refit = false;
  } else {
    tmpl.columns = resolve_watermark_columns(t, cfg);
    if (cfg.privacy) tmpl.permutation = derive_permutation(key, int(tmpl.columns.size()));
    tmpl.refit = true;
  }
  auto [z, state] = fit_transform(t, tmpl);
  const int p = state.p();
  const int m = (p - 1) / 2;
  if (m < 1) throw std::invalid_argument("alignment_counts: p too small");

  std::vector<std::vector<std::uint8_t>> regenerated;
  const std::vector<std::vector<std::uint8_t>>* bits = opt.bits;
  if (!bits) {
    regenerated = bits_for_table(z, key, m, cfg.bit_mode, cfg.privacy);
    bits = &regenerated;
  }
  if (bits->size() != t.rows())
    throw std::invalid_argument("alignment_counts: bit row count mismatch");

  DftPlan plan(p);
  std::vector<int> counts(t.rows());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    SpectralRow spec = plan.forward(z[i].data());
    int c = 0;
    for (int tt = 1; tt <= m; ++tt) {
      const double target = 2.0 * double((*bits)[i][tt - 1]) - 1.0;
      if (spec.y[tt].imag() * target > 0.0) ++c;
    }
    counts[i] = c;
  }
  return counts;
}

inline double z_score(const std::vector<int>& t_counts, const NullStats& null) {
  if (t_counts.empty()) throw std::invalid_argument("z_score: no rows");
  if (!(null.sigma_nwm > 0.0)) throw std::invalid_argument("z_score: null sigma must be positive");
  long long sum = 0;
  for (int c : t_counts) sum += c;
  const double n = double(t_counts.size());
  const double mean = double(sum) / n;
  return (mean - null.mu_nwm) / (null.sigma_nwm / std::sqrt(n));
}

inline NullStats theoretical_null(int m) {
  if (m < 1) throw std::invalid_argument("theoretical_null: m must be >= 1");
  NullStats s;
  s.mu_nwm = double(m) / 2.0;
  s.sigma_nwm = std::sqrt(double(m)) / 2.0;
  s.source = NullStats::Source::theoretical;
  for (double alpha : {0.5, 0.05, 0.01, 0.001})
    s.critical_values[alpha] = normal_quantile(1.0 - alpha);
  return s;
}

// Monte-Carlo null calibration over unwatermarked tables supplied by
// `provider` (called with the table index). Pools the alignment counts for
// mu/sigma and estimates q_{0.001} as the ceil(0.001 * n_resamples)-th
// largest bootstrap Z.
inline NullStats calibrate_null(const std::function<Table(int)>& provider, int n_tables,
                                int rows_per_table, long n_resamples, std::uint64_t key,
                                const EmbedConfig& cfg, std::uint64_t seed = 0) {
  if (n_tables < 10) throw std::invalid_argument("calibrate_null: need at least 10 null tables");
  if (n_resamples < 1000)
    throw std::invalid_argument("calibrate_null: too few resamples for a 0.001 order statistic");

  std::vector<std::vector<int>> per_table(n_tables);
  double sum = 0.0, sumsq = 0.0;
  long total = 0;
  for (int i = 0; i < n_tables; ++i) {
    per_table[i] = alignment_counts(provider(i), key, cfg);
    for (int c : per_table[i]) {
      sum += c;
      sumsq += double(c) * double(c);
      ++total;
    }
  }
  NullStats s;
  s.mu_nwm = sum / double(total);
  s.sigma_nwm = std::sqrt(std::max(0.0, sumsq / double(total) - s.mu_nwm * s.mu_nwm));
  if (!(s.sigma_nwm > 0.0)) throw std::runtime_error("calibrate_null: degenerate null counts");
  s.source = NullStats::Source::monte_carlo;

  Prng g = keyed_prng(seed, "calibrate");
  std::vector<double> zs(n_resamples);
  const double denom = s.sigma_nwm / std::sqrt(double(rows_per_table));
  for (long r = 0; r < n_resamples; ++r) {
    const auto& counts = per_table[g.below(n_tables)];
    long long boot = 0;
    for (int k = 0; k < rows_per_table; ++k) boot += counts[g.below(counts.size())];
    zs[r] = (double(boot) / double(rows_per_table) - s.mu_nwm) / denom;
  }
  std::sort(zs.begin(), zs.end());
  const long k = long(std::ceil(0.001 * double(n_resamples)));
  s.critical_values[0.001] = zs[n_resamples - k];
  return s;
}

inline DetectionReport detect(const Table& t, std::uint64_t key, const EmbedConfig& cfg,
                              const NullStats& null, double threshold = 6.0,
                              const DetectOptions& opt = {}) {
  DetectionReport rep;
  rep.t_counts = alignment_counts(t, key, cfg, opt);
  const int p = opt.frozen ? opt.frozen->p() : int(resolve_watermark_columns(t, cfg).size());
  rep.m = (p - 1) / 2;
  rep.n_rows = int(t.rows());
  rep.z = z_score(rep.t_counts, null);
  rep.threshold = threshold;
  rep.decision = rep.z > threshold;
  rep.null_source = null.source == NullStats::Source::theoretical ? "theoretical" : "monte_carlo";
  return rep;
}

}  // namespace tabdrw
