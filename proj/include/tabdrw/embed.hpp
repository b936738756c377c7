#pragma once

// Watermark embedding. Pipeline per row:
//   [keyed column permutation] -> YJT + standardize -> DFT ->
//   align imaginary signs of the m effective entries with the row's
//   pseudorandom bits (soft rule below) -> IDFT -> inverse standardize/YJT
//   -> [un-permute] -> round discrete cells / clip to bounds.
//
// Soft rule for entry t in 1..m with bit zeta_t:
//   modified iff  Im(y_t) * (2 zeta_t - 1) < 0   (sign mismatch, strict)
//             and |Im(y_t)| <= Quantile_gamma of {|Im(y_1)|..|Im(y_m)|},
//   then  y_t <- Re(y_t) - i * delta * Im(y_t),  y_{p-t} <- conj(y_t).
// gamma = delta = 1 is the hard flip; the quantile is the ceil(gamma*m)-th
// smallest order statistic (inclusive), empty when gamma = 0.

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tabdrw/dft.hpp"
#include "tabdrw/keying.hpp"
#include "tabdrw/table.hpp"
#include "tabdrw/transform.hpp"

namespace tabdrw {

struct EmbedConfig {
  double gamma = 0.5;
  double delta = 0.5;
  std::uint64_t key = 0;
  std::vector<int> watermark_columns;  // empty: all numeric columns
  bool privacy = false;                // keyed column permutation
  BitMode bit_mode = BitMode::gray2;
  bool postprocess = true;             // rounding + clipping
};

struct EmbedReport {
  std::vector<std::vector<int>> modified_sets;  // S_i, subsets of {1..m}
  std::vector<double> quantile_thresholds;      // per-row Quantile_gamma
  long rounded_cells = 0;
  long clipped_cells = 0;
  double rounding_magnitude_mean = 0.0;  // mean |snap| over changed discrete cells
};

struct EmbedResult {
  Table table;
  EmbedReport report;
  TransformState state;                          // for frozen re-detection
  std::vector<std::vector<std::uint8_t>> bits;   // embedding-time bits (idealized detection)
};

// Quantile_gamma over the effective |Im| magnitudes: the ceil(gamma*m)-th
// smallest, inclusive; gamma = 0 yields an empty threshold (nothing
// qualifies), reported as -infinity.
inline double imag_quantile(const std::vector<double>& abs_im, double gamma) {
  const int m = int(abs_im.size());
  const int k = int(std::ceil(gamma * m - 1e-12));
  if (k <= 0) return -std::numeric_limits<double>::infinity();
  std::vector<double> v(abs_im);
  std::nth_element(v.begin(), v.begin() + (k - 1), v.end());
  return v[k - 1];
}

// Apply the soft rule to one spectral row in place; returns the set S of
// modified frequency indices and stores the threshold used.
inline std::vector<int> modify_row(SpectralRow& y, const std::vector<std::uint8_t>& bits,
                                   double gamma, double delta, double* threshold_out = nullptr) {
  const int p = y.p();
  const int m = y.m;
  if (int(bits.size()) != m) throw std::invalid_argument("modify_row: bit count != m");
  std::vector<double> abs_im(m);
  for (int t = 1; t <= m; ++t) abs_im[t - 1] = std::abs(y.y[t].imag());
  const double q = imag_quantile(abs_im, gamma);
  if (threshold_out) *threshold_out = q;

  std::vector<int> modified;
  for (int t = 1; t <= m; ++t) {
    const double im = y.y[t].imag();
    const double target = 2.0 * double(bits[t - 1]) - 1.0;
    if (im * target < 0.0 && std::abs(im) <= q) {
      y.y[t] = {y.y[t].real(), -delta * im};
      modified.push_back(t);
    }
    y.y[p - t] = std::conj(y.y[t]);
  }
  return modified;
}

// Snap discrete cells of the given columns to their 10^(-d) grid (ties to
// the even grid index via round-half-even) and clip every cell into the
// schema bounds.
inline void round_and_clip(Table& t, const std::vector<int>& columns, EmbedReport* report = nullptr) {
  const int old_mode = std::fegetround();
  std::fesetround(FE_TONEAREST);  // nearbyint ties-to-even
  double magnitude_sum = 0.0;
  long rounded = 0, clipped = 0;
  for (int j : columns) {
    const ColumnSchema& cs = t.schema[j];
    if (!cs.numeric()) continue;
    const bool discrete = cs.kind.type == ColumnType::discrete;
    const double scale = discrete ? std::pow(10.0, cs.kind.decimals) : 1.0;
    for (auto& row : t.values) {
      double v = row[j];
      if (discrete) {
        double snapped = std::nearbyint(v * scale) / scale;
        if (snapped != v) {
          magnitude_sum += std::abs(snapped - v);
          ++rounded;
          v = snapped;
        }
      }
      if (cs.lower && v < *cs.lower) {
        v = *cs.lower;
        ++clipped;
      }
      if (cs.upper && v > *cs.upper) {
        v = *cs.upper;
        ++clipped;
      }
      row[j] = v;
    }
  }
  std::fesetround(old_mode);
  if (report) {
    report->rounded_cells = rounded;
    report->clipped_cells = clipped;
    report->rounding_magnitude_mean = rounded ? magnitude_sum / double(rounded) : 0.0;
  }
}

inline std::vector<int> resolve_watermark_columns(const Table& t, const EmbedConfig& cfg) {
  std::vector<int> cols = cfg.watermark_columns.empty() ? t.numeric_columns() : cfg.watermark_columns;
  if (int(cols.size()) < 3)
    throw std::invalid_argument("embed: need at least 3 watermark columns (m >= 1)");
  for (int c : cols)
    if (c < 0 || c >= int(t.cols()))
      throw std::invalid_argument("embed: watermark column index out of range");
  return cols;
}

// Full embedding. When `frozen` is supplied its YJT parameters are reused
// instead of refitting (the idealized setting); otherwise parameters are
// fitted on the input table.
inline EmbedResult embed(const Table& t, const EmbedConfig& cfg,
                         const std::optional<TransformState>& frozen = std::nullopt) {
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw std::invalid_argument("embed: gamma outside [0,1]");
  if (!(cfg.delta >= -1.0 && cfg.delta <= 1.0)) throw std::invalid_argument("embed: delta outside [-1,1]");
  if (t.rows() == 0) throw std::invalid_argument("embed: empty table");

  TransformState tmpl;
  if (frozen) {
    tmpl = *frozen;
    tmpl.refit = false;
  } else {
    tmpl.columns = resolve_watermark_columns(t, cfg);
    if (cfg.privacy) tmpl.permutation = derive_permutation(cfg.key, int(tmpl.columns.size()));
    tmpl.refit = true;
  }

  auto [z, state] = fit_transform(t, tmpl);
  const int p = state.p();
  const int m = (p - 1) / 2;
  if (m < 1) throw std::invalid_argument("embed: p too small, no effective entries");

  auto bits = bits_for_table(z, cfg.key, m, cfg.bit_mode, cfg.privacy);

  EmbedResult res;
  res.report.modified_sets.resize(t.rows());
  res.report.quantile_thresholds.resize(t.rows());

  DftPlan plan(p);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    SpectralRow spec = plan.forward(z[i].data());
    res.report.modified_sets[i] =
        modify_row(spec, bits[i], cfg.gamma, cfg.delta, &res.report.quantile_thresholds[i]);
    z[i] = plan.inverse(spec);
  }

  res.table = inverse_transform(z, state, t);
  if (cfg.postprocess) round_and_clip(res.table, state.columns, &res.report);
  res.state = std::move(state);
  res.state.refit = false;  // ready for frozen re-detection
  res.bits = std::move(bits);
  return res;
}

}  // namespace tabdrw
