#pragma once

// Post-processing and adaptive attacks for robustness benchmarking. Every
// attack is a pure function of (table, spec, seed); replacement-based
// attacks draw from a caller-supplied reference table of unwatermarked rows
// and fall back to bootstrap-resampling the attacked table's own column
// (with a warning on stderr) when none is given.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabdrw/embed.hpp"
#include "tabdrw/keying.hpp"
#include "tabdrw/prng.hpp"
#include "tabdrw/table.hpp"

namespace tabdrw {

enum class AttackKind {
  row_del,       // remove frac of the rows at random
  col_del,       // replace `count` random columns with reference values
  cell_del,      // replace frac of all cells with reference values
  g_noise,       // numeric cells: += N(0, (frac * |cell|)^2)
  c_noise,       // categorical cells: frac replaced from other rows, same column
  a_noise,       // numeric cells: + sigma * N(0,1) on the standardized scale
  truncation,    // numeric values truncated at the first significant digit
  quantization,  // numeric columns quantized to `bins` equal-count bins (bin median)
  resample,      // equalize class counts of a categorical target column
  shuffle,       // random row permutation
};

struct AttackSpec {
  AttackKind kind = AttackKind::shuffle;
  double frac = 0.1;       // row_del / cell_del / g_noise / c_noise
  int count = 2;           // col_del
  double sigma = 0.1;      // a_noise
  int bins = 10;           // quantization
  std::string target_col;  // resample
  std::uint64_t rng_seed = 0;
};

struct ReplacementSource {
  const Table* reference = nullptr;
};

namespace detail {

// One replacement value for column j: a uniformly chosen reference row's
// cell, or a bootstrap draw from the table's own column when no reference
// exists.
inline double replacement_cell(const Table& t, const ReplacementSource& src, int j, Prng& g,
                               bool& warned) {
  if (src.reference) {
    const Table& ref = *src.reference;
    if (ref.cols() != t.cols())
      throw std::invalid_argument("attack: reference schema does not match target");
    if (ref.rows() == 0) throw std::invalid_argument("attack: empty reference table");
    return ref.values[g.below(ref.rows())][j];
  }
  if (!warned) {
    std::cerr << "warning: no reference table supplied; bootstrap-resampling the attacked "
                 "table's own columns for replacement values\n";
    warned = true;
  }
  return t.values[g.below(t.rows())][j];
}

inline Table keep_rows(const Table& t, const std::vector<char>& keep) {
  Table out;
  out.schema = t.schema;
  for (std::size_t i = 0; i < t.rows(); ++i)
    if (keep[i]) out.values.push_back(t.values[i]);
  return out;
}

// Truncate at the first significant digit: 123.45 -> 100, 0.0678 -> 0.06,
// sign preserved, zero fixed.
inline double truncate_first_significant(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  const double mag = std::abs(x);
  const double step = std::pow(10.0, std::floor(std::log10(mag)));
  return std::copysign(std::floor(mag / step) * step, x);
}

}  // namespace detail

inline Table apply_attack(const Table& t, const AttackSpec& spec,
                          const ReplacementSource& src = {}) {
  if (t.rows() == 0) throw std::invalid_argument("apply_attack: empty table");
  const std::size_t n = t.rows();
  const int p = int(t.cols());
  Prng g = keyed_prng(spec.rng_seed, "attack");
  bool warned = false;
  Table out = t;

  switch (spec.kind) {
    case AttackKind::row_del: {
      if (!(spec.frac >= 0.0 && spec.frac <= 1.0))
        throw std::invalid_argument("row_del: frac outside [0,1]");
      const std::size_t k = std::size_t(std::llround(spec.frac * double(n)));
      auto victims = sample_without_replacement(g, int(n), int(k));
      std::vector<char> keep(n, 1);
      for (int v : victims) keep[v] = 0;
      return detail::keep_rows(t, keep);
    }

    case AttackKind::col_del: {
      if (spec.count < 0 || spec.count > p) throw std::invalid_argument("col_del: bad column count");
      auto cols = sample_without_replacement(g, p, spec.count);
      for (int j : cols)
        for (std::size_t i = 0; i < n; ++i)
          out.values[i][j] = detail::replacement_cell(t, src, j, g, warned);
      return out;
    }

    case AttackKind::cell_del: {
      if (!(spec.frac >= 0.0 && spec.frac <= 1.0))
        throw std::invalid_argument("cell_del: frac outside [0,1]");
      const std::size_t total = n * std::size_t(p);
      const std::size_t k = std::size_t(std::llround(spec.frac * double(total)));
      // Partial Fisher-Yates over flattened cell indices.
      std::vector<std::size_t> cells(total);
      std::iota(cells.begin(), cells.end(), 0);
      for (std::size_t i = 0; i < k; ++i)
        std::swap(cells[i], cells[i + g.below(total - i)]);
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t row = cells[i] / p, col = cells[i] % p;
        out.values[row][col] = detail::replacement_cell(t, src, int(col), g, warned);
      }
      return out;
    }

    case AttackKind::g_noise: {
      for (int j = 0; j < p; ++j) {
        if (!t.schema[j].numeric()) continue;
        for (std::size_t i = 0; i < n; ++i)
          out.values[i][j] += g.normal() * spec.frac * std::abs(t.values[i][j]);
      }
      return out;
    }

    case AttackKind::c_noise: {
      if (!(spec.frac >= 0.0 && spec.frac <= 1.0))
        throw std::invalid_argument("c_noise: frac outside [0,1]");
      for (int j = 0; j < p; ++j) {
        if (t.schema[j].kind.type != ColumnType::categorical) continue;
        for (std::size_t i = 0; i < n; ++i)
          if (g.uniform() < spec.frac) out.values[i][j] = t.values[g.below(n)][j];
      }
      return out;
    }

    case AttackKind::a_noise: {
      if (spec.sigma < 0.0) throw std::invalid_argument("a_noise: negative sigma");
      std::vector<int> numeric = t.numeric_columns();
      for (int j : numeric) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += t.values[i][j];
        mean /= double(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          var += (t.values[i][j] - mean) * (t.values[i][j] - mean);
        const double sd = std::sqrt(var / double(n));
        const double scale = sd > 0.0 ? sd : 1.0;
        for (std::size_t i = 0; i < n; ++i)
          out.values[i][j] += g.normal() * spec.sigma * scale;
      }
      round_and_clip(out, numeric);  // F.4: round and clip out-of-range cells
      return out;
    }

    case AttackKind::truncation: {
      for (int j = 0; j < p; ++j) {
        if (!t.schema[j].numeric()) continue;
        for (std::size_t i = 0; i < n; ++i)
          out.values[i][j] = detail::truncate_first_significant(out.values[i][j]);
      }
      return out;
    }

    case AttackKind::quantization: {
      if (spec.bins < 2) throw std::invalid_argument("quantization: need >= 2 bins");
      for (int j = 0; j < p; ++j) {
        if (!t.schema[j].numeric()) continue;
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return t.values[a][j] < t.values[b][j]; });
        // Equal-count bins by rank; each value maps to its bin's median.
        for (int b = 0; b < spec.bins; ++b) {
          const std::size_t lo = n * std::size_t(b) / spec.bins;
          const std::size_t hi = n * std::size_t(b + 1) / spec.bins;
          if (lo >= hi) continue;
          const std::size_t mid = lo + (hi - lo) / 2;
          double median = t.values[order[mid]][j];
          if ((hi - lo) % 2 == 0)
            median = 0.5 * (median + t.values[order[mid - 1]][j]);
          for (std::size_t r = lo; r < hi; ++r) out.values[order[r]][j] = median;
        }
      }
      return out;
    }

    case AttackKind::resample: {
      const int target = t.column_index(spec.target_col);
      if (t.schema[target].kind.type != ColumnType::categorical)
        throw std::invalid_argument("resample: target column must be categorical");
      const int n_classes = int(t.schema[target].kind.codebook.size());
      std::vector<std::vector<std::size_t>> members(n_classes);
      for (std::size_t i = 0; i < n; ++i) members[int(t.values[i][target])].push_back(i);
      int present = 0;
      for (const auto& m : members) present += m.empty() ? 0 : 1;
      if (present == 0) throw std::invalid_argument("resample: no classes present");
      // Equal representation across the classes that occur, preserving N.
      std::vector<std::size_t> quota(n_classes, 0);
      std::size_t base = n / present, extra = n % present;
      for (int c = 0; c < n_classes; ++c)
        if (!members[c].empty()) quota[c] = base + (extra > 0 ? (--extra, 1) : 0);
      out.values.clear();
      for (int c = 0; c < n_classes; ++c)
        for (std::size_t k = 0; k < quota[c]; ++k)
          out.values.push_back(t.values[members[c][g.below(members[c].size())]]);
      return out;
    }

    case AttackKind::shuffle: {
      auto perm = random_permutation(g, int(n));
      for (std::size_t i = 0; i < n; ++i) out.values[i] = t.values[perm[i]];
      return out;
    }
  }
  throw std::logic_error("apply_attack: unhandled attack kind");
}

// Adaptive row deletion: score and rank the rows exactly as detection would,
// but with the attacker's own key, then delete the rows whose normalized
// ranks fall in a uniformly chosen interval of length frac.
inline Table adaptive_row_deletion(const Table& t, std::uint64_t attacker_key, double frac,
                                   std::uint64_t seed) {
  if (!(frac > 0.0 && frac < 1.0)) throw std::invalid_argument("adaptive_row_deletion: frac in (0,1)");
  EmbedConfig cfg;  // attacker uses the default pipeline view: all numeric columns
  TransformState tmpl;
  tmpl.columns = resolve_watermark_columns(t, cfg);
  tmpl.refit = true;
  auto [z, state] = fit_transform(t, tmpl);
  RankContext ctx = rank_context(z, attacker_key);

  Prng g = keyed_prng(seed, "adv-row-del");
  const double u = g.uniform() * (1.0 - frac);
  std::vector<char> keep(t.rows(), 1);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double r = ctx.normalized_ranks[i];
    if (r >= u && r < u + frac) keep[i] = 0;
  }
  return detail::keep_rows(t, keep);
}

// Rewatermarking: embed `n_keys` more watermarks (privacy variant) with
// fresh random keys drawn from the seed.
inline Table rewatermark_attack(const Table& t, int n_keys, double gamma, double delta,
                                std::uint64_t seed) {
  if (n_keys < 0) throw std::invalid_argument("rewatermark_attack: negative key count");
  Prng g = keyed_prng(seed, "rewatermark");
  Table cur = t;
  for (int k = 0; k < n_keys; ++k) {
    EmbedConfig cfg;
    cfg.gamma = gamma;
    cfg.delta = delta;
    cfg.key = g.next();
    cfg.privacy = true;
    cur = embed(cur, cfg).table;
  }
  return cur;
}

}  // namespace tabdrw
