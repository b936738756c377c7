#pragma once

// Key-derived randomness and the rank-based Gray-code bit generator.
//
// Per-row pseudorandom bits are derived from the row's rank among all rows,
// scored by a weighted column sum tilted on a key-selected column subset.
// The normalized rank
// walks a binary tree; at tree level j the rank falls into bin
// k = floor(2^j * rank), and the emitted bits depend only on ceil(k/2),
// which makes adjacent leaf bins differ in at most one emitted pair
// (a 2-Gray code), so small rank drift between embedding and detection
// damages at most two bits.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tabdrw/prng.hpp"
#include "tabdrw/transform.hpp"

namespace tabdrw {

enum class BitMode { gray2, gray1 };

struct RankContext {
  std::vector<int> subset;             // key-selected column indices, sorted
  std::vector<double> scores;          // weighted column sums (keyed subset tilt, see score_weights)
  std::vector<double> normalized_ranks;  // rank/(N-1), in [0,1]; 0 when N==1
};

// ceil(p/2) distinct column indices, sampled without replacement from the
// key's "subset" stream.
inline std::vector<int> derive_subset(std::uint64_t key, int p) {
  if (p < 2) throw std::invalid_argument("derive_subset: p must be >= 2");
  Prng g = keyed_prng(key, "subset");
  return sample_without_replacement(g, p, (p + 1) / 2);
}

// Keyed column permutation for the privacy-enhanced variant.
inline std::vector<int> derive_permutation(std::uint64_t key, int p) {
  if (p < 1) throw std::invalid_argument("derive_permutation: p must be >= 1");
  Prng g = keyed_prng(key, "perm");
  return random_permutation(g, p);
}

namespace detail {

// Gram-Schmidt helper: orthonormalize `vectors` in place, dropping
// near-null directions.
inline std::vector<std::vector<double>> orthonormal_basis(std::vector<std::vector<double>> vectors) {
  std::vector<std::vector<double>> basis;
  for (std::vector<double>& v : vectors) {
    const std::size_t d = v.size();
    for (const auto& u : basis) {
      double dot = 0.0;
      for (std::size_t j = 0; j < d; ++j) dot += v[j] * u[j];
      for (std::size_t j = 0; j < d; ++j) v[j] -= dot * u[j];
    }
    double nn = 0.0;
    for (double x : v) nn += x * x;
    if (nn > 1e-18) {
      const double inv = 1.0 / std::sqrt(nn);
      for (double& x : v) x *= inv;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

inline void project_out(std::vector<double>& a, const std::vector<std::vector<double>>& basis) {
  const std::size_t d = a.size();
  for (const auto& u : basis) {
    double dot = 0.0;
    for (std::size_t j = 0; j < d; ++j) dot += a[j] * u[j];
    for (std::size_t j = 0; j < d; ++j) a[j] -= dot * u[j];
  }
}

// Score weights for the rank context. A naive sum over the subset columns
// correlates with the imaginary spectral components (both are linear in the
// same row), so the sign of Im(y_t) is predictable from the row's rank bin.
// That couples the rank-derived bits to the very signs they are compared
// against, which biases the Z statistic on clean data and lets one key's
// watermark inflate another key's detector. Two constructions remove the
// coupling, trading rank stability against cross-key independence:
//
//  * Base variant (robust ranks). The all-ones vector over the full column
//    range is orthogonal to every direction sin(2*pi*t*j/p) (each sums to
//    zero over a full period), so a plain all-column sum is invariant under
//    any embedding: the watermark perturbation, under any key and any
//    column order, lies in the span of those directions. Ranks then survive
//    watermarking, rewatermarking, and noise almost untouched. A small
//    keyed +-eta tilt on the subset columns keeps rank orders of distinct
//    keys from coinciding exactly. The tilt is projected orthogonal to the
//    spectral pair differences c_{2l-1} - c_{2l} (and the final unpaired
//    direction when m is odd): entries 2l-1 and 2l carry complementary bits
//    [b, 1-b] of one tree level, so their sign-vs-rank couplings cancel
//    whenever corr(score, Im(y_{2l-1})) = corr(score, Im(y_{2l})), which
//    those constraints enforce.
//
//  * Privacy variant (keyed ranks). Multi-key deployments detect the same
//    table under many keys, so rank orders of distinct keys must be
//    statistically unrelated or one key's sign clusters inflate another
//    key's detector. Here the weights live on the subset columns alone and
//    are projected orthogonal to all m spectral directions restricted to
//    the subset; the subset holds ceil(p/2) >= m+1 columns, so a direction
//    exists. Scores are then uncorrelated with every Im(y_t) (independent
//    for Gaussian rows) and invariant under the key's own embedding, and
//    the key-selected support decorrelates the rank orders of distinct
//    keys.
inline std::vector<double> score_weights(std::uint64_t key, int p, const std::vector<int>& subset,
                                         bool keyed_ranks) {
  const int m = (p - 1) / 2;
  const double two_pi = 6.283185307179586476925286766559;

  if (keyed_ranks) {
    const std::size_t q = subset.size();
    std::vector<std::vector<double>> dirs;
    for (int t = 1; t <= m; ++t) {
      std::vector<double> v(q);
      for (std::size_t s = 0; s < q; ++s)
        v[s] = std::sin(two_pi * double(t) * double(subset[s]) / double(p));
      dirs.push_back(std::move(v));
    }
    const auto basis = orthonormal_basis(std::move(dirs));
    Prng g = keyed_prng(key, "score");
    std::vector<double> a(q, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
      project_out(a, basis);
      double nn = 0.0;
      for (double x : a) nn += x * x;
      if (nn > 1e-12 * double(q)) {
        const double scale = std::sqrt(double(q) / nn);  // match the spread of a plain sum
        std::vector<double> w(p, 0.0);
        for (std::size_t s = 0; s < q; ++s) w[subset[s]] = a[s] * scale;
        return w;
      }
      for (double& x : a) x = g.normal();  // ones lies in the spectral span; keyed restart
    }
    throw std::runtime_error("score_weights: no direction orthogonal to the spectral span");
  }

  auto imag_dir = [&](int t) {
    std::vector<double> v(p);
    for (int j = 0; j < p; ++j) v[j] = std::sin(two_pi * double(t) * double(j) / double(p));
    return v;
  };
  std::vector<std::vector<double>> constraints;
  for (int l = 1; 2 * l <= m; ++l) {
    std::vector<double> v = imag_dir(2 * l - 1);
    const std::vector<double> w = imag_dir(2 * l);
    for (int j = 0; j < p; ++j) v[j] -= w[j];
    constraints.push_back(std::move(v));
  }
  if (m % 2 == 1) constraints.push_back(imag_dir(m));
  const auto basis = orthonormal_basis(std::move(constraints));

  const double eta = 0.75;
  Prng g = keyed_prng(key, "score");
  std::vector<double> a(p, 1.0);
  for (int s : subset) a[s] += (g.next() & 1) ? eta : -eta;
  project_out(a, basis);
  double nn = 0.0;
  for (double x : a) nn += x * x;
  if (!(nn > 1e-12 * double(p)))
    throw std::runtime_error("score_weights: weights degenerated to zero");
  const double scale = std::sqrt(double(p) / nn);
  for (double& x : a) x *= scale;
  return a;
}

}  // namespace detail

// Scores, ranks, and normalized ranks for every row of a standardized
// matrix. Ranks are assigned by ascending score; ties are broken by
// lexicographic comparison of the full standardized row, which is
// deterministic and invariant under row shuffles. `keyed_ranks` selects the
// privacy-variant weighting (see score_weights).
inline RankContext rank_context(const Matrix& z, std::uint64_t key, bool keyed_ranks = false) {
  RankContext ctx;
  const std::size_t n = z.size();
  if (n == 0) throw std::invalid_argument("rank_context: empty matrix");
  const int p = int(z[0].size());
  ctx.subset = derive_subset(key, p);

  const std::vector<double> w = detail::score_weights(key, p, ctx.subset, keyed_ranks);
  ctx.scores.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < p; ++j) s += w[j] * z[i][j];
    ctx.scores[i] = s;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ctx.scores[a] != ctx.scores[b]) return ctx.scores[a] < ctx.scores[b];
    return std::lexicographical_compare(z[a].begin(), z[a].end(), z[b].begin(), z[b].end());
  });

  ctx.normalized_ranks.resize(n);
  if (n == 1) {
    ctx.normalized_ranks[0] = 0.0;
  } else {
    for (std::size_t r = 0; r < n; ++r)
      ctx.normalized_ranks[order[r]] = double(r) / double(n - 1);
  }
  return ctx;
}

// Leaf bin at tree level j for a normalized rank; rank 1.0 clamps into the
// last bin.
inline std::uint64_t rank_bin(double rank_norm, int level) {
  level = std::min(level, 62);  // doubles carry no rank information past ~2^53 bins anyway
  const std::uint64_t leaves = std::uint64_t(1) << level;
  std::uint64_t k = std::uint64_t(double(leaves) * rank_norm);
  return std::min(k, leaves - 1);
}

namespace detail {

// One keyed hash bit for a (level, slot) node position.
inline std::uint8_t node_hash_bit(std::uint64_t bit_key, int level, std::uint64_t slot) {
  std::uint64_t z = bit_key ^ (0x9E3779B97F4A7C15ULL * ((std::uint64_t(level) << 56) + slot + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return std::uint8_t((z ^ (z >> 31)) & 1);
}

// The level-j bit of bin k may only depend on half = ceil(k/2): this is
// exactly the constraint under which adjacent leaves differ in at most one
// level (the classic k%4-in-{0,3} rule is the parity of ceil(k/2)). Two
// properties of that fixed rule must be kept when the assignment is keyed:
//
//  * Balance. Weighted by the number of bins each half index covers, the
//    +/-1 values of any level must sum to zero, otherwise every embedding
//    pushes the column means in a bit-dependent direction and the
//    standardization refitted at detection time drifts away from the one
//    used at embedding time.
//  * Key independence. Node values of distinct keys must be statistically
//    independent, or one key's watermark biases another key's detector.
//
// Keyed form: the outer halves 0 and L = 2^(level-1) (single-bin weight)
// share a keyed bit c, the last interior half L-1 takes 1-c, and the
// remaining interior halves (double-bin weight) are paired (1,2), (3,4), ...
// with opposite bits inside each pair and an independent keyed bit per
// pair. Every such assignment is exactly balanced, and the unkeyed parity
// rule is one member of the family.
inline std::uint8_t level_bit(std::uint64_t k, int level, std::uint64_t bit_key, bool keyed) {
  const std::uint64_t half = (k + 1) / 2;
  if (!keyed) return (half % 2 == 0) ? 1 : 0;  // k % 4 in {0, 3}
  const int shift = std::min(level - 1, 62);
  const std::uint64_t L = std::uint64_t(1) << shift;
  const std::uint8_t c = node_hash_bit(bit_key, level, 0);
  if (L == 1) return half == 0 ? c : 1 - c;  // level 1 is a signed median split
  if (half == 0 || half == L) return c;
  if (half == L - 1) return 1 - c;
  const std::uint64_t pair = (half - 1) / 2;
  return node_hash_bit(bit_key, level, pair + 1) ^ std::uint8_t((half - 1) % 2);
}

}  // namespace detail

// Bits for one normalized rank.
//   gray2: levels j = 1..ceil(m/2) each emit a pair [b, 1-b]; the
//          concatenation is truncated to m bits.
//   gray1: levels j = 1..m each emit the single bit b.
// In the unkeyed reference form b is 1 iff k%4 is 0 or 3 for the level's bin
// k. When a key is supplied, b additionally depends on a per-level keyed
// hash, which preserves every structural property (Gray adjacency,
// piecewise constancy on the leaf bins, shuffle invariance) but makes the
// bit streams of distinct keys statistically independent.
inline std::vector<std::uint8_t> bits_for_rank(double rank_norm, int m,
                                               BitMode mode = BitMode::gray2,
                                               std::optional<std::uint64_t> key = std::nullopt) {
  if (!(rank_norm >= 0.0 && rank_norm <= 1.0))
    throw std::invalid_argument("bits_for_rank: rank must lie in [0,1]");
  if (m < 1) throw std::invalid_argument("bits_for_rank: m must be >= 1");
  const bool keyed = key.has_value();
  const std::uint64_t bit_key = keyed ? keyed_prng(*key, "bits").next() : 0;
  std::vector<std::uint8_t> bits;
  bits.reserve(m + 1);
  if (mode == BitMode::gray2) {
    const int levels = (m + 1) / 2;
    for (int j = 1; j <= levels; ++j) {
      const std::uint8_t b = detail::level_bit(rank_bin(rank_norm, j), j, bit_key, keyed);
      bits.push_back(b);
      bits.push_back(1 - b);
    }
    bits.resize(m);
  } else {
    for (int j = 1; j <= m; ++j)
      bits.push_back(detail::level_bit(rank_bin(rank_norm, j), j, bit_key, keyed));
  }
  return bits;
}

// Per-row bit sequences for a whole standardized matrix (keyed form).
inline std::vector<std::vector<std::uint8_t>> bits_for_table(const Matrix& z, std::uint64_t key,
                                                             int m,
                                                             BitMode mode = BitMode::gray2,
                                                             bool keyed_ranks = false) {
  RankContext ctx = rank_context(z, key, keyed_ranks);
  std::vector<std::vector<std::uint8_t>> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = bits_for_rank(ctx.normalized_ranks[i], m, mode, key);
  return out;
}

}  // namespace tabdrw
