#pragma once

// Keyed deterministic randomness. Every random choice in the library flows
// through this generator so that embedder and detector agree across runs,
// platforms, and thread counts.
//
// Generator: splitmix64 (Steele, Lea, Flood 2014). State advances by the
// constant 0x9E3779B97F4A7C15 and the output is finalized with two
// xor-shift-multiply rounds. Streams are separated by hashing a purpose tag
// (FNV-1a) into the seed, so e.g. the "subset" and "perm" streams derived
// from the same key are unrelated.

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <string_view>
#include <vector>

namespace tabdrw {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

class Prng {
 public:
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) via the multiply-shift bound trick
  // (Lemire 2019, without the rejection step; the modulo bias at n << 2^64
  // is far below anything observable here).
  std::uint64_t below(std::uint64_t n) {
    return std::uint64_t((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Standard normal via Box-Muller; the second variate of each pair is
  // cached so consecutive calls consume exactly one pair per two calls.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Child generator with an independent stream; used for per-row /
  // per-trial parallel determinism.
  Prng derive(std::uint64_t stream_id) {
    std::uint64_t s = state_ ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1));
    Prng child(s);
    child.next();  // decouple from the raw xor
    return child;
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// The canonical stream for (key, purpose). The purpose tag keeps distinct
// uses of one watermark key (column subset, permutation, attack noise, ...)
// statistically independent.
inline Prng keyed_prng(std::uint64_t key, std::string_view purpose) {
  Prng p(key ^ fnv1a64(purpose));
  p.next();  // burn one state advance so key==hash collisions do not leak
  return p;
}

// Fisher-Yates shuffle of 0..n-1 driven by the given stream.
inline std::vector<int> random_permutation(Prng& g, int n) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    int j = int(g.below(std::uint64_t(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

// k distinct values from 0..n-1, sampled without replacement (partial
// Fisher-Yates), returned sorted ascending.
inline std::vector<int> sample_without_replacement(Prng& g, int n, int k) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int i = 0; i < k; ++i) {
    int j = i + int(g.below(std::uint64_t(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace tabdrw
