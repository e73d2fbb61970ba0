#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>

namespace rydcount {

// Seed plumbing: one root seed, independent streams per purpose.  Toggling a
// feature that consumes one stream must not shift the draws of another, so
// every consumer derives its own stream seed from (root, purpose, indices).
enum class Stream : std::uint64_t {
  times = 1,
  measure = 2,
  feed_forward = 3,
  oracle = 4,
  count_step = 5,
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, Stream purpose,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  const std::uint64_t golden = 0x9e3779b97f4a7c15ull;
  std::uint64_t h = mix64(root + golden);
  h = mix64(h ^ (static_cast<std::uint64_t>(purpose) + golden));
  h = mix64(h ^ (a + golden));
  h = mix64(h ^ (b + golden));
  return h;
}

// mt19937_64 with hand-rolled output mappings.  The std:: distributions are
// implementation-defined, which would break byte-identical replay across
// standard libraries; these mappings are pinned.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [lo, hi).  53-bit mantissa draw.
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  // Uniform in [0, bound) without modulo bias (Lemire).
  std::uint64_t uniform_index(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
      const std::uint64_t t = (0 - bound) % bound;
      while (lo < t) {
        m = static_cast<unsigned __int128>(next_u64()) * bound;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::mt19937_64 eng_;
};

// Inverse-CDF draw from a cumulative weight table (ascending, cum.back() is
// the total mass).  u01 in [0,1).
inline std::size_t draw_cumulative(std::span<const double> cum, double u01) {
  const double target = u01 * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), target);
  std::size_t idx = static_cast<std::size_t>(it - cum.begin());
  if (idx >= cum.size()) idx = cum.size() - 1;
  return idx;
}

}  // namespace rydcount
