#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>

namespace tzliq::rng {

/// Identifies one reproducible random stream. Identical (seed, id) pairs
/// reproduce identical draw sequences bit-exactly on every platform; batch
/// code assigns one stream id per path.
struct Stream {
  std::uint64_t seed = 0;
  std::uint64_t id = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Marsaglia-Tsang ziggurat tables for the standard normal (128 strips).
struct ZigguratTables {
  std::uint32_t kn[128];
  double wn[128];
  double fn[128];
  ZigguratTables() {
    const double m1 = 2147483648.0;
    double dn = 3.442619855899;
    const double tn0 = dn;
    const double vn = 9.91256303526217e-3;
    double tn = tn0;
    double q = vn / std::exp(-0.5 * dn * dn);
    kn[0] = static_cast<std::uint32_t>((dn / q) * m1);
    kn[1] = 0;
    wn[0] = q / m1;
    wn[127] = dn / m1;
    fn[0] = 1.0;
    fn[127] = std::exp(-0.5 * dn * dn);
    for (int i = 126; i >= 1; --i) {
      dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
      kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m1);
      tn = dn;
      fn[i] = std::exp(-0.5 * dn * dn);
      wn[i] = dn / m1;
    }
  }
};

inline const ZigguratTables& ziggurat() {
  static const ZigguratTables tables;
  return tables;
}

}  // namespace detail

/// xoshiro256++ generator with splitmix64 stream seeding, plus the
/// distributions the simulators need. Deliberately self-contained so that
/// draw sequences do not depend on the standard library implementation.
class Xoshiro256 {
 public:
  explicit Xoshiro256(Stream stream) : zig_(&detail::ziggurat()) {
    std::uint64_t x = stream.seed ^ (0x9E3779B97F4A7C15ULL * (stream.id + 1));
    for (auto& word : state_) word = detail::splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal via the ziggurat method.
  double normal() {
    const auto& z = *zig_;
    for (;;) {
      const auto hz =
          static_cast<std::int64_t>(static_cast<std::int32_t>(static_cast<std::uint32_t>(next())));
      const int iz = static_cast<int>(hz & 127);
      const double x = static_cast<double>(hz) * z.wn[iz];
      if (static_cast<std::uint64_t>(hz < 0 ? -hz : hz) < z.kn[iz]) return x;
      if (iz == 0) {
        // tail beyond 3.442619...
        double xx, yy;
        do {
          xx = -std::log(uniform01() + 1e-300) * 0.2904764;
          yy = -std::log(uniform01() + 1e-300);
        } while (yy + yy < xx * xx);
        return hz > 0 ? 3.442619855899 + xx : -(3.442619855899 + xx);
      }
      const double f = z.fn[iz] + uniform01() * (z.fn[iz - 1] - z.fn[iz]);
      if (f < std::exp(-0.5 * x * x)) return x;
    }
  }

  /// Exponential with the given rate (rate > 0).
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  /// Draws an index with probability cum_weights[i]-cum_weights[i-1] over
  /// total; cum_weights must be nondecreasing with back() == total.
  std::size_t categorical(std::span<const double> cum_weights, double total) {
    const double u = uniform01() * total;
    std::size_t lo = 0, hi = cum_weights.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (cum_weights[mid] <= u) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
  const detail::ZigguratTables* zig_;
};

}  // namespace tzliq::rng
