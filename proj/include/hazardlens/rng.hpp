#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hazardlens {

/// Identifies one reproducible random stream. Identical (master_seed,
/// stream_id) yields an identical stream regardless of execution order or
/// parallelism, so replicates and bootstrap draws can run in any order.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  SeedSpec substream(std::uint64_t k) const {
    return SeedSpec{master_seed, stream_id * 0x10000ULL + k};
  }
};

namespace detail {
inline std::uint64_t splitmix_mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}
}  // namespace detail

/// Counter-seeded xoshiro256++ stream with self-contained distributions.
/// std:: distributions are implementation-defined, so everything that must
/// be bit-reproducible is generated here.
class RngStream {
 public:
  explicit RngStream(SeedSpec seed) {
    std::uint64_t x = seed.master_seed;
    x = detail::splitmix_mix(x + 0x9e3779b97f4a7c15ULL);
    x = detail::splitmix_mix(x ^ (seed.stream_id + 0x632be59bd9b4e019ULL));
    for (auto& si : s_) {
      x += 0x9e3779b97f4a7c15ULL;
      si = detail::splitmix_mix(x);
    }
    if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
  }

  std::uint64_t next_u64() {
    auto rotl = [](std::uint64_t v, int k) {
      return (v << k) | (v >> (64 - k));
    };
    std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on the open interval (0, 1); never returns an endpoint.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Exp(1) draw.
  double exponential() { return -std::log(uniform01()); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Gamma(shape, scale) by Marsaglia-Tsang, with the power boost for
  /// shape < 1.
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
      throw std::domain_error("gamma: shape and scale must be positive");
    if (shape < 1.0) {
      double u = uniform01();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
        return d * v * scale;
    }
  }

  /// Uniform integer in [0, n), unbiased enough for resampling use.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hazardlens
