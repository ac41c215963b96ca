#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace l1rls {

// splitmix64 finalizer, used to derive decorrelated stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t domain, std::uint64_t a,
                                 std::uint64_t b) {
  std::uint64_t h = mix64(seed + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (domain + 0x9E3779B97F4A7C15ULL));
  h = mix64(h ^ (a + 0xBF58476D1CE4E5B9ULL));
  h = mix64(h ^ (b + 0x94D049BB133111EBULL));
  return h;
}

/// Seedable random stream with an explicit Box-Muller normal sampler.
/// mt19937_64 output and the samplers below are fully specified, so a stream
/// replays bit-identically for a given seed (std::normal_distribution does
/// not guarantee that across standard libraries).
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) via rejection (no modulo bias).
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % bound;
    std::uint64_t v;
    do { v = gen_(); } while (v >= limit);
    return v % bound;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double stddev) { return stddev <= 0.0 ? 0.0 : stddev * normal(); }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stream family rooted at a scenario seed. Streams are split per purpose and
/// per (sensor, time), so any runner (plain, fusion-center, fusion-free)
/// consumes identical randomness for the same scenario.
class ScenarioRng {
 public:
  explicit ScenarioRng(std::uint64_t seed) : seed_(seed) {}

  StreamRng signal_stream() const { return StreamRng(stream_seed(seed_, kSignal, 0, 0)); }
  StreamRng sample_stream(int sensor, long t) const {
    return StreamRng(stream_seed(seed_, kSample, static_cast<std::uint64_t>(sensor),
                                 static_cast<std::uint64_t>(t)));
  }
  StreamRng evolve_stream(long t) const {
    return StreamRng(stream_seed(seed_, kEvolve, 0, static_cast<std::uint64_t>(t)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr std::uint64_t kSignal = 1;
  static constexpr std::uint64_t kSample = 2;
  static constexpr std::uint64_t kEvolve = 3;
  std::uint64_t seed_;
};

}  // namespace l1rls
