#pragma once

#include <cstdint>

namespace disagg {

// Deterministic, platform-independent RNG: xoshiro256++ seeded through
// SplitMix64. Streams are derived as mix64(seed + GOLDEN*(stream+1)), so
// (seed, stream) pairs give independent, reproducible sequences; this is the
// scheme behind every seeded component (instance generation, share drawing,
// benchmarks).
class Rng {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix64(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  static std::uint64_t combine(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + kGolden * (stream + 1));
  }

  static Rng seeded(std::uint64_t seed) {
    Rng r;
    std::uint64_t s = seed;
    for (auto& w : r.s_) {
      s += kGolden;
      w = mix64(s);
    }
    if ((r.s_[0] | r.s_[1] | r.s_[2] | r.s_[3]) == 0) r.s_[0] = kGolden;
    return r;
  }

  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return seeded(combine(seed, stream_id));
  }

  static Rng stream2(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return seeded(combine(combine(seed, a), b));
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, bound] (inclusive), Lemire multiply-shift.
  std::uint64_t uniform_u64(std::uint64_t bound) {
    const unsigned __int128 m =
        static_cast<unsigned __int128>(next()) * (static_cast<unsigned __int128>(bound) + 1);
    return static_cast<std::uint64_t>(m >> 64);
  }

  int uniform_int(int lo, int hi) {  // inclusive range
    return lo + static_cast<int>(uniform_u64(static_cast<std::uint64_t>(hi - lo)));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4] = {1, 2, 3, 4};
};

// Stream ids used across the project.
inline constexpr std::uint64_t kStreamInstance = 1;
inline constexpr std::uint64_t kStreamSmc = 2;
inline constexpr std::uint64_t kStreamBench = 3;

}  // namespace disagg
