#pragma once

#include <cstdint>

namespace ritzlab {

// Seeded pseudo-randomness with a fixed generator contract.
//
// All randomized sampling in the library goes through SplitMix64: 64 bits of
// state, the published increment/finalizer constants, and a fixed mapping from
// bits to doubles.  Unlike the std:: distributions (whose output is
// implementation-defined), this makes every sampled report reproducible
// bit-for-bit across platforms and compilers.
//
// at(seed, k) is the counter form: element k of the stream in O(1).  It is
// used to derive independent substreams (one per trial, one per coordinate
// index), so concurrent or out-of-order evaluation draws identical values.

struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    return finalize(state);
  }

  // Element k of the stream started at `seed`, without walking the stream.
  static std::uint64_t at(std::uint64_t seed, std::uint64_t k) {
    return finalize(seed + (k + 1) * 0x9E3779B97F4A7C15ull);
  }

  // Independent generator for trial/case number k under a master seed.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t k) {
    return SplitMix64(at(seed, k));
  }

  // Uniform on [0, 1): the top 53 bits scaled by 2^-53.
  static double unit_from_bits(std::uint64_t u) {
    return static_cast<double>(u >> 11) * (1.0 / 9007199254740992.0);
  }

  double next_unit() { return unit_from_bits(next()); }

  // Uniform on [-1, 1).
  double next_pm1() { return 2.0 * next_unit() - 1.0; }
};

}  // namespace ritzlab
