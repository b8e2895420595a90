#pragma once
// Deterministic random-number generation with chunk-splittable streams.
//
// Every stochastic routine in this library draws its randomness through a
// fixed-size chunking scheme: the replicate index space [0, m) is cut into
// chunks of kChunkSize replicates, each chunk owns a generator seeded purely
// from (seed, chunk_index), and per-chunk partial results are reduced in
// chunk order.  Results are therefore bit-identical for a fixed seed no
// matter how many worker threads participate, and independent of scheduling.
//
// The generator is xoshiro256++ (public-domain algorithm by Blackman and
// Vigna) seeded through SplitMix64, chosen over std::mt19937_64 because the
// standard library's distributions are not bit-reproducible across
// implementations; uniforms here are derived from the raw 64-bit stream with
// a fixed mapping.

#include <array>
#include <cstdint>

namespace wtail {

/// One step of the SplitMix64 sequence; advances `state` and returns the next
/// output.  Used only for seeding.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
    // The all-zero state is the one invalid state for xoshiro.  SplitMix64
    // cannot realistically produce it, but the guard is cheap and explicit.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
      state_[0] = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next_u64() {
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

  /// Uniform draw strictly inside (0,1): (k + 1/2) * 2^-53 with k the top 53
  /// bits of the stream.  Never returns 0 or 1, so quantile transforms and
  /// logs are always safe.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

/// Replicates per chunk.  Fixed for all time: changing it would change every
/// simulated result for a given seed.
inline constexpr std::uint64_t kChunkSize = 4096;

/// Generator owning chunk `chunk_index` of the stream identified by `seed`.
inline Xoshiro256pp chunk_rng(std::uint64_t seed, std::uint64_t chunk_index) {
  std::uint64_t s = seed;
  std::uint64_t base = splitmix64_next(s);
  // Mix the chunk index through a second SplitMix64 pass so that nearby
  // seeds / nearby chunks do not share correlated states.
  std::uint64_t t = base ^ (0xD1B54A32D192ED03ULL * (chunk_index + 1));
  return Xoshiro256pp(splitmix64_next(t));
}

inline std::uint64_t chunk_count(std::uint64_t m) {
  return (m + kChunkSize - 1) / kChunkSize;
}

}  // namespace wtail
