#pragma once

#include <cstdint>
#include <random>

namespace precarity {

using Rng = std::mt19937_64;

enum class StreamPurpose : std::uint32_t {
  Population = 1,
  Household = 2,
  Test = 3,
};

/// Independent random stream keyed by (seed, purpose, a, b). Streams do not
/// depend on the order in which they are created, so per-household draws are
/// identical under sequential and parallel execution.
inline Rng make_stream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t a = 0,
                       std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose),
                    static_cast<std::uint32_t>(a),    static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b),    static_cast<std::uint32_t>(b >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace precarity
