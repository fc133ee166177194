#pragma once

#include <cstdint>
#include <random>

namespace bell {

/// Identifier stored in every seeded artifact.
inline constexpr const char* kRngAlgorithm = "mt19937_64+splitmix64-derive";

/// Stream seed for (master seed, stream index): two rounds of the splitmix64
/// finalizer. Used for shard and per-sample seeds so results do not depend
/// on how work is split across threads.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Seeded 64-bit generator. Distribution helpers are implemented here
/// rather than with <random> distributions so output is identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);
  /// Uniform k in [0, 2^53); the uniform variate is k / 2^53.
  std::uint64_t uniform53() { return engine_() >> 11; }
  double uniform01() { return static_cast<double>(uniform53()) * 0x1.0p-53; }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bell
