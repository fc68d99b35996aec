#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace zigzag {

/// Generator identity recorded in every output file's metadata.
inline constexpr const char* kRngName = "mt19937_64/splitmix64-seeded";

std::uint64_t splitmix64(std::uint64_t x);

/// Bit pattern of a double, for hashing real-valued keys.
std::uint64_t double_bits(double x);

/// Order-sensitive hash of a key tuple. Used to derive independent
/// substreams, e.g. one per (set, kappa, epsilon, seed, replicate).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

/// Seedable 64-bit generator. Uniform variates are built directly from the
/// top 53 bits of the engine output so streams are identical across
/// standard libraries (std::uniform_real_distribution is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Uniform on the open interval (lo, hi); endpoints are re-drawn.
  double open_uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace zigzag
