#pragma once
#include <array>
#include <cstdint>
#include <string_view>

#include "ghostspec/errors.hpp"

namespace ghostspec {

/// Name of the generator, recorded in all output metadata so results can be
/// reproduced bit for bit.
inline constexpr std::string_view kRngName = "philox4x32-10";

/// Philox 4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw,
/// "Parallel random numbers: as easy as 1, 2, 3", SC'11). Each (key, stream)
/// pair yields an independent sequence of 2^64 128-bit blocks, which makes
/// per-trial substreams trivial: no state to carry, no skip-ahead needed.
class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t key, std::uint64_t stream = 0);

  /// Next 32 random bits.
  std::uint32_t next_u32();

  /// Next 64 random bits.
  std::uint64_t next_u64();

  /// Unbiased uniform integer in [0, bound); bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform01();

  /// One keyed block, exposed for test vectors.
  static std::array<std::uint32_t, 4> block(const std::array<std::uint32_t, 4>& counter,
                                            const std::array<std::uint32_t, 2>& key);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_index_;
  std::array<std::uint32_t, 4> buffer_;
  int position_;  // next lane to hand out, 4 = exhausted
};

/// Exact Poisson sample with the given mean: sequential inversion below
/// mean 10, Hoermann's PTRS transformed rejection above (no Gaussian
/// approximation at any mean).
std::int64_t sample_poisson(Philox4x32& rng, double mean);

/// Derive a child seed from a parent seed and an index (splitmix64-style
/// mixing). Used for per-cell and per-trial substreams; collision-free in
/// practice and stable across platforms.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

}  // namespace ghostspec
