#pragma once

#include <cstdint>

namespace evchar {

// Counter-based generator: draw i of stream `seed` is the SplitMix64
// finalizer applied to seed + (i + 1) * 0x9E3779B97F4A7C15. This is exactly
// the i-th output of a SplitMix64 generator seeded with `seed`, but any draw
// can be computed independently of the others.
//
// Test vectors (seed 0): 0xE220A8397B1DCDAF, 0x6E789E6AA1B965F4,
// 0x06C45D188009454F.
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed + (index + 1) * kGolden);
}

// Top 53 bits mapped to the open interval (0, 1): ((z >> 11) + 0.5) * 2^-53.
// The smallest value is 2^-54 and the largest 1 - 2^-54.
constexpr double to_open_unit(std::uint64_t z) noexcept {
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

constexpr double counter_uniform(std::uint64_t seed, std::uint64_t index) noexcept {
  return to_open_unit(counter_draw(seed, index));
}

// Seed for replication `replication` at sample size `n`. Depends only on its
// three arguments, so adding grid points never changes existing trials.
constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t replication,
                                   std::uint64_t n) noexcept {
  return mix64(mix64(base_seed ^ mix64(replication + 1)) + n * kGolden);
}

}  // namespace evchar
