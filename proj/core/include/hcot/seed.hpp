#pragma once

#include <cstdint>

namespace hcot {

/// Independent random streams derived from one master seed.
enum class SeedStream : std::uint64_t {
  data = 1,
  init = 2,
  shuffle = 3,
  augment = 4,
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// derive_seed(s, k) = splitmix64(s + k * 0x9E3779B97F4A7C15).
///
/// Used for every seed fan-out in the project: master -> stream, and
/// stream -> (epoch, batch) counters.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) noexcept;

inline std::uint64_t derive_seed(std::uint64_t master, SeedStream stream) noexcept {
  return derive_seed(master, static_cast<std::uint64_t>(stream));
}

}  // namespace hcot
