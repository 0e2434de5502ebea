#pragma once

// Seed derivation for reproducible, order-independent random streams.

#include <cstdint>

namespace dqst {

/// One step of the splitmix64 finalizer.
inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for the stream with the given index under a master seed. Streams
/// for different indices are independent of evaluation order.
inline std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  return SplitMix64(SplitMix64(master) ^ SplitMix64(index + 0x5851f42d4c957f2dULL));
}

}  // namespace dqst
