// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_RNG_HPP
#define UNFOLD_RNG_HPP

#include <cstdint>

namespace unfold {

/// SplitMix64: the output is a fixed 64-bit mix of an incrementing counter,
/// so identical seeds give identical streams on every platform. Used for all
/// sampling so counts files are reproducible bit for bit.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

private:
  std::uint64_t state_;
};

/// Derives an independent sub-seed for a named stream (shard index,
/// resample index, sweep cell, ...). Pure mixing, no shared state.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  SplitMix64 g(base ^ (0xD1B54A32D192ED03ull * (stream + 1)));
  return g.next();
}

} // namespace unfold

#endif
