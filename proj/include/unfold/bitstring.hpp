// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_BITSTRING_HPP
#define UNFOLD_BITSTRING_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace unfold {

// Fixed-length binary outcome label over n qubits.
//
// Convention: the leftmost character of the text form is qubit 0. Bits are
// packed MSB-first into 64-bit words so that comparing word arrays
// lexicographically coincides with lexicographic order of the text form.
// Immutable after construction.
class BitString {
public:
  BitString() = default;

  static BitString zeros(int n);
  static BitString ones(int n);
  // Parses a string of '0'/'1' characters; anything else is rejected.
  static BitString from_string(std::string_view text);

  int size() const { return n_; }
  bool empty() const { return n_ == 0; }

  // Value of the bit for qubit k (0-based, leftmost character).
  bool bit(int k) const {
    return (words_[static_cast<std::size_t>(k) >> 6] >> (63 - (k & 63))) & 1u;
  }

  BitString with_bit(int k, bool value) const;
  BitString with_flipped(int k) const;

  std::string str() const;
  int hamming_distance(const BitString &other) const;

  const std::uint64_t *word_data() const { return words_.data(); }
  std::size_t word_count() const { return words_.size(); }

  std::strong_ordering operator<=>(const BitString &other) const;
  bool operator==(const BitString &other) const = default;

private:
  int n_ = 0;
  std::vector<std::uint64_t> words_; // unused low bits of the last word are zero
};

struct BitStringHash {
  std::size_t operator()(const BitString &b) const noexcept;
};

// Index in [0, 2^n) of a bitstring read as a binary number with qubit 0 as the
// most significant digit; this is also its rank in lexicographic order.
std::uint64_t bitstring_to_index(const BitString &b);
BitString index_to_bitstring(std::uint64_t index, int n);

} // namespace unfold

#endif
