// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/bitstring.hpp"

#include <bit>

#include "unfold/errors.hpp"

namespace unfold {

namespace {

std::size_t words_for(int n) { return (static_cast<std::size_t>(n) + 63) / 64; }

} // namespace

BitString BitString::zeros(int n) {
  if (n < 1)
    throw ValidationError("bitstring length must be positive");
  BitString b;
  b.n_ = n;
  b.words_.assign(words_for(n), 0);
  return b;
}

BitString BitString::ones(int n) {
  BitString b = zeros(n);
  for (std::size_t w = 0; w < b.words_.size(); ++w)
    b.words_[w] = ~std::uint64_t{0};
  // clear padding below the last used bit
  const int used = ((n - 1) & 63) + 1;
  b.words_.back() &= ~std::uint64_t{0} << (64 - used);
  return b;
}

BitString BitString::from_string(std::string_view text) {
  if (text.empty())
    throw ValidationError("empty bitstring");
  BitString b = zeros(static_cast<int>(text.size()));
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '1')
      b.words_[k >> 6] |= std::uint64_t{1} << (63 - (k & 63));
    else if (text[k] != '0')
      throw ValidationError("bitstring contains a character other than 0/1: '" +
                            std::string(text) + "'");
  }
  return b;
}

BitString BitString::with_bit(int k, bool value) const {
  BitString b = *this;
  const std::uint64_t mask = std::uint64_t{1} << (63 - (k & 63));
  if (value)
    b.words_[static_cast<std::size_t>(k) >> 6] |= mask;
  else
    b.words_[static_cast<std::size_t>(k) >> 6] &= ~mask;
  return b;
}

BitString BitString::with_flipped(int k) const {
  BitString b = *this;
  b.words_[static_cast<std::size_t>(k) >> 6] ^=
      std::uint64_t{1} << (63 - (k & 63));
  return b;
}

std::string BitString::str() const {
  std::string s(static_cast<std::size_t>(n_), '0');
  for (int k = 0; k < n_; ++k)
    if (bit(k))
      s[static_cast<std::size_t>(k)] = '1';
  return s;
}

int BitString::hamming_distance(const BitString &other) const {
  if (n_ != other.n_)
    throw ValidationError("hamming distance between bitstrings of different length");
  int d = 0;
  for (std::size_t w = 0; w < words_.size(); ++w)
    d += std::popcount(words_[w] ^ other.words_[w]);
  return d;
}

std::strong_ordering BitString::operator<=>(const BitString &other) const {
  const std::size_t common = std::min(words_.size(), other.words_.size());
  for (std::size_t w = 0; w < common; ++w) {
    if (words_[w] != other.words_[w])
      return words_[w] < other.words_[w] ? std::strong_ordering::less
                                         : std::strong_ordering::greater;
  }
  return n_ <=> other.n_;
}

std::size_t BitStringHash::operator()(const BitString &b) const noexcept {
  // splitmix64-style mixing over the packed words
  std::uint64_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(b.size());
  for (std::size_t w = 0; w < b.word_count(); ++w) {
    std::uint64_t z = b.word_data()[w] + 0x9e3779b97f4a7c15ull + h;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    h = z ^ (z >> 31);
  }
  return static_cast<std::size_t>(h);
}

std::uint64_t bitstring_to_index(const BitString &b) {
  if (b.size() > 63)
    throw ValidationError("bitstring too long for a 64-bit index");
  return b.word_data()[0] >> (64 - b.size());
}

BitString index_to_bitstring(std::uint64_t index, int n) {
  BitString b = BitString::zeros(n);
  for (int k = 0; k < n; ++k)
    if ((index >> (n - 1 - k)) & 1u)
      b = b.with_bit(k, true);
  return b;
}

} // namespace unfold
