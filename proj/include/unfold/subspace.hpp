// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_SUBSPACE_HPP
#define UNFOLD_SUBSPACE_HPP

#include <cstddef>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "unfold/bitstring.hpp"

namespace unfold {

// Ordered set of tracked bitstrings with O(1) index lookup. Members are kept
// in canonical lexicographic order so every vector aligned with a subspace is
// reproducible across runs. Immutable after construction.
class Subspace {
public:
  // Sorts and deduplicates; rejects empty or mixed-length input.
  // `radius` records the Hamming radius the set was built with (nullopt for
  // user-supplied member lists).
  static std::shared_ptr<const Subspace>
  from_members(std::vector<BitString> members,
               std::optional<int> radius = std::nullopt);

  int qubit_count() const { return n_; }
  std::size_t size() const { return members_.size(); }
  const std::vector<BitString> &members() const { return members_; }
  const BitString &member(std::size_t i) const { return members_[i]; }
  std::optional<int> hamming_radius() const { return radius_; }

  bool contains(const BitString &b) const { return index_.count(b) != 0; }
  std::optional<std::size_t> find(const BitString &b) const;
  // Throws if the bitstring is not a member.
  std::size_t index_of(const BitString &b) const;

private:
  Subspace() = default;

  int n_ = 0;
  std::optional<int> radius_;
  std::vector<BitString> members_;
  std::unordered_map<BitString, std::size_t, BitStringHash> index_;
};

using SubspacePtr = std::shared_ptr<const Subspace>;

// All bitstrings within Hamming distance d of any seed, sorted. Enumerates
// combinations of flipped positions per seed rather than scanning 2^n strings.
SubspacePtr build_subspace(const std::vector<BitString> &seeds, int d, int n);

// Every bitstring of length n (capped at 30 to bound memory).
SubspacePtr full_subspace(int n);

} // namespace unfold

#endif
