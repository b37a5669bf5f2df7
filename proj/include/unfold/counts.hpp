// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_COUNTS_HPP
#define UNFOLD_COUNTS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "unfold/bitstring.hpp"

namespace unfold {

// Aggregated shot counts: outcome bitstring -> number of shots that produced
// it. Entries are kept sorted by bitstring; the entry counts must sum to the
// declared shot total. Immutable after construction.
class CountsTable {
public:
  using Entry = std::pair<BitString, std::uint64_t>;

  // Validates: non-empty, shots >= 1, uniform key length, counts sum == shots.
  static CountsTable from_entries(std::vector<Entry> entries,
                                  std::uint64_t shots);

  int qubit_count() const { return n_; }
  std::uint64_t shots() const { return shots_; }
  const std::vector<Entry> &entries() const { return entries_; }
  std::size_t distinct() const { return entries_.size(); }

  // Count for one bitstring, 0 if never observed.
  std::uint64_t count_of(const BitString &b) const;

  std::vector<BitString> observed() const;

private:
  CountsTable() = default;

  int n_ = 0;
  std::uint64_t shots_ = 0;
  std::vector<Entry> entries_; // sorted by bitstring, unique keys
};

} // namespace unfold

#endif
