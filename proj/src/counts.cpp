// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/counts.hpp"

#include <algorithm>
#include <string>

#include "unfold/errors.hpp"

namespace unfold {

CountsTable CountsTable::from_entries(std::vector<Entry> entries,
                                      std::uint64_t shots) {
  if (entries.empty())
    throw ValidationError("empty dataset: counts table has no entries");
  if (shots < 1)
    throw ValidationError("shot count must be positive");

  std::sort(entries.begin(), entries.end(),
            [](const Entry &a, const Entry &b) { return a.first < b.first; });

  const int n = entries.front().first.size();
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].first.size() != n)
      throw ValidationError("counts table keys have mixed lengths");
    if (i > 0 && entries[i].first == entries[i - 1].first)
      throw ValidationError("duplicate bitstring in counts table: " +
                            entries[i].first.str());
    total += entries[i].second;
  }
  if (total != shots)
    throw ValidationError("inconsistent shot count: entries sum to " +
                          std::to_string(total) + " but shots = " +
                          std::to_string(shots));

  CountsTable t;
  t.n_ = n;
  t.shots_ = shots;
  t.entries_ = std::move(entries);
  return t;
}

std::uint64_t CountsTable::count_of(const BitString &b) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), b,
      [](const Entry &e, const BitString &key) { return e.first < key; });
  if (it == entries_.end() || !(it->first == b))
    return 0;
  return it->second;
}

std::vector<BitString> CountsTable::observed() const {
  std::vector<BitString> keys;
  keys.reserve(entries_.size());
  for (const auto &[b, c] : entries_)
    keys.push_back(b);
  return keys;
}

} // namespace unfold
