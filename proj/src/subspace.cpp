// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/subspace.hpp"

#include <algorithm>
#include <string>

#include "unfold/errors.hpp"

namespace unfold {

std::shared_ptr<const Subspace>
Subspace::from_members(std::vector<BitString> members,
                       std::optional<int> radius) {
  if (members.empty())
    throw ValidationError("subspace must contain at least one bitstring");
  const int n = members.front().size();
  for (const auto &b : members)
    if (b.size() != n)
      throw ValidationError("subspace members have mixed lengths");
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());

  Subspace s;
  s.n_ = n;
  s.radius_ = radius;
  s.members_ = std::move(members);
  s.index_.reserve(s.members_.size());
  for (std::size_t i = 0; i < s.members_.size(); ++i)
    s.index_.emplace(s.members_[i], i);
  return std::make_shared<const Subspace>(std::move(s));
}

std::optional<std::size_t> Subspace::find(const BitString &b) const {
  auto it = index_.find(b);
  if (it == index_.end())
    return std::nullopt;
  return it->second;
}

std::size_t Subspace::index_of(const BitString &b) const {
  auto it = index_.find(b);
  if (it == index_.end())
    throw ValidationError("bitstring " + b.str() + " is not in the subspace");
  return it->second;
}

namespace {

// Appends all strings obtained from `seed` by flipping exactly k positions.
void append_flips(const BitString &seed, int k, std::vector<BitString> &out) {
  const int n = seed.size();
  std::vector<int> pos(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i)
    pos[static_cast<std::size_t>(i)] = i;
  while (true) {
    BitString b = seed;
    for (int i = 0; i < k; ++i)
      b = b.with_flipped(pos[static_cast<std::size_t>(i)]);
    out.push_back(std::move(b));
    // next combination in lexicographic position order
    int i = k - 1;
    while (i >= 0 && pos[static_cast<std::size_t>(i)] == n - k + i)
      --i;
    if (i < 0)
      break;
    ++pos[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
      pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
  }
}

} // namespace

SubspacePtr build_subspace(const std::vector<BitString> &seeds, int d, int n) {
  if (seeds.empty())
    throw ValidationError("subspace construction needs at least one seed");
  if (d < 0)
    throw ValidationError("hamming radius must be non-negative");
  for (const auto &s : seeds)
    if (s.size() != n)
      throw ValidationError("seed length does not match the qubit count");

  const int radius = std::min(d, n);
  std::vector<BitString> out;
  for (const auto &seed : seeds)
    for (int k = 0; k <= radius; ++k)
      append_flips(seed, k, out);
  return Subspace::from_members(std::move(out), d);
}

SubspacePtr full_subspace(int n) {
  if (n < 1 || n > 30)
    throw ValidationError("full subspace materialization limited to n <= 30");
  std::vector<BitString> all;
  all.reserve(std::size_t{1} << n);
  for (std::uint64_t i = 0; i < (std::uint64_t{1} << n); ++i)
    all.push_back(index_to_bitstring(i, n));
  return Subspace::from_members(std::move(all), n);
}

} // namespace unfold
