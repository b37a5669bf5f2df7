// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "unfold/errors.hpp"
#include "unfold/rng.hpp"

namespace unfold {

SparseWeights make_sparse(std::vector<std::pair<BitString, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first)
      throw ValidationError("duplicate label " + entries[i].first.str());
    if (entries[i].first.size() != entries[0].first.size())
      throw ValidationError("labels have mixed lengths");
  }
  return entries;
}

SparseWeights to_sparse(const ProbVector &v) {
  SparseWeights out;
  out.reserve(static_cast<std::size_t>(v.values().size()));
  for (Eigen::Index i = 0; i < v.values().size(); ++i)
    out.emplace_back(v.domain().label(i), v.values()[i]);
  return out; // domain labels are already sorted
}

SparseWeights to_sparse(const QuasiProbVector &v) {
  SparseWeights out;
  out.reserve(static_cast<std::size_t>(v.values().size()));
  for (Eigen::Index i = 0; i < v.values().size(); ++i)
    out.emplace_back(v.domain().label(i), v.values()[i]);
  return out;
}

double l1_distance(const SparseWeights &a, const SparseWeights &b) {
  double dist = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      dist += std::abs(a[i].second);
      ++i;
    } else if (i == a.size() || b[j].first < a[i].first) {
      dist += std::abs(b[j].second);
      ++j;
    } else {
      dist += std::abs(a[i].second - b[j].second);
      ++i;
      ++j;
    }
  }
  return dist;
}

double normalized_l1_score(const SparseWeights &a, const SparseWeights &q) {
  return 1.0 - 0.5 * l1_distance(a, q);
}

double success_probability(const SparseWeights &a, const BitString &hidden) {
  const auto it = std::lower_bound(
      a.begin(), a.end(), hidden,
      [](const auto &entry, const BitString &key) { return entry.first < key; });
  if (it != a.end() && it->first == hidden)
    return it->second;
  return 0.0;
}

double success_probability(const ProbVector &a, const BitString &hidden) {
  return a.probability_of(hidden);
}

double negative_mass(const SparseWeights &a) {
  double mass = 0.0;
  for (const auto &[bits, v] : a)
    if (v < 0.0)
      mass -= v;
  return mass;
}

double negative_mass(const QuasiProbVector &a) {
  return negative_mass(a.values());
}

double negative_mass(const Eigen::Ref<const Eigen::VectorXd> &a) {
  double mass = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a[i] < 0.0)
      mass -= a[i];
  return mass;
}

CountsTable resample_counts(const CountsTable &counts, std::uint64_t seed) {
  const std::uint64_t shots = counts.shots();
  // Integer CDF over the observed entries; each draw is an exact index into
  // [0, shots).
  std::vector<std::uint64_t> cum;
  cum.reserve(counts.distinct());
  std::uint64_t running = 0;
  for (const auto &[bits, c] : counts.entries()) {
    running += c;
    cum.push_back(running);
  }

  SplitMix64 gen(seed);
  std::vector<std::uint64_t> tally(counts.distinct(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    std::uint64_t t =
        static_cast<std::uint64_t>(gen.next_unit() * static_cast<double>(shots));
    if (t >= shots)
      t = shots - 1;
    const auto it = std::upper_bound(cum.begin(), cum.end(), t);
    ++tally[static_cast<std::size_t>(it - cum.begin())];
  }

  std::vector<CountsTable::Entry> entries;
  for (std::size_t i = 0; i < tally.size(); ++i)
    if (tally[i] > 0)
      entries.emplace_back(counts.entries()[i].first, tally[i]);
  return CountsTable::from_entries(std::move(entries), shots);
}

namespace {

double percentile(const std::vector<double> &sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size())
    return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

ScoreReport bootstrap_ci(const CountsTable &counts,
                         const std::function<double(const CountsTable &)> &pipeline,
                         int resamples, std::uint64_t seed,
                         std::string score_name) {
  if (resamples < 2)
    throw ValidationError("bootstrap needs at least 2 resamples");

  ScoreReport report;
  report.score_name = std::move(score_name);
  report.value = pipeline(counts);
  report.resamples = resamples;
  report.interval_method = "percentile";

  std::vector<double> scores;
  scores.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b)
    scores.push_back(
        pipeline(resample_counts(counts, derive_seed(seed,
                                                     static_cast<std::uint64_t>(b)))));
  std::sort(scores.begin(), scores.end());

  // Percentile intervals can exclude the point estimate on skewed pipelines;
  // widen so the reported triple stays ordered.
  report.ci_low = std::min(percentile(scores, 0.025), report.value);
  report.ci_high = std::max(percentile(scores, 0.975), report.value);
  return report;
}

} // namespace unfold
