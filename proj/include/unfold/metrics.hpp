// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_METRICS_HPP
#define UNFOLD_METRICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unfold/counts.hpp"
#include "unfold/prob_vector.hpp"

namespace unfold {

/// Sparse real vector over bitstrings: sorted by label, unique keys.
/// Scores align two of these on the union of supports, so a full 2^n
/// expansion is never needed.
using SparseWeights = std::vector<std::pair<BitString, double>>;

/// Sorts entries and rejects duplicate labels or mixed lengths.
SparseWeights make_sparse(std::vector<std::pair<BitString, double>> entries);

SparseWeights to_sparse(const ProbVector &v);
SparseWeights to_sparse(const QuasiProbVector &v);

struct ScoreReport {
  std::string score_name;
  double value = 0.0;
  std::optional<double> ci_low;  // 95% bootstrap interval
  std::optional<double> ci_high;
  int resamples = 0;
  std::string interval_method; // "percentile" when an interval is present
};

/// Sum of |a_i - b_i| over the union of supports.
double l1_distance(const SparseWeights &a, const SparseWeights &b);

/// 1 - l1_distance/2 against a reference distribution. In [0, 1] for proper
/// distributions; negative values betray quasiprobability mass.
double normalized_l1_score(const SparseWeights &a, const SparseWeights &q);

/// Mass the estimate puts on the hidden string (0 off support): the chance
/// that a single guess is right.
double success_probability(const SparseWeights &a, const BitString &hidden);
double success_probability(const ProbVector &a, const BitString &hidden);

/// Total magnitude of negative entries; exactly 0 for any proper
/// distribution.
double negative_mass(const SparseWeights &a);
double negative_mass(const QuasiProbVector &a);
double negative_mass(const Eigen::Ref<const Eigen::VectorXd> &a);

/// Percentile bootstrap: draws `resamples` multinomial datasets of the same
/// shot total from the empirical distribution, runs the full pipeline on
/// each, and reports the 2.5/97.5 percentile interval (widened, if needed,
/// to contain the point estimate). Each resample uses a seed derived from
/// (seed, resample index), so resamples are order-independent.
ScoreReport bootstrap_ci(const CountsTable &counts,
                         const std::function<double(const CountsTable &)> &pipeline,
                         int resamples, std::uint64_t seed,
                         std::string score_name = "score");

/// One multinomial resample of the counts (exposed for tests).
CountsTable resample_counts(const CountsTable &counts, std::uint64_t seed);

} // namespace unfold

#endif
