// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/sweep.hpp"

#include <algorithm>
#include <cstdio>

#include "unfold/errors.hpp"
#include "unfold/metrics.hpp"
#include "unfold/rng.hpp"
#include "unfold/simulate.hpp"

namespace unfold {

namespace {

// Derived-stream tags for the per-cell draws.
constexpr std::uint64_t kResponseStream = 1;
constexpr std::uint64_t kCountsStream = 2;

double cell_score(const std::string &family, const SparseWeights &estimate,
                  const IdealDistribution &ideal) {
  if (family == "bv")
    return success_probability(estimate, ideal.values.front().first);
  return normalized_l1_score(estimate, ideal.values);
}

} // namespace

TensorResponse draw_response(int n, double flip_low, double flip_high,
                             std::uint64_t seed) {
  if (n < 1)
    throw ValidationError("qubit count must be positive");
  if (!(flip_low >= 0.0) || flip_high > 1.0 || flip_low > flip_high)
    throw ValidationError("flip-rate range must satisfy 0 <= low <= high <= 1");
  SplitMix64 gen(seed);
  std::vector<SingleQubitResponse> factors;
  factors.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double f01 = flip_low + (flip_high - flip_low) * gen.next_unit();
    const double f10 = flip_low + (flip_high - flip_low) * gen.next_unit();
    factors.push_back(SingleQubitResponse::from_flip_rates(f01, f10));
  }
  return TensorResponse(std::move(factors));
}

std::vector<SweepCell> run_sweep(const SweepSpec &spec) {
  if (spec.family != "ghz" && spec.family != "bv")
    throw ValidationError("unknown experiment family '" + spec.family + "'");
  if (spec.qubit_counts.empty())
    throw ValidationError("sweep needs at least one qubit count");
  if (spec.seeds.empty())
    throw ValidationError("sweep needs at least one seed");
  if (spec.methods.empty())
    throw ValidationError("sweep needs at least one method");
  if (spec.shots < 1)
    throw ValidationError("shot count must be positive");
  for (const auto &m : spec.methods)
    if (m != "raw")
      method_from_name(m); // validates the name

  std::vector<SweepCell> cells;
  for (const std::uint64_t seed : spec.seeds) {
    for (const int n : spec.qubit_counts) {
      const std::uint64_t cell_seed =
          derive_seed(seed, static_cast<std::uint64_t>(n));
      const TensorResponse response =
          spec.fixed_flip
              ? TensorResponse(std::vector<SingleQubitResponse>(
                    static_cast<std::size_t>(n),
                    SingleQubitResponse::from_flip_rates(*spec.fixed_flip,
                                                         *spec.fixed_flip)))
              : draw_response(n, spec.flip_low, spec.flip_high,
                              derive_seed(cell_seed, kResponseStream));
      const IdealDistribution ideal =
          spec.family == "bv" ? ideal_bv(BitString::ones(n)) : ideal_ghz(n);
      const CountsTable counts = sample_noisy_counts(
          ideal, response, spec.shots, derive_seed(cell_seed, kCountsStream));

      for (const auto &method : spec.methods) {
        SweepCell cell;
        cell.n = n;
        cell.method = method;
        cell.seed = seed;
        if (method == "raw") {
          const SparseWeights est = to_sparse(counts_to_distribution(counts));
          cell.score = cell_score(spec.family, est, ideal);
          cell.negative_mass = 0.0;
        } else if (method == "inverse") {
          if (n > kDenseQubitCap)
            continue; // dense inversion is not defined at this size
          const DenseResponse dense = materialize_full_response(response);
          const ProbVector p(VectorDomain::full(n),
                             counts_to_full_vector(counts));
          const QuasiProbVector q = invert_mitigate(dense, p);
          const SparseWeights est = to_sparse(q);
          cell.score = cell_score(spec.family, est, ideal);
          cell.negative_mass = negative_mass(q);
        } else {
          const UnfoldResult result =
              run_ibu(method_from_name(method), response, counts, spec.d,
                      spec.config, std::nullopt, spec.op_options);
          const SparseWeights est = to_sparse(result.theta);
          cell.score = cell_score(spec.family, est, ideal);
          cell.negative_mass = negative_mass(result.theta.values());
          cell.runtime_seconds = result.wall_seconds;
          cell.iterations = result.iterations;
          cell.seconds_per_iteration = result.seconds_per_iteration;
        }
        cells.push_back(std::move(cell));
      }
    }
  }
  return cells;
}

std::string sweep_csv(const std::vector<SweepCell> &cells) {
  std::string out = "n,method,seed,score,negative_mass,runtime_s,iterations,"
                    "per_iter_s\n";
  char buf[256];
  for (const auto &c : cells) {
    std::snprintf(buf, sizeof(buf), "%d,%s,%llu,%.12g,%.12g,%.6g,%d,%.6g\n",
                  c.n, c.method.c_str(),
                  static_cast<unsigned long long>(c.seed), c.score,
                  c.negative_mass, c.runtime_seconds, c.iterations,
                  c.seconds_per_iteration);
    out += buf;
  }
  return out;
}

} // namespace unfold
