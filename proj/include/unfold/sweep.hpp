// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_SWEEP_HPP
#define UNFOLD_SWEEP_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unfold/response.hpp"
#include "unfold/unfolding.hpp"

namespace unfold {

/// Benchmark grid: for each (seed, n) cell one response is drawn and one
/// dataset sampled, then every requested mitigation method runs on that
/// same dataset.
struct SweepSpec {
  std::string family;             // "ghz" or "bv" (hidden string 1^n)
  std::vector<int> qubit_counts;
  std::uint64_t shots = 0;
  std::vector<std::uint64_t> seeds;
  // Any of: raw, ibu-full, ibu-reduced, map-ibu (flat prior), inverse.
  // inverse cells are skipped above the dense materialization cap.
  std::vector<std::string> methods;
  int d = 0;
  IbuConfig config;
  double flip_low = 0.005;  // per-qubit flip rates drawn uniformly
  double flip_high = 0.04;
  std::optional<double> fixed_flip; // same rate for every qubit when set
  ReducedOperatorOptions op_options;
};

struct SweepCell {
  int n = 0;
  std::string method;
  std::uint64_t seed = 0;
  double score = 0.0;         // normalized l1 (ghz) or success prob (bv)
  double negative_mass = 0.0;
  double runtime_seconds = 0.0;
  int iterations = 0;
  double seconds_per_iteration = 0.0;
};

/// Random readout model: both flip rates of every qubit drawn uniformly
/// from [flip_low, flip_high]; draw order is qubit-ascending, 0->1 rate
/// before 1->0 rate.
TensorResponse draw_response(int n, double flip_low, double flip_high,
                             std::uint64_t seed);

std::vector<SweepCell> run_sweep(const SweepSpec &spec);

/// CSV rendering with a header row; deterministic formatting.
std::string sweep_csv(const std::vector<SweepCell> &cells);

} // namespace unfold

#endif
