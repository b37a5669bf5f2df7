// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_SIMULATE_HPP
#define UNFOLD_SIMULATE_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "unfold/counts.hpp"
#include "unfold/prob_vector.hpp"
#include "unfold/response.hpp"

namespace unfold {

/// Noise-free outcome distribution of a circuit family, stored sparsely so
/// it exists at any qubit count.
struct IdealDistribution {
  enum class Kind { ghz, bv, explicit_values };

  Kind kind;
  int n;
  std::vector<std::pair<BitString, double>> values; // sorted, positive mass

  /// Probability of one bitstring (0 off support).
  double probability_of(const BitString &b) const;
};

/// Mass 0.5 on the all-zeros and all-ones strings.
IdealDistribution ideal_ghz(int n);

/// Point mass on the hidden string (an ideal oracle run always succeeds).
IdealDistribution ideal_bv(const BitString &hidden);

/// Arbitrary sparse distribution; validates non-negativity and unit sum.
IdealDistribution ideal_explicit(int n,
                                 std::vector<std::pair<BitString, double>>
                                     values);

/// Draws `shots` samples: a latent bitstring from `ideal`, then each bit
/// flips independently per the response factors. Never materializes a 2^n
/// vector, so it works at large n. Deterministic for a fixed seed.
CountsTable sample_noisy_counts(const IdealDistribution &ideal,
                                const TensorResponse &r, std::uint64_t shots,
                                std::uint64_t seed);

/// Deliberately naive reference: the textbook double sum over outcomes and
/// latent states with the inner normalization, one scalar at a time. Used
/// as the independent check on every optimized path.
ProbVector brute_force_ibu_oracle(const DenseResponse &r, const ProbVector &p,
                                  const ProbVector &theta0, int iters);

} // namespace unfold

#endif
