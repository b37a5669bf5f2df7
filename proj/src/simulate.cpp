// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "unfold/errors.hpp"
#include "unfold/rng.hpp"

namespace unfold {

double IdealDistribution::probability_of(const BitString &b) const {
  const auto it = std::lower_bound(
      values.begin(), values.end(), b,
      [](const auto &entry, const BitString &key) { return entry.first < key; });
  if (it != values.end() && it->first == b)
    return it->second;
  return 0.0;
}

IdealDistribution ideal_ghz(int n) {
  if (n < 1)
    throw ValidationError("qubit count must be positive");
  IdealDistribution d{IdealDistribution::Kind::ghz, n, {}};
  d.values.emplace_back(BitString::zeros(n), 0.5);
  d.values.emplace_back(BitString::ones(n), 0.5);
  return d;
}

IdealDistribution ideal_bv(const BitString &hidden) {
  if (hidden.empty())
    throw ValidationError("hidden bitstring must be non-empty");
  IdealDistribution d{IdealDistribution::Kind::bv, hidden.size(), {}};
  d.values.emplace_back(hidden, 1.0);
  return d;
}

IdealDistribution
ideal_explicit(int n, std::vector<std::pair<BitString, double>> values) {
  if (values.empty())
    throw ValidationError("distribution needs at least one outcome");
  double sum = 0.0;
  for (const auto &[bits, prob] : values) {
    if (bits.size() != n)
      throw ValidationError("outcome length does not match the qubit count");
    if (!(prob >= 0.0))
      throw ValidationError("probabilities must be non-negative");
    sum += prob;
  }
  if (std::abs(sum - 1.0) > kUnitSumTolerance)
    throw ValidationError("probabilities sum to " + std::to_string(sum) +
                          ", not 1");
  std::sort(values.begin(), values.end(),
            [](const auto &a, const auto &b) { return a.first < b.first; });
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i].first == values[i - 1].first)
      throw ValidationError("duplicate outcome " + values[i].first.str());
  return IdealDistribution{IdealDistribution::Kind::explicit_values, n,
                           std::move(values)};
}

CountsTable sample_noisy_counts(const IdealDistribution &ideal,
                                const TensorResponse &r, std::uint64_t shots,
                                std::uint64_t seed) {
  const int n = ideal.n;
  if (r.qubit_count() != n)
    throw ValidationError("response and distribution disagree on qubit count");
  if (shots < 1)
    throw ValidationError("shot count must be positive");

  SplitMix64 gen(seed);
  std::unordered_map<BitString, std::uint64_t, BitStringHash> tally;
  std::string buf(static_cast<std::size_t>(n), '0');
  for (std::uint64_t s = 0; s < shots; ++s) {
    // Latent outcome by CDF inversion over the sparse support.
    const double u = gen.next_unit();
    double cum = 0.0;
    std::size_t pick = ideal.values.size() - 1;
    for (std::size_t i = 0; i < ideal.values.size(); ++i) {
      cum += ideal.values[i].second;
      if (u < cum) {
        pick = i;
        break;
      }
    }
    const BitString &latent = ideal.values[pick].first;
    // Independent readout flip per qubit.
    for (int k = 0; k < n; ++k) {
      const int j = latent.bit(k) ? 1 : 0;
      const double flip = r.factor_entry(k, 1 - j, j);
      const bool flipped = gen.next_unit() < flip;
      buf[static_cast<std::size_t>(k)] = (j ^ (flipped ? 1 : 0)) ? '1' : '0';
    }
    ++tally[BitString::from_string(buf)];
  }

  std::vector<CountsTable::Entry> entries(tally.begin(), tally.end());
  return CountsTable::from_entries(std::move(entries), shots);
}

ProbVector brute_force_ibu_oracle(const DenseResponse &r, const ProbVector &p,
                                  const ProbVector &theta0, int iters) {
  const int n = r.qubit_count();
  if (!p.domain().is_full_space() || !theta0.domain().is_full_space() ||
      p.domain().qubit_count() != n || theta0.domain().qubit_count() != n)
    throw ValidationError("oracle needs full-space vectors matching the "
                          "response");
  if (iters < 0)
    throw ValidationError("iteration count must be non-negative");

  const Eigen::MatrixXd &m = r.matrix();
  const Eigen::Index dim = m.rows();
  Eigen::VectorXd theta = theta0.values();
  std::vector<double> denom(static_cast<std::size_t>(dim));
  for (int it = 0; it < iters; ++it) {
    // Inner normalization of the posterior, one outcome at a time.
    for (Eigen::Index i = 0; i < dim; ++i) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k)
        acc += m(i, k) * theta[k];
      denom[static_cast<std::size_t>(i)] = acc;
      if (p.values()[i] > 0.0 && acc <= 0.0)
        throw UnreachableOutcomeError(
            "unreachable outcome: the model assigns zero probability to an "
            "observed bitstring; raise the Hamming radius");
    }
    Eigen::VectorXd next = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double pi = p.values()[i];
        if (pi == 0.0)
          continue;
        acc += m(i, j) * theta[j] / denom[static_cast<std::size_t>(i)] * pi;
      }
      next[j] = acc;
    }
    theta = std::move(next);
  }
  return ProbVector(theta0.domain(), std::move(theta));
}

} // namespace unfold
