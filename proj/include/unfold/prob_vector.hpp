// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_PROB_VECTOR_HPP
#define UNFOLD_PROB_VECTOR_HPP

#include <Eigen/Core>
#include <cstdint>
#include <memory>

#include "unfold/counts.hpp"
#include "unfold/subspace.hpp"

namespace unfold {

inline constexpr double kUnitSumTolerance = 1e-9;

// Domain a vector is aligned with: an explicit subspace, or the full space of
// all 2^n bitstrings (space == nullptr). Entry i of an aligned vector belongs
// to label(i).
class VectorDomain {
public:
  VectorDomain() = default;
  explicit VectorDomain(SubspacePtr space);
  static VectorDomain full(int n);

  bool is_full_space() const { return space_ == nullptr; }
  int qubit_count() const { return n_; }
  Eigen::Index dim() const;
  BitString label(Eigen::Index i) const;
  const SubspacePtr &space() const { return space_; } // null for full space

private:
  SubspacePtr space_;
  int n_ = 0;
};

// Real vector over a domain whose entries sum to 1; entries may be negative
// or exceed 1 (the output of response-matrix inversion).
class QuasiProbVector {
public:
  QuasiProbVector(VectorDomain domain, Eigen::VectorXd values);

  const VectorDomain &domain() const { return domain_; }
  const Eigen::VectorXd &values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }

private:
  VectorDomain domain_;
  Eigen::VectorXd values_;
};

// Proper probability distribution: entrywise non-negative, unit sum.
class ProbVector {
public:
  ProbVector(VectorDomain domain, Eigen::VectorXd values);

  const VectorDomain &domain() const { return domain_; }
  const Eigen::VectorXd &values() const { return values_; }
  double operator[](Eigen::Index i) const { return values_[i]; }

  // Probability of one bitstring, 0 outside the domain's support.
  double probability_of(const BitString &b) const;

private:
  VectorDomain domain_;
  Eigen::VectorXd values_;
};

// Empirical distribution p_i = count_i / shots over the subspace of observed
// bitstrings, sorted.
ProbVector counts_to_distribution(const CountsTable &counts);

// Embeds counts into the full 2^n space (index order; unobserved entries 0).
Eigen::VectorXd counts_to_full_vector(const CountsTable &counts);

// Validation helpers shared by the vector types and by tests.
void require_unit_sum(const Eigen::Ref<const Eigen::VectorXd> &v,
                      double tol = kUnitSumTolerance);
void require_nonnegative(const Eigen::Ref<const Eigen::VectorXd> &v);

} // namespace unfold

#endif
