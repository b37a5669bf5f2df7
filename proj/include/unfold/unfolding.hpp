// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_UNFOLDING_HPP
#define UNFOLD_UNFOLDING_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "unfold/counts.hpp"
#include "unfold/prob_vector.hpp"
#include "unfold/response.hpp"
#include "unfold/subspace.hpp"

namespace unfold {

enum class Method { ibu_full, ibu_reduced, map_ibu, inverse };

Method method_from_name(const std::string &name);
std::string method_name(Method m);

enum class StopNorm { l1, l2, linf };
enum class InitKind { uniform, empirical, explicit_values };

struct IbuConfig {
  double tol = 1e-6;     // threshold on the iterate-change norm
  int max_iters = 1000;  // iteration cap
  StopNorm norm = StopNorm::l1;
  InitKind init = InitKind::uniform;
  // Starting point for InitKind::explicit_values, aligned with the tracked
  // subspace in its sorted order (or with the full space for the full
  // method).
  std::optional<Eigen::VectorXd> init_values;
};

/// Dirichlet prior over the latent distribution, aligned with a tracked
/// subspace; entries outside the subspace are implicitly 1 (flat). Each
/// concentration must be >= 1 so the MAP update stays non-negative.
class DirichletPrior {
public:
  DirichletPrior(SubspacePtr tracked, Eigen::VectorXd alpha);

  /// Flat prior (all concentrations 1): MAP collapses to plain unfolding.
  static DirichletPrior flat(SubspacePtr tracked);

  const SubspacePtr &tracked() const { return tracked_; }
  const Eigen::VectorXd &alpha() const { return alpha_; }
  /// Sum of (alpha_j - 1) over the tracked subspace. Equals the total
  /// concentration minus 2^n, but stays finite and exact at any n.
  double excess() const { return excess_; }
  /// Total concentration over the full space (2^n + excess).
  double total_concentration(int n) const;

private:
  SubspacePtr tracked_;
  Eigen::VectorXd alpha_;
  double excess_ = 0.0;
};

struct UnfoldResult {
  ProbVector theta;
  int iterations = 0;
  std::vector<double> likelihood_trace; // one value per iterate, theta0 first
  bool converged = false;
  double final_delta = 0.0;
  double wall_seconds = 0.0;
  double seconds_per_iteration = 0.0;
};

/// One multiplicative update theta ⊙ (Rᵀ(p ⊘ R·theta)) over the full space,
/// through tensor contractions. Entries that start at 0 stay 0; total mass
/// is conserved (no renormalization). Observed mass where the model gives
/// zero probability raises UnreachableOutcomeError; 0/0 terms contribute 0.
ProbVector ibu_step_full(const TensorResponse &r, const ProbVector &p,
                         const ProbVector &theta);

/// Same update restricted to subspaces: p's domain indexes observed rows,
/// theta's domain the tracked columns. The result is renormalized, because
/// truncated columns leak mass. Matches ibu_step_full when both domains are
/// the full space.
ProbVector ibu_step_reduced(const TensorResponse &r, const ProbVector &p,
                            const ProbVector &theta, int threads = 1);

/// Maximum-a-posteriori update: (alpha_j - 1)/D + (S/D)·u_j with u the
/// plain update and D = S + excess. With a flat prior this reproduces
/// ibu_step_reduced bit for bit.
ProbVector map_ibu_step(const TensorResponse &r, const CountsTable &counts,
                        const ProbVector &theta, const DirichletPrior &prior,
                        int threads = 1);

/// Multinomial log-likelihood of the counts under the forward model:
/// sum over distinct observed bitstrings of count·log((R·theta)_i).
/// Returns -infinity when any observed bitstring has zero model probability.
double log_likelihood(const TensorResponse &r, const CountsTable &counts,
                      const ProbVector &theta, int threads = 1);

/// Full unfolding driver: builds the tracked subspace (observed bitstrings
/// plus Hamming ball of radius d for the reduced methods; the full 2^n
/// space for Method::ibu_full, where d is ignored), iterates until the
/// iterate-change norm drops below tol or max_iters is reached, and records
/// the likelihood trace (the MAP objective additionally includes the
/// log-prior so the trace stays non-decreasing).
UnfoldResult run_ibu(Method method, const TensorResponse &r,
                     const CountsTable &counts, int d, const IbuConfig &config,
                     const std::optional<DirichletPrior> &prior = std::nullopt,
                     const ReducedOperatorOptions &op_options = {});

/// Same driver fed an exact observed distribution instead of counts (no
/// sampling). The trace records per-shot log-likelihood. map_ibu is not
/// available here (it needs a shot total).
UnfoldResult
run_ibu_on_distribution(Method method, const TensorResponse &r,
                        const ProbVector &p, int d, const IbuConfig &config,
                        const ReducedOperatorOptions &op_options = {});

} // namespace unfold

#endif
