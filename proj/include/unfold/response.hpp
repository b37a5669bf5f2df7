// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_RESPONSE_HPP
#define UNFOLD_RESPONSE_HPP

#include <Eigen/Core>
#include <cstddef>
#include <vector>

#include "unfold/counts.hpp"
#include "unfold/prob_vector.hpp"
#include "unfold/subspace.hpp"

namespace unfold {

/// 2x2 readout-noise model for one qubit.
///
/// Convention: matrix()(i, j) = P(measured i | prepared j). Columns must be
/// stochastic: each sums to 1 within 1e-12, all entries in [0, 1].
class SingleQubitResponse {
public:
  explicit SingleQubitResponse(const Eigen::Matrix2d &m);

  static SingleQubitResponse identity();
  /// Build from the two flip rates: P(measured 1 | prepared 0) and
  /// P(measured 0 | prepared 1). Columns sum to 1 exactly by construction.
  static SingleQubitResponse from_flip_rates(double flip0to1, double flip1to0);

  const Eigen::Matrix2d &matrix() const { return m_; }
  double entry(int measured, int prepared) const {
    return m_(measured, prepared);
  }

private:
  Eigen::Matrix2d m_;
};

/// n-qubit response matrix in Kronecker form: R = F0 ⊗ F1 ⊗ … ⊗ F(n-1),
/// qubit 0 first (so factor 0 acts on the most significant index bit).
/// Never materialized; 4n parameters describe the full 2^n x 2^n matrix.
class TensorResponse {
public:
  explicit TensorResponse(std::vector<SingleQubitResponse> factors);

  int qubit_count() const { return static_cast<int>(factors_.size()); }
  const SingleQubitResponse &factor(int k) const { return factors_[k]; }
  const std::vector<SingleQubitResponse> &factors() const { return factors_; }

  /// Hot-loop lookup of factor k's (measured, prepared) entry.
  double factor_entry(int k, int measured, int prepared) const {
    return flat_[4 * k + 2 * measured + prepared];
  }

private:
  std::vector<SingleQubitResponse> factors_;
  std::vector<double> flat_; // packed [k][measured][prepared]
};

/// Explicit 2^n x 2^n response matrix; only viable at small n. Columns must
/// be stochastic within 1e-10.
class DenseResponse {
public:
  DenseResponse(Eigen::MatrixXd m, int qubit_count);

  int qubit_count() const { return n_; }
  const Eigen::MatrixXd &matrix() const { return m_; }

private:
  Eigen::MatrixXd m_;
  int n_;
};

/// Frequency estimate of one qubit's response from two calibration runs:
/// cal0 measured after preparing |0>, cal1 after preparing |1>. No smoothing;
/// a zero-count cell stays 0. Columns sum to 1 exactly.
SingleQubitResponse
estimate_single_qubit_response(const CountsTable &cal0, const CountsTable &cal1);

/// Computes R·x (or Rᵀ·x when transpose) through per-qubit contractions
/// without materializing R. Cost O(n·2^n); x must have length 2^n.
Eigen::VectorXd tensor_matvec(const TensorResponse &r,
                              const Eigen::Ref<const Eigen::VectorXd> &x,
                              bool transpose = false);

/// One entry of the subspace-reduced matrix: ∏_k factor_k(row_k, col_k).
double reduced_entry(const TensorResponse &r, const BitString &row,
                     const BitString &col);

/// Applies the reduced matrix R̃ (rows x cols) to x by streaming columns:
/// result_i = Σ_j R̃(i,j)·x_j with O(|rows|) working memory, entries
/// recomputed on the fly. Deterministic and bitwise independent of the
/// thread count: every output entry accumulates its terms in ascending
/// index order, and workers own disjoint output slices (row ranges, or
/// column ranges for the transpose). transpose computes R̃ᵀ·x (x aligned
/// with rows, result with cols).
Eigen::VectorXd reduced_matvec_streaming(const TensorResponse &r,
                                         const Subspace &rows,
                                         const Subspace &cols,
                                         const Eigen::Ref<const Eigen::VectorXd> &x,
                                         bool transpose = false,
                                         int threads = 1);

inline constexpr int kDenseQubitCap = 14;

/// Dense Kronecker product of the factors. Refused above the qubit cap
/// (default 14, about 256 MiB of reals) to keep oracle paths from
/// exhausting memory.
DenseResponse materialize_full_response(const TensorResponse &r,
                                        int max_qubits = kDenseQubitCap);

/// Inversion baseline: returns R⁻¹·p. Output entries sum to 1 but may be
/// negative (a quasiprobability). Rejects numerically singular R at
/// condition number 1e12.
QuasiProbVector invert_mitigate(const DenseResponse &r, const ProbVector &p);

struct ReducedOperatorOptions {
  /// Materialize R̃ once when it fits the budget; otherwise stream.
  bool cache_enabled = true;
  std::size_t cache_budget_bytes = std::size_t{2} * 1024 * 1024 * 1024;
  int threads = 1;
};

/// Reusable R̃ application bound to fixed row/column subspaces. Streams
/// entries on the fly by default; optionally materializes R̃ when
/// |rows|·|cols| reals fit the configured memory budget.
class ReducedOperator {
public:
  ReducedOperator(const TensorResponse &r, SubspacePtr rows, SubspacePtr cols,
                  ReducedOperatorOptions options = {});

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd> &x) const;
  Eigen::VectorXd
  apply_transpose(const Eigen::Ref<const Eigen::VectorXd> &x) const;

  bool cached() const { return cache_.size() > 0; }
  const Subspace &rows() const { return *rows_; }
  const Subspace &cols() const { return *cols_; }

private:
  const TensorResponse &r_;
  SubspacePtr rows_;
  SubspacePtr cols_;
  ReducedOperatorOptions options_;
  Eigen::MatrixXd cache_; // empty unless materialized
};

} // namespace unfold

#endif
