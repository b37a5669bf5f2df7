// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/response.hpp"

#include <Eigen/LU>
#include <cmath>
#include <string>
#include <thread>
#include <unsupported/Eigen/KroneckerProduct>

#include "unfold/errors.hpp"

namespace unfold {

namespace {

constexpr double kFactorColumnTol = 1e-12;
constexpr double kDenseColumnTol = 1e-10;
constexpr double kSingularRcond = 1e-12; // condition number 1e12

void check_column_stochastic(const Eigen::Ref<const Eigen::MatrixXd> &m,
                             double tol) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double v = m(i, j);
      if (!(v >= 0.0) || v > 1.0)
        throw ValidationError("response entries must lie in [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol)
      throw ValidationError("response column " + std::to_string(j) +
                            " sums to " + std::to_string(sum) + ", not 1");
  }
}

int checked_qubit_count_for_length(const TensorResponse &r, Eigen::Index len) {
  const int n = r.qubit_count();
  if (n > 24)
    throw ValidationError("full-space products limited to 24 qubits; "
                          "use the subspace-reduced path");
  if (len != (Eigen::Index{1} << n))
    throw ValidationError("vector length does not match 2^n for n = " +
                          std::to_string(n));
  return n;
}

// Streaming kernel over a contiguous column range [j0, j1).
void accumulate_columns(const TensorResponse &r, const Subspace &rows,
                        const Subspace &cols,
                        const Eigen::Ref<const Eigen::VectorXd> &x,
                        std::size_t j0, std::size_t j1, Eigen::VectorXd &acc) {
  const int n = r.qubit_count();
  const std::size_t nr = rows.size();
  for (std::size_t j = j0; j < j1; ++j) {
    const double w = x[static_cast<Eigen::Index>(j)];
    if (w == 0.0)
      continue; // a zero weight contributes nothing
    const BitString &col = cols.member(j);
    for (std::size_t i = 0; i < nr; ++i) {
      const BitString &row = rows.member(i);
      double e = 1.0;
      for (int k = 0; k < n; ++k)
        e *= r.factor_entry(k, row.bit(k), col.bit(k));
      acc[static_cast<Eigen::Index>(i)] += e * w;
    }
  }
}

// Forward kernel restricted to output rows [i0, i1): same column-ascending
// accumulation order per entry as accumulate_columns over the full range, so
// results are bitwise identical however the rows are partitioned.
void accumulate_row_range(const TensorResponse &r, const Subspace &rows,
                          const Subspace &cols,
                          const Eigen::Ref<const Eigen::VectorXd> &x,
                          std::size_t i0, std::size_t i1,
                          Eigen::VectorXd &acc) {
  const int n = r.qubit_count();
  const std::size_t nc = cols.size();
  for (std::size_t j = 0; j < nc; ++j) {
    const double w = x[static_cast<Eigen::Index>(j)];
    if (w == 0.0)
      continue;
    const BitString &col = cols.member(j);
    for (std::size_t i = i0; i < i1; ++i) {
      const BitString &row = rows.member(i);
      double e = 1.0;
      for (int k = 0; k < n; ++k)
        e *= r.factor_entry(k, row.bit(k), col.bit(k));
      acc[static_cast<Eigen::Index>(i)] += e * w;
    }
  }
}

// Transpose kernel: output entries for columns [j0, j1), each a dot product
// over all rows in ascending index order.
void transpose_dot_columns(const TensorResponse &r, const Subspace &rows,
                           const Subspace &cols,
                           const Eigen::Ref<const Eigen::VectorXd> &x,
                           std::size_t j0, std::size_t j1,
                           Eigen::VectorXd &out) {
  const int n = r.qubit_count();
  const std::size_t nr = rows.size();
  for (std::size_t j = j0; j < j1; ++j) {
    const BitString &col = cols.member(j);
    double acc = 0.0;
    for (std::size_t i = 0; i < nr; ++i) {
      const double w = x[static_cast<Eigen::Index>(i)];
      if (w == 0.0)
        continue;
      const BitString &row = rows.member(i);
      double e = 1.0;
      for (int k = 0; k < n; ++k)
        e *= r.factor_entry(k, row.bit(k), col.bit(k));
      acc += e * w;
    }
    out[static_cast<Eigen::Index>(j)] = acc;
  }
}

} // namespace

SingleQubitResponse::SingleQubitResponse(const Eigen::Matrix2d &m) : m_(m) {
  check_column_stochastic(m_, kFactorColumnTol);
}

SingleQubitResponse SingleQubitResponse::identity() {
  return SingleQubitResponse(Eigen::Matrix2d::Identity());
}

SingleQubitResponse SingleQubitResponse::from_flip_rates(double flip0to1,
                                                         double flip1to0) {
  if (!(flip0to1 >= 0.0) || flip0to1 > 1.0 || !(flip1to0 >= 0.0) ||
      flip1to0 > 1.0)
    throw ValidationError("flip rates must lie in [0, 1]");
  Eigen::Matrix2d m;
  m(0, 0) = 1.0 - flip0to1;
  m(1, 0) = flip0to1;
  m(1, 1) = 1.0 - flip1to0;
  m(0, 1) = flip1to0;
  return SingleQubitResponse(m);
}

TensorResponse::TensorResponse(std::vector<SingleQubitResponse> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty())
    throw ValidationError("response needs at least one qubit factor");
  flat_.resize(4 * factors_.size());
  for (std::size_t k = 0; k < factors_.size(); ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        flat_[4 * k + 2 * i + j] = factors_[k].entry(i, j);
}

DenseResponse::DenseResponse(Eigen::MatrixXd m, int qubit_count)
    : m_(std::move(m)), n_(qubit_count) {
  if (n_ < 1)
    throw ValidationError("qubit count must be positive");
  const Eigen::Index dim = Eigen::Index{1} << n_;
  if (m_.rows() != dim || m_.cols() != dim)
    throw ValidationError("dense response must be 2^n x 2^n");
  check_column_stochastic(m_, kDenseColumnTol);
}

SingleQubitResponse estimate_single_qubit_response(const CountsTable &cal0,
                                                   const CountsTable &cal1) {
  if (cal0.qubit_count() != 1 || cal1.qubit_count() != 1)
    throw ValidationError("calibration counts must be over a single bit");
  // Direct frequency for the prepared outcome; the complement keeps each
  // column summing to 1 exactly.
  const double f00 = static_cast<double>(cal0.count_of(BitString::zeros(1))) /
                     static_cast<double>(cal0.shots());
  const double f11 = static_cast<double>(cal1.count_of(BitString::ones(1))) /
                     static_cast<double>(cal1.shots());
  Eigen::Matrix2d m;
  m(0, 0) = f00;
  m(1, 0) = 1.0 - f00;
  m(1, 1) = f11;
  m(0, 1) = 1.0 - f11;
  return SingleQubitResponse(m);
}

Eigen::VectorXd tensor_matvec(const TensorResponse &r,
                              const Eigen::Ref<const Eigen::VectorXd> &x,
                              bool transpose) {
  const int n = checked_qubit_count_for_length(r, x.size());
  Eigen::VectorXd y = x;
  for (int k = 0; k < n; ++k) {
    double a00 = r.factor_entry(k, 0, 0);
    double a01 = r.factor_entry(k, 0, 1);
    double a10 = r.factor_entry(k, 1, 0);
    double a11 = r.factor_entry(k, 1, 1);
    if (transpose)
      std::swap(a01, a10);
    // Factor k acts on index bit k (qubit 0 = most significant bit).
    const Eigen::Index stride = Eigen::Index{1} << (n - 1 - k);
    for (Eigen::Index base = 0; base < y.size(); base += 2 * stride)
      for (Eigen::Index off = 0; off < stride; ++off) {
        const Eigen::Index i0 = base + off;
        const Eigen::Index i1 = i0 + stride;
        const double v0 = y[i0];
        const double v1 = y[i1];
        y[i0] = a00 * v0 + a01 * v1;
        y[i1] = a10 * v0 + a11 * v1;
      }
  }
  return y;
}

double reduced_entry(const TensorResponse &r, const BitString &row,
                     const BitString &col) {
  const int n = r.qubit_count();
  if (row.size() != n || col.size() != n)
    throw ValidationError("bitstring length does not match the response");
  double e = 1.0;
  for (int k = 0; k < n; ++k)
    e *= r.factor_entry(k, row.bit(k), col.bit(k));
  return e;
}

Eigen::VectorXd reduced_matvec_streaming(const TensorResponse &r,
                                         const Subspace &rows,
                                         const Subspace &cols,
                                         const Eigen::Ref<const Eigen::VectorXd> &x,
                                         bool transpose, int threads) {
  if (rows.qubit_count() != r.qubit_count() ||
      cols.qubit_count() != r.qubit_count())
    throw ValidationError("subspace qubit count does not match the response");
  const std::size_t nr = rows.size();
  const std::size_t nc = cols.size();
  const std::size_t in_dim = transpose ? nr : nc;
  const std::size_t out_dim = transpose ? nc : nr;
  if (static_cast<std::size_t>(x.size()) != in_dim)
    throw ValidationError("vector is not aligned with the subspace");

  // Workers always own disjoint slices of the output (columns for the
  // transpose, rows otherwise), so results are bitwise independent of the
  // thread count.
  const std::size_t span = transpose ? nc : nr;
  std::size_t workers = threads < 1 ? 1 : static_cast<std::size_t>(threads);
  if (workers > span)
    workers = span == 0 ? 1 : span;

  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_dim));
  if (nc == 0 || nr == 0)
    return out;

  if (workers == 1) {
    if (transpose)
      transpose_dot_columns(r, rows, cols, x, 0, nc, out);
    else
      accumulate_columns(r, rows, cols, x, 0, nc, out);
    return out;
  }

  const std::size_t chunk = (span + workers - 1) / workers;
  if (transpose) {
    // Each worker fills a disjoint slice of the output.
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t j0 = w * chunk;
      const std::size_t j1 = std::min(span, j0 + chunk);
      if (j0 >= j1)
        break;
      pool.emplace_back([&, j0, j1] {
        transpose_dot_columns(r, rows, cols, x, j0, j1, out);
      });
    }
    for (auto &t : pool)
      t.join();
    return out;
  }

  // Each worker fills a disjoint row slice of the output.
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t i0 = w * chunk;
    const std::size_t i1 = std::min(span, i0 + chunk);
    if (i0 >= i1)
      break;
    pool.emplace_back([&, i0, i1] {
      accumulate_row_range(r, rows, cols, x, i0, i1, out);
    });
  }
  for (auto &t : pool)
    t.join();
  return out;
}

DenseResponse materialize_full_response(const TensorResponse &r,
                                        int max_qubits) {
  const int n = r.qubit_count();
  if (n > max_qubits)
    throw ValidationError("dense materialization refused: " +
                          std::to_string(n) + " qubits exceeds the cap of " +
                          std::to_string(max_qubits));
  Eigen::MatrixXd acc = r.factor(0).matrix();
  for (int k = 1; k < n; ++k)
    acc = Eigen::kroneckerProduct(acc, r.factor(k).matrix()).eval();
  return DenseResponse(std::move(acc), n);
}

QuasiProbVector invert_mitigate(const DenseResponse &r, const ProbVector &p) {
  if (!p.domain().is_full_space() ||
      p.domain().qubit_count() != r.qubit_count())
    throw ValidationError(
        "inversion needs a full-space distribution matching the response");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(r.matrix());
  if (lu.rcond() < kSingularRcond)
    throw ValidationError("non-invertible response");
  return QuasiProbVector(p.domain(), lu.solve(p.values()));
}

ReducedOperator::ReducedOperator(const TensorResponse &r, SubspacePtr rows,
                                 SubspacePtr cols,
                                 ReducedOperatorOptions options)
    : r_(r), rows_(std::move(rows)), cols_(std::move(cols)),
      options_(options) {
  if (!rows_ || !cols_)
    throw ValidationError("reduced operator needs row and column subspaces");
  if (rows_->qubit_count() != r_.qubit_count() ||
      cols_->qubit_count() != r_.qubit_count())
    throw ValidationError("subspace qubit count does not match the response");
  const double bytes = static_cast<double>(rows_->size()) *
                       static_cast<double>(cols_->size()) * sizeof(double);
  if (options_.cache_enabled &&
      bytes <= static_cast<double>(options_.cache_budget_bytes)) {
    const int n = r_.qubit_count();
    cache_.resize(static_cast<Eigen::Index>(rows_->size()),
                  static_cast<Eigen::Index>(cols_->size()));
    for (Eigen::Index j = 0; j < cache_.cols(); ++j) {
      const BitString &col = cols_->member(static_cast<std::size_t>(j));
      for (Eigen::Index i = 0; i < cache_.rows(); ++i) {
        const BitString &row = rows_->member(static_cast<std::size_t>(i));
        double e = 1.0;
        for (int k = 0; k < n; ++k)
          e *= r_.factor_entry(k, row.bit(k), col.bit(k));
        cache_(i, j) = e;
      }
    }
  }
}

Eigen::VectorXd
ReducedOperator::apply(const Eigen::Ref<const Eigen::VectorXd> &x) const {
  if (cache_.size() > 0) {
    if (x.size() != cache_.cols())
      throw ValidationError("vector is not aligned with the subspace");
    return cache_ * x;
  }
  return reduced_matvec_streaming(r_, *rows_, *cols_, x, false,
                                  options_.threads);
}

Eigen::VectorXd ReducedOperator::apply_transpose(
    const Eigen::Ref<const Eigen::VectorXd> &x) const {
  if (cache_.size() > 0) {
    if (x.size() != cache_.rows())
      throw ValidationError("vector is not aligned with the subspace");
    return cache_.transpose() * x;
  }
  return reduced_matvec_streaming(r_, *rows_, *cols_, x, true,
                                  options_.threads);
}

} // namespace unfold
