// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "test_helpers.hpp"
#include "unfold/errors.hpp"
#include "unfold/prob_vector.hpp"
#include "unfold/response.hpp"
#include "unfold/rng.hpp"
#include "unfold/subspace.hpp"

using unfold::BitString;
using unfold::CountsTable;
using unfold::ProbVector;
using unfold::SingleQubitResponse;
using unfold::TensorResponse;
using unfold::VectorDomain;

namespace {

SingleQubitResponse golden_factor() {
  Eigen::Matrix2d m;
  m << 0.9, 0.2, 0.1, 0.8;
  return SingleQubitResponse(m);
}

TensorResponse golden_response() {
  return TensorResponse({golden_factor()});
}

Eigen::MatrixXd dense_submatrix(const TensorResponse &r,
                                const unfold::Subspace &rows,
                                const unfold::Subspace &cols) {
  const Eigen::MatrixXd full = unfold::materialize_full_response(r).matrix();
  Eigen::MatrixXd sub(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          full(static_cast<Eigen::Index>(
                   unfold::bitstring_to_index(rows.member(i))),
               static_cast<Eigen::Index>(
                   unfold::bitstring_to_index(cols.member(j))));
  return sub;
}

} // namespace

TEST_CASE("single-qubit response validates column stochasticity") {
  CHECK(SingleQubitResponse::identity().entry(0, 0) == 1.0);
  CHECK(SingleQubitResponse::identity().entry(1, 0) == 0.0);
  CHECK(golden_factor().entry(0, 1) == 0.2);

  Eigen::Matrix2d bad;
  bad << 0.9, 0.2, 0.2, 0.8; // first column sums to 1.1
  CHECK_THROWS_AS(SingleQubitResponse{bad}, unfold::ValidationError);
  Eigen::Matrix2d neg;
  neg << 1.1, 0.2, -0.1, 0.8;
  CHECK_THROWS_AS(SingleQubitResponse{neg}, unfold::ValidationError);
  Eigen::Matrix2d off;
  off << 0.9 + 1e-11, 0.2, 0.1, 0.8;
  CHECK_THROWS_AS(SingleQubitResponse{off}, unfold::ValidationError);
}

TEST_CASE("flip-rate construction gives exactly stochastic columns") {
  unfold::SplitMix64 g(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double f01 = g.next_unit();
    const double f10 = g.next_unit();
    const auto r = SingleQubitResponse::from_flip_rates(f01, f10);
    CHECK(r.entry(1, 0) == f01);
    CHECK(r.entry(0, 1) == f10);
    CHECK(r.entry(0, 0) + r.entry(1, 0) == 1.0);
    CHECK(r.entry(0, 1) + r.entry(1, 1) == 1.0);
  }
  CHECK_THROWS_AS(SingleQubitResponse::from_flip_rates(-0.1, 0.0),
                  unfold::ValidationError);
  CHECK_THROWS_AS(SingleQubitResponse::from_flip_rates(0.0, 1.5),
                  unfold::ValidationError);
}

TEST_CASE("calibration estimation is the plain frequency ratio") {
  const auto cal0 = CountsTable::from_entries(
      {{BitString::from_string("0"), 90}, {BitString::from_string("1"), 10}},
      100);
  const auto cal1 = CountsTable::from_entries(
      {{BitString::from_string("0"), 20}, {BitString::from_string("1"), 80}},
      100);
  const auto r = unfold::estimate_single_qubit_response(cal0, cal1);
  CHECK(r.entry(0, 0) == 0.9);
  CHECK(r.entry(1, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(r.entry(0, 1) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(r.entry(1, 1) == 0.8);

  // awkward shot totals still produce exactly stochastic columns
  const auto odd0 = CountsTable::from_entries(
      {{BitString::from_string("0"), 1}, {BitString::from_string("1"), 2}}, 3);
  const auto odd1 = CountsTable::from_entries(
      {{BitString::from_string("1"), 3}}, 3);
  const auto odd = unfold::estimate_single_qubit_response(odd0, odd1);
  CHECK(odd.entry(0, 0) + odd.entry(1, 0) == 1.0);
  CHECK(odd.entry(0, 1) == 0.0); // zero cell stays zero, no smoothing
  CHECK(odd.entry(1, 1) == 1.0);

  const auto wide = CountsTable::from_entries(
      {{BitString::from_string("00"), 4}}, 4);
  CHECK_THROWS_AS(unfold::estimate_single_qubit_response(wide, cal1),
                  unfold::ValidationError);
}

TEST_CASE("tensor response exposes factors in qubit order") {
  const auto a = SingleQubitResponse::from_flip_rates(0.1, 0.2);
  const auto b = SingleQubitResponse::from_flip_rates(0.3, 0.4);
  const TensorResponse r({a, b});
  CHECK(r.qubit_count() == 2);
  CHECK(r.factor(0).entry(1, 0) == 0.1);
  CHECK(r.factor(1).entry(1, 0) == 0.3);
  CHECK(r.factor_entry(1, 0, 1) == 0.4);
  CHECK_THROWS_AS(TensorResponse({}), unfold::ValidationError);
}

TEST_CASE("qubit 0 acts on the most significant index bit") {
  // factor 0 flips 0->1 with rate 0.5, factor 1 is exact: starting from
  // "00" (index 0) only outcomes 00 and 10 (indices 0 and 2) have mass.
  const TensorResponse r({SingleQubitResponse::from_flip_rates(0.5, 0.0),
                          SingleQubitResponse::identity()});
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  x[0] = 1.0;
  const Eigen::VectorXd y = unfold::tensor_matvec(r, x);
  CHECK(y[0] == doctest::Approx(0.5));
  CHECK(y[1] == 0.0);
  CHECK(y[2] == doctest::Approx(0.5));
  CHECK(y[3] == 0.0);
}

TEST_CASE("matrix-free products match the materialized response") {
  unfold::SplitMix64 g(11);
  for (int n : {1, 2, 3, 5}) {
    const TensorResponse r = testutil::random_response(n, g);
    const Eigen::MatrixXd dense = unfold::materialize_full_response(r).matrix();
    const Eigen::Index dim = Eigen::Index{1} << n;
    REQUIRE(dense.rows() == dim);

    // columns of the dense response are stochastic
    for (Eigen::Index c = 0; c < dim; ++c)
      CHECK(std::abs(dense.col(c).sum() - 1.0) <= 1e-10);

    Eigen::VectorXd x(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
      x[i] = g.next_unit() - 0.3;

    const Eigen::VectorXd y = unfold::tensor_matvec(r, x);
    const Eigen::VectorXd yt = unfold::tensor_matvec(r, x, true);
    CHECK((y - dense * x).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((yt - dense.transpose() * x).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("reduced entries are products of factor entries") {
  unfold::SplitMix64 g(13);
  const TensorResponse r = testutil::random_response(3, g);
  const Eigen::MatrixXd dense = unfold::materialize_full_response(r).matrix();
  for (std::uint64_t i = 0; i < 8; ++i)
    for (std::uint64_t j = 0; j < 8; ++j) {
      const double e = unfold::reduced_entry(
          r, unfold::index_to_bitstring(i, 3), unfold::index_to_bitstring(j, 3));
      CHECK(e == doctest::Approx(dense(static_cast<Eigen::Index>(i),
                                       static_cast<Eigen::Index>(j)))
                     .epsilon(1e-13));
    }
}

TEST_CASE("streamed reduced products match the dense submatrix") {
  unfold::SplitMix64 g(17);
  const int n = 5;
  const TensorResponse r = testutil::random_response(n, g);
  const auto rows = unfold::build_subspace(
      {BitString::from_string("00000"), BitString::from_string("11111")}, 1,
      n);
  const auto cols = unfold::build_subspace(
      {BitString::from_string("00000"), BitString::from_string("11111")}, 2,
      n);
  const Eigen::MatrixXd sub = dense_submatrix(r, *rows, *cols);

  Eigen::VectorXd x(static_cast<Eigen::Index>(cols->size()));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = g.next_unit();
  x[1] = 0.0; // zero-weight columns must be skipped without changing results
  Eigen::VectorXd xr(static_cast<Eigen::Index>(rows->size()));
  for (Eigen::Index i = 0; i < xr.size(); ++i)
    xr[i] = g.next_unit();

  const Eigen::VectorXd y = unfold::reduced_matvec_streaming(r, *rows, *cols, x);
  const Eigen::VectorXd yt =
      unfold::reduced_matvec_streaming(r, *rows, *cols, xr, true);
  CHECK((y - sub * x).lpNorm<Eigen::Infinity>() <= 1e-12);
  CHECK((yt - sub.transpose() * xr).lpNorm<Eigen::Infinity>() <= 1e-12);

  // worker count must not change a single bit
  for (int threads : {2, 3, 8}) {
    const Eigen::VectorXd ym =
        unfold::reduced_matvec_streaming(r, *rows, *cols, x, false, threads);
    const Eigen::VectorXd ytm =
        unfold::reduced_matvec_streaming(r, *rows, *cols, xr, true, threads);
    CHECK((ym.array() == y.array()).all());
    CHECK((ytm.array() == yt.array()).all());
  }
}

TEST_CASE("reduced operator caches small matrices and streams large ones") {
  unfold::SplitMix64 g(19);
  const int n = 4;
  const TensorResponse r = testutil::random_response(n, g);
  const auto rows = unfold::build_subspace({BitString::from_string("0000")},
                                           2, n);
  const auto cols = unfold::full_subspace(n);

  Eigen::VectorXd x(static_cast<Eigen::Index>(cols->size()));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x[i] = g.next_unit();
  Eigen::VectorXd xr(static_cast<Eigen::Index>(rows->size()));
  for (Eigen::Index i = 0; i < xr.size(); ++i)
    xr[i] = g.next_unit();

  const unfold::ReducedOperator cached(r, rows, cols);
  CHECK(cached.cached());

  unfold::ReducedOperatorOptions tight;
  tight.cache_budget_bytes = 8; // too small for any matrix
  const unfold::ReducedOperator streamed(r, rows, cols, tight);
  CHECK_FALSE(streamed.cached());

  unfold::ReducedOperatorOptions off;
  off.cache_enabled = false;
  const unfold::ReducedOperator disabled(r, rows, cols, off);
  CHECK_FALSE(disabled.cached());

  CHECK((cached.apply(x) - streamed.apply(x)).lpNorm<Eigen::Infinity>() <=
        1e-14);
  CHECK((cached.apply_transpose(xr) - streamed.apply_transpose(xr))
            .lpNorm<Eigen::Infinity>() <= 1e-14);
  CHECK((disabled.apply(x).array() == streamed.apply(x).array()).all());

  const Eigen::MatrixXd sub = dense_submatrix(r, *rows, *cols);
  CHECK((cached.apply(x) - sub * x).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("dense materialization refuses oversized systems") {
  std::vector<SingleQubitResponse> factors(
      15, SingleQubitResponse::identity());
  const TensorResponse big(std::move(factors));
  CHECK_THROWS_AS(unfold::materialize_full_response(big),
                  unfold::ValidationError);

  // the cap is a parameter, not a constant of nature
  std::vector<SingleQubitResponse> four(4, SingleQubitResponse::identity());
  const TensorResponse small(std::move(four));
  CHECK_THROWS_AS(unfold::materialize_full_response(small, 3),
                  unfold::ValidationError);
  CHECK_NOTHROW(unfold::materialize_full_response(small, 4));
}

TEST_CASE("inversion solves the golden instance exactly") {
  const auto dense = unfold::materialize_full_response(golden_response());
  Eigen::VectorXd pv(2);
  pv << 0.83, 0.17;
  const ProbVector p(VectorDomain::full(1), pv);
  const auto q = unfold::invert_mitigate(dense, p);
  CHECK(q[0] == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("inversion produces the known quasiprobability on skewed data") {
  const auto dense = unfold::materialize_full_response(golden_response());
  Eigen::VectorXd pv(2);
  pv << 0.99, 0.01;
  const ProbVector p(VectorDomain::full(1), pv);
  const auto q = unfold::invert_mitigate(dense, p);
  CHECK(q[0] == doctest::Approx(1.1285714285714286).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(-0.12857142857142856).epsilon(1e-12));
  CHECK(q[0] + q[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inversion rejects a numerically singular response") {
  Eigen::Matrix2d flat;
  flat << 0.5, 0.5, 0.5, 0.5;
  const TensorResponse r({SingleQubitResponse(flat)});
  const auto dense = unfold::materialize_full_response(r);
  Eigen::VectorXd pv(2);
  pv << 0.5, 0.5;
  const ProbVector p(VectorDomain::full(1), pv);
  CHECK_THROWS_WITH_AS(unfold::invert_mitigate(dense, p),
                       doctest::Contains("non-invertible response"),
                       unfold::ValidationError);
}
