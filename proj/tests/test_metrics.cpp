// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <Eigen/Core>
#include <cmath>

#include "test_helpers.hpp"
#include "unfold/errors.hpp"
#include "unfold/metrics.hpp"
#include "unfold/prob_vector.hpp"
#include "unfold/rng.hpp"

using unfold::BitString;
using unfold::CountsTable;
using unfold::ProbVector;
using unfold::QuasiProbVector;
using unfold::SparseWeights;
using unfold::VectorDomain;

namespace {

SparseWeights sparse(std::initializer_list<std::pair<const char *, double>>
                         entries) {
  std::vector<std::pair<BitString, double>> v;
  for (const auto &[k, w] : entries)
    v.emplace_back(BitString::from_string(k), w);
  return unfold::make_sparse(std::move(v));
}

} // namespace

TEST_CASE("sparse construction sorts and validates") {
  const auto s = sparse({{"10", 0.3}, {"00", 0.7}});
  CHECK(s[0].first.str() == "00");
  CHECK(s[1].first.str() == "10");
  CHECK_THROWS_AS(sparse({{"0", 0.5}, {"0", 0.5}}), unfold::ValidationError);
  CHECK_THROWS_AS(sparse({{"0", 0.5}, {"01", 0.5}}), unfold::ValidationError);
}

TEST_CASE("l1 distance walks the union of supports") {
  const auto a = sparse({{"00", 0.5}, {"11", 0.5}});
  const auto b = sparse({{"00", 0.4}, {"01", 0.1}, {"11", 0.5}});
  CHECK(unfold::l1_distance(a, b) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(unfold::l1_distance(a, a) == 0.0);
  const auto c = sparse({{"01", 1.0}});
  CHECK(unfold::l1_distance(a, c) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unfold::normalized_l1_score(a, b) ==
        doctest::Approx(0.9).epsilon(1e-15));
  CHECK(unfold::normalized_l1_score(a, a) == 1.0);
  CHECK(unfold::normalized_l1_score(a, c) == doctest::Approx(0.0));
}

TEST_CASE("success probability reads the hidden string's mass") {
  const auto a = sparse({{"101", 0.8}, {"001", 0.2}});
  CHECK(unfold::success_probability(a, BitString::from_string("101")) == 0.8);
  CHECK(unfold::success_probability(a, BitString::from_string("111")) == 0.0);

  Eigen::VectorXd v(2);
  v << 0.25, 0.75;
  const ProbVector p(VectorDomain::full(1), v);
  CHECK(unfold::success_probability(p, BitString::from_string("1")) == 0.75);
}

TEST_CASE("negative mass sums the magnitudes of negative entries") {
  Eigen::VectorXd v(2);
  v << 1.1285714285714286, -0.12857142857142856;
  const QuasiProbVector q(VectorDomain::full(1), v);
  CHECK(unfold::negative_mass(q) ==
        doctest::Approx(0.12857142857142856).epsilon(1e-15));
  CHECK(unfold::negative_mass(sparse({{"0", 0.5}, {"1", 0.5}})) == 0.0);
  Eigen::VectorXd w(3);
  w << 0.5, -0.25, 0.75;
  CHECK(unfold::negative_mass(w) == 0.25);
}

TEST_CASE("to_sparse preserves entries and labels") {
  Eigen::VectorXd v(2);
  v << 0.25, 0.75;
  const ProbVector p(VectorDomain::full(1), v);
  const auto s = unfold::to_sparse(p);
  REQUIRE(s.size() == 2);
  CHECK(s[0].first.str() == "0");
  CHECK(s[0].second == 0.25);
}

TEST_CASE("resampling preserves the shot total and the support") {
  unfold::SplitMix64 g(53);
  const auto counts = testutil::random_counts(4, 5000, 6, g);
  const auto r1 = unfold::resample_counts(counts, 99);
  const auto r2 = unfold::resample_counts(counts, 99);
  const auto r3 = unfold::resample_counts(counts, 100);
  CHECK(r1.shots() == counts.shots());
  CHECK(r1.entries() == r2.entries());
  CHECK(r1.entries() != r3.entries());
  for (const auto &[bits, c] : r1.entries())
    CHECK(counts.count_of(bits) > 0);
}

TEST_CASE("bootstrap intervals bracket the point estimate") {
  unfold::SplitMix64 g(59);
  const auto counts = testutil::random_counts(3, 2000, 5, g);
  const BitString target = counts.entries().front().first;
  const auto pipeline = [&](const CountsTable &c) {
    return double(c.count_of(target)) / double(c.shots());
  };
  const auto report = unfold::bootstrap_ci(counts, pipeline, 60, 7, "hit-rate");
  CHECK(report.score_name == "hit-rate");
  CHECK(report.resamples == 60);
  CHECK(report.value == pipeline(counts));
  REQUIRE(report.ci_low.has_value());
  REQUIRE(report.ci_high.has_value());
  CHECK(*report.ci_low <= report.value);
  CHECK(*report.ci_high >= report.value);
  CHECK(*report.ci_low < *report.ci_high);
  CHECK(report.interval_method == "percentile");

  // deterministic in the seed
  const auto again = unfold::bootstrap_ci(counts, pipeline, 60, 7, "hit-rate");
  CHECK(*again.ci_low == *report.ci_low);
  CHECK(*again.ci_high == *report.ci_high);

  CHECK_THROWS_AS(unfold::bootstrap_ci(counts, pipeline, 1, 7),
                  unfold::ValidationError);
}

TEST_CASE("bootstrap of a point mass collapses to a point interval") {
  const auto counts = CountsTable::from_entries(
      {{BitString::from_string("11"), 50}}, 50);
  const auto pipeline = [](const CountsTable &c) {
    return double(c.count_of(BitString::from_string("11"))) /
           double(c.shots());
  };
  const auto report = unfold::bootstrap_ci(counts, pipeline, 20, 3);
  CHECK(report.value == 1.0);
  CHECK(*report.ci_low == 1.0);
  CHECK(*report.ci_high == 1.0);
}

TEST_CASE("bootstrap interval narrows with more data") {
  unfold::SplitMix64 g(61);
  const auto small = testutil::random_counts(2, 200, 3, g);
  unfold::SplitMix64 g2(61);
  const auto big = testutil::random_counts(2, 20000, 3, g2);
  const BitString target = small.entries().front().first;
  const auto pipeline = [&](const CountsTable &c) {
    return double(c.count_of(target)) / double(c.shots());
  };
  const auto rs = unfold::bootstrap_ci(small, pipeline, 80, 5);
  const auto rb = unfold::bootstrap_ci(big, pipeline, 80, 5);
  CHECK(*rb.ci_high - *rb.ci_low < *rs.ci_high - *rs.ci_low);
}
