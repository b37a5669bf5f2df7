// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/prob_vector.hpp"

#include <cmath>
#include <string>

#include "unfold/errors.hpp"

namespace unfold {

namespace {
constexpr int kMaxFullVectorQubits = 24;
} // namespace

VectorDomain::VectorDomain(SubspacePtr space) : space_(std::move(space)) {
  if (!space_)
    throw ValidationError("vector domain requires a subspace");
  n_ = space_->qubit_count();
}

VectorDomain VectorDomain::full(int n) {
  if (n < 1)
    throw ValidationError("qubit count must be positive");
  if (n > kMaxFullVectorQubits)
    throw ValidationError("full-space vectors limited to " +
                          std::to_string(kMaxFullVectorQubits) +
                          " qubits; use a subspace");
  VectorDomain d;
  d.n_ = n;
  return d;
}

Eigen::Index VectorDomain::dim() const {
  if (space_)
    return static_cast<Eigen::Index>(space_->size());
  return Eigen::Index{1} << n_;
}

BitString VectorDomain::label(Eigen::Index i) const {
  if (space_)
    return space_->member(static_cast<std::size_t>(i));
  return index_to_bitstring(static_cast<std::uint64_t>(i), n_);
}

void require_unit_sum(const Eigen::Ref<const Eigen::VectorXd> &v, double tol) {
  const double s = v.sum();
  if (!std::isfinite(s) || std::abs(s - 1.0) > tol)
    throw ValidationError("vector sum " + std::to_string(s) +
                          " deviates from 1 beyond tolerance");
}

void require_nonnegative(const Eigen::Ref<const Eigen::VectorXd> &v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0))
      throw ValidationError("probability entry " + std::to_string(i) +
                            " is negative or NaN");
}

QuasiProbVector::QuasiProbVector(VectorDomain domain, Eigen::VectorXd values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.dim())
    throw ValidationError("vector length does not match its domain");
  require_unit_sum(values_);
}

ProbVector::ProbVector(VectorDomain domain, Eigen::VectorXd values)
    : domain_(std::move(domain)), values_(std::move(values)) {
  if (values_.size() != domain_.dim())
    throw ValidationError("vector length does not match its domain");
  require_unit_sum(values_);
  require_nonnegative(values_);
}

double ProbVector::probability_of(const BitString &b) const {
  if (b.size() != domain_.qubit_count())
    throw ValidationError("bitstring length does not match the domain");
  if (domain_.is_full_space())
    return values_[static_cast<Eigen::Index>(bitstring_to_index(b))];
  const auto idx = domain_.space()->find(b);
  return idx ? values_[static_cast<Eigen::Index>(*idx)] : 0.0;
}

ProbVector counts_to_distribution(const CountsTable &counts) {
  auto space = Subspace::from_members(counts.observed(), std::nullopt);
  const double shots = static_cast<double>(counts.shots());
  Eigen::VectorXd v(static_cast<Eigen::Index>(space->size()));
  for (const auto &[bits, c] : counts.entries()) {
    const auto idx = space->find(bits);
    v[static_cast<Eigen::Index>(*idx)] = static_cast<double>(c) / shots;
  }
  return ProbVector(VectorDomain(std::move(space)), std::move(v));
}

Eigen::VectorXd counts_to_full_vector(const CountsTable &counts) {
  VectorDomain domain = VectorDomain::full(counts.qubit_count());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(domain.dim());
  const double shots = static_cast<double>(counts.shots());
  for (const auto &[bits, c] : counts.entries())
    v[static_cast<Eigen::Index>(bitstring_to_index(bits))] =
        static_cast<double>(c) / shots;
  return v;
}

} // namespace unfold
