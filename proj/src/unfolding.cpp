// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/unfolding.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "unfold/errors.hpp"

namespace unfold {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Compensated accumulator; the likelihood trace feeds a monotonicity check
// with 1e-10 slack, which plain summation can miss at large shot totals.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double delta_norm(const Eigen::VectorXd &d, StopNorm norm) {
  switch (norm) {
  case StopNorm::l1:
    return d.lpNorm<1>();
  case StopNorm::l2:
    return d.norm();
  case StopNorm::linf:
    return d.lpNorm<Eigen::Infinity>();
  }
  return d.lpNorm<1>();
}

// Row index paired with its observation weight (a count, or an exact
// probability for the distribution-fed driver).
struct WeightedRow {
  Eigen::Index row;
  double weight;
};

// p ⊘ x1 with the conventions: 0/0 contributes 0, observed mass over a
// zero model probability is a hard error.
Eigen::VectorXd observed_ratio(const Eigen::Ref<const Eigen::VectorXd> &p,
                               const Eigen::VectorXd &x1) {
  Eigen::VectorXd x2 = Eigen::VectorXd::Zero(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0)
      continue;
    if (x1[i] <= 0.0)
      throw UnreachableOutcomeError(
          "unreachable outcome: the model assigns zero probability to an "
          "observed bitstring; raise the Hamming radius");
    x2[i] = p[i] / x1[i];
  }
  return x2;
}

double weighted_log(const Eigen::VectorXd &x1,
                    const std::vector<WeightedRow> &weights, KahanSum acc) {
  for (const auto &w : weights) {
    const double v = x1[w.row];
    if (v <= 0.0)
      return kNegInf;
    acc.add(w.weight * std::log(v));
  }
  return acc.sum;
}

// Log-prior contribution of the MAP objective; terms with alpha_j = 1
// vanish identically and are skipped so a zero iterate entry stays finite.
KahanSum log_prior_seed(const Eigen::VectorXd &theta,
                        const Eigen::VectorXd *alpha) {
  KahanSum acc;
  if (alpha)
    for (Eigen::Index j = 0; j < theta.size(); ++j)
      if ((*alpha)[j] > 1.0)
        acc.add(((*alpha)[j] - 1.0) * std::log(theta[j]));
  return acc;
}

struct EnginePlan {
  std::function<Eigen::VectorXd(const Eigen::VectorXd &)> forward;
  std::function<Eigen::VectorXd(const Eigen::VectorXd &)> backward;
  Eigen::VectorXd p;                // aligned with rows
  std::vector<WeightedRow> weights; // log-likelihood terms
  VectorDomain domain;              // of the latent iterate
  bool renormalize = false;
  // MAP coefficients; prior_coef null means the plain update.
  const Eigen::VectorXd *prior_coef = nullptr;
  double scale = 1.0;
  const Eigen::VectorXd *alpha = nullptr; // for the objective trace
};

void check_config(const IbuConfig &config) {
  if (!(config.tol > 0.0))
    throw ValidationError("tolerance must be positive");
  if (config.max_iters < 1)
    throw ValidationError("iteration cap must be at least 1");
}

Eigen::VectorXd initial_iterate(const EnginePlan &plan, const IbuConfig &config,
                                const std::vector<WeightedRow> &observed_rows,
                                const std::function<std::optional<Eigen::Index>(
                                    Eigen::Index)> &row_to_latent,
                                double fill) {
  const Eigen::Index m = plan.domain.dim();
  switch (config.init) {
  case InitKind::uniform:
    return Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  case InitKind::empirical: {
    Eigen::VectorXd t = Eigen::VectorXd::Constant(m, fill);
    for (const auto &w : observed_rows) {
      const auto j = row_to_latent(w.row);
      if (j)
        t[*j] = plan.p[w.row];
    }
    t /= t.sum();
    return t;
  }
  case InitKind::explicit_values: {
    if (!config.init_values)
      throw ValidationError("explicit initialization needs a starting vector");
    if (config.init_values->size() != m)
      throw ValidationError("starting vector is not aligned with the "
                            "tracked subspace");
    require_nonnegative(*config.init_values);
    require_unit_sum(*config.init_values);
    return *config.init_values;
  }
  }
  throw ValidationError("unknown initialization kind");
}

UnfoldResult run_engine(const EnginePlan &plan, Eigen::VectorXd theta,
                        const IbuConfig &config) {
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(config.max_iters) + 1);
  bool converged = false;
  double final_delta = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;

  const auto t_start = std::chrono::steady_clock::now();
  while (iterations < config.max_iters) {
    Eigen::VectorXd x1 = plan.forward(theta);
    trace.push_back(weighted_log(x1, plan.weights,
                                 log_prior_seed(theta, plan.alpha)));
    const Eigen::VectorXd x2 = observed_ratio(plan.p, x1);
    const Eigen::VectorXd x3 = plan.backward(x2);
    Eigen::VectorXd next = theta.cwiseProduct(x3);
    if (plan.prior_coef)
      next = *plan.prior_coef + plan.scale * next;
    if (plan.renormalize)
      next /= next.sum();
    ++iterations;
    final_delta = delta_norm(next - theta, config.norm);
    theta = std::move(next);
    if (final_delta < config.tol) {
      converged = true;
      break;
    }
  }
  const auto t_end = std::chrono::steady_clock::now();

  // Objective at the final iterate (one extra forward product).
  trace.push_back(weighted_log(plan.forward(theta), plan.weights,
                               log_prior_seed(theta, plan.alpha)));

  const double wall = std::chrono::duration<double>(t_end - t_start).count();
  return UnfoldResult{ProbVector(plan.domain, std::move(theta)),
                      iterations,
                      std::move(trace),
                      converged,
                      final_delta,
                      wall,
                      wall / static_cast<double>(std::max(iterations, 1))};
}

SubspacePtr domain_subspace_or_full(const VectorDomain &domain) {
  if (domain.space())
    return domain.space();
  return full_subspace(domain.qubit_count());
}

} // namespace

Method method_from_name(const std::string &name) {
  if (name == "ibu-full")
    return Method::ibu_full;
  if (name == "ibu-reduced")
    return Method::ibu_reduced;
  if (name == "map-ibu")
    return Method::map_ibu;
  if (name == "inverse")
    return Method::inverse;
  throw ValidationError("unknown method '" + name + "'");
}

std::string method_name(Method m) {
  switch (m) {
  case Method::ibu_full:
    return "ibu-full";
  case Method::ibu_reduced:
    return "ibu-reduced";
  case Method::map_ibu:
    return "map-ibu";
  case Method::inverse:
    return "inverse";
  }
  return "?";
}

DirichletPrior::DirichletPrior(SubspacePtr tracked, Eigen::VectorXd alpha)
    : tracked_(std::move(tracked)), alpha_(std::move(alpha)) {
  if (!tracked_)
    throw ValidationError("prior needs a tracked subspace");
  if (alpha_.size() != static_cast<Eigen::Index>(tracked_->size()))
    throw ValidationError("prior is not aligned with the tracked subspace");
  for (Eigen::Index j = 0; j < alpha_.size(); ++j) {
    if (!(alpha_[j] >= 1.0))
      throw ValidationError("prior concentrations must be at least 1");
    excess_ += alpha_[j] - 1.0;
  }
}

DirichletPrior DirichletPrior::flat(SubspacePtr tracked) {
  const auto m = static_cast<Eigen::Index>(tracked->size());
  return DirichletPrior(std::move(tracked), Eigen::VectorXd::Ones(m));
}

double DirichletPrior::total_concentration(int n) const {
  return std::pow(2.0, n) + excess_;
}

ProbVector ibu_step_full(const TensorResponse &r, const ProbVector &p,
                         const ProbVector &theta) {
  const int n = r.qubit_count();
  if (!p.domain().is_full_space() || !theta.domain().is_full_space() ||
      p.domain().qubit_count() != n || theta.domain().qubit_count() != n)
    throw ValidationError("full-space update needs full-space vectors "
                          "matching the response");
  const Eigen::VectorXd x1 = tensor_matvec(r, theta.values());
  const Eigen::VectorXd x2 = observed_ratio(p.values(), x1);
  const Eigen::VectorXd x3 = tensor_matvec(r, x2, true);
  return ProbVector(theta.domain(), theta.values().cwiseProduct(x3));
}

ProbVector ibu_step_reduced(const TensorResponse &r, const ProbVector &p,
                            const ProbVector &theta, int threads) {
  const SubspacePtr obs = domain_subspace_or_full(p.domain());
  const SubspacePtr tracked = domain_subspace_or_full(theta.domain());
  const Eigen::VectorXd x1 =
      reduced_matvec_streaming(r, *obs, *tracked, theta.values(), false,
                               threads);
  const Eigen::VectorXd x2 = observed_ratio(p.values(), x1);
  const Eigen::VectorXd x3 =
      reduced_matvec_streaming(r, *obs, *tracked, x2, true, threads);
  Eigen::VectorXd next = theta.values().cwiseProduct(x3);
  next /= next.sum();
  return ProbVector(theta.domain(), std::move(next));
}

ProbVector map_ibu_step(const TensorResponse &r, const CountsTable &counts,
                        const ProbVector &theta, const DirichletPrior &prior,
                        int threads) {
  const ProbVector p = counts_to_distribution(counts);
  const SubspacePtr obs = p.domain().space();
  const SubspacePtr tracked = domain_subspace_or_full(theta.domain());
  if (prior.tracked()->members() != tracked->members())
    throw ValidationError("prior is not aligned with the tracked subspace");
  const double shots = static_cast<double>(counts.shots());
  const double denom = shots + prior.excess();
  if (!(denom > 0.0))
    throw ValidationError("posterior denominator must be positive");
  const Eigen::VectorXd coef = (prior.alpha().array() - 1.0) / denom;
  const double scale = shots / denom;

  const Eigen::VectorXd x1 =
      reduced_matvec_streaming(r, *obs, *tracked, theta.values(), false,
                               threads);
  const Eigen::VectorXd x2 = observed_ratio(p.values(), x1);
  const Eigen::VectorXd x3 =
      reduced_matvec_streaming(r, *obs, *tracked, x2, true, threads);
  Eigen::VectorXd next = coef + scale * theta.values().cwiseProduct(x3);
  next /= next.sum();
  return ProbVector(theta.domain(), std::move(next));
}

double log_likelihood(const TensorResponse &r, const CountsTable &counts,
                      const ProbVector &theta, int threads) {
  if (counts.qubit_count() != r.qubit_count() ||
      theta.domain().qubit_count() != r.qubit_count())
    throw ValidationError("counts, response, and estimate must agree on "
                          "qubit count");
  KahanSum acc;
  if (theta.domain().is_full_space()) {
    const Eigen::VectorXd x1 = tensor_matvec(r, theta.values());
    for (const auto &[bits, c] : counts.entries()) {
      const double v = x1[static_cast<Eigen::Index>(bitstring_to_index(bits))];
      if (v <= 0.0)
        return kNegInf;
      acc.add(static_cast<double>(c) * std::log(v));
    }
    return acc.sum;
  }
  const auto obs = Subspace::from_members(counts.observed(), std::nullopt);
  const Eigen::VectorXd x1 = reduced_matvec_streaming(
      r, *obs, *theta.domain().space(), theta.values(), false, threads);
  for (const auto &[bits, c] : counts.entries()) {
    const double v = x1[static_cast<Eigen::Index>(*obs->find(bits))];
    if (v <= 0.0)
      return kNegInf;
    acc.add(static_cast<double>(c) * std::log(v));
  }
  return acc.sum;
}

UnfoldResult run_ibu(Method method, const TensorResponse &r,
                     const CountsTable &counts, int d, const IbuConfig &config,
                     const std::optional<DirichletPrior> &prior,
                     const ReducedOperatorOptions &op_options) {
  check_config(config);
  const int n = r.qubit_count();
  if (counts.qubit_count() != n)
    throw ValidationError("counts and response disagree on qubit count");
  if (method == Method::inverse)
    throw ValidationError("inversion is not an iterative method");
  if (prior && method != Method::map_ibu)
    throw ValidationError("a prior requires the map-ibu method");

  const double shots = static_cast<double>(counts.shots());
  const double fill = 1.0 / (10.0 * shots);

  if (method == Method::ibu_full) {
    EnginePlan plan;
    plan.domain = VectorDomain::full(n);
    plan.p = counts_to_full_vector(counts);
    for (const auto &[bits, c] : counts.entries())
      plan.weights.push_back(
          {static_cast<Eigen::Index>(bitstring_to_index(bits)),
           static_cast<double>(c)});
    plan.forward = [&r](const Eigen::VectorXd &v) {
      return tensor_matvec(r, v, false);
    };
    plan.backward = [&r](const Eigen::VectorXd &v) {
      return tensor_matvec(r, v, true);
    };
    const auto identity_row = [](Eigen::Index i) {
      return std::optional<Eigen::Index>(i);
    };
    return run_engine(plan,
                      initial_iterate(plan, config, plan.weights, identity_row,
                                      fill),
                      config);
  }

  const ProbVector p = counts_to_distribution(counts);
  const SubspacePtr obs = p.domain().space();
  const SubspacePtr tracked = build_subspace(counts.observed(), d, n);
  const ReducedOperator op(r, obs, tracked, op_options);

  EnginePlan plan;
  plan.domain = VectorDomain(tracked);
  plan.p = p.values();
  for (const auto &[bits, c] : counts.entries())
    plan.weights.push_back({static_cast<Eigen::Index>(*obs->find(bits)),
                            static_cast<double>(c)});
  plan.forward = [&op](const Eigen::VectorXd &v) { return op.apply(v); };
  plan.backward = [&op](const Eigen::VectorXd &v) {
    return op.apply_transpose(v);
  };
  plan.renormalize = true;

  Eigen::VectorXd coef;
  Eigen::VectorXd alpha;
  if (method == Method::map_ibu) {
    DirichletPrior effective =
        prior ? *prior : DirichletPrior::flat(tracked);
    if (effective.tracked()->members() != tracked->members())
      throw ValidationError("prior is not aligned with the tracked subspace");
    const double denom = shots + effective.excess();
    if (!(denom > 0.0))
      throw ValidationError("posterior denominator must be positive");
    coef = (effective.alpha().array() - 1.0) / denom;
    alpha = effective.alpha();
    plan.prior_coef = &coef;
    plan.scale = shots / denom;
    plan.alpha = &alpha;
  }

  const auto row_to_latent = [&](Eigen::Index i) {
    return tracked->find(obs->member(static_cast<std::size_t>(i)));
  };
  return run_engine(plan,
                    initial_iterate(plan, config, plan.weights, row_to_latent,
                                    fill),
                    config);
}

UnfoldResult run_ibu_on_distribution(Method method, const TensorResponse &r,
                                     const ProbVector &p, int d,
                                     const IbuConfig &config,
                                     const ReducedOperatorOptions &op_options) {
  check_config(config);
  const int n = r.qubit_count();
  if (p.domain().qubit_count() != n)
    throw ValidationError("distribution and response disagree on qubit count");
  if (method == Method::map_ibu)
    throw ValidationError("map-ibu needs counts with a shot total");
  if (method == Method::inverse)
    throw ValidationError("inversion is not an iterative method");

  if (method == Method::ibu_full) {
    EnginePlan plan;
    plan.domain = VectorDomain::full(n);
    if (p.domain().is_full_space()) {
      plan.p = p.values();
    } else {
      plan.p = Eigen::VectorXd::Zero(plan.domain.dim());
      const auto &space = *p.domain().space();
      for (std::size_t i = 0; i < space.size(); ++i)
        plan.p[static_cast<Eigen::Index>(
            bitstring_to_index(space.member(i)))] = p.values()[i];
    }
    for (Eigen::Index i = 0; i < plan.p.size(); ++i)
      if (plan.p[i] > 0.0)
        plan.weights.push_back({i, plan.p[i]});
    plan.forward = [&r](const Eigen::VectorXd &v) {
      return tensor_matvec(r, v, false);
    };
    plan.backward = [&r](const Eigen::VectorXd &v) {
      return tensor_matvec(r, v, true);
    };
    const auto identity_row = [](Eigen::Index i) {
      return std::optional<Eigen::Index>(i);
    };
    const double fill = 1.0 / (10.0 * static_cast<double>(plan.domain.dim()));
    return run_engine(plan,
                      initial_iterate(plan, config, plan.weights, identity_row,
                                      fill),
                      config);
  }

  const SubspacePtr obs = domain_subspace_or_full(p.domain());
  std::vector<BitString> seeds;
  for (std::size_t i = 0; i < obs->size(); ++i)
    if (p.values()[static_cast<Eigen::Index>(i)] > 0.0)
      seeds.push_back(obs->member(i));
  const SubspacePtr tracked = build_subspace(seeds, d, n);
  const ReducedOperator op(r, obs, tracked, op_options);

  EnginePlan plan;
  plan.domain = VectorDomain(tracked);
  plan.p = p.values();
  for (std::size_t i = 0; i < obs->size(); ++i)
    if (p.values()[static_cast<Eigen::Index>(i)] > 0.0)
      plan.weights.push_back({static_cast<Eigen::Index>(i),
                              p.values()[static_cast<Eigen::Index>(i)]});
  plan.forward = [&op](const Eigen::VectorXd &v) { return op.apply(v); };
  plan.backward = [&op](const Eigen::VectorXd &v) {
    return op.apply_transpose(v);
  };
  plan.renormalize = true;

  const auto row_to_latent = [&](Eigen::Index i) {
    return tracked->find(obs->member(static_cast<std::size_t>(i)));
  };
  const double fill = 1.0 / (10.0 * static_cast<double>(tracked->size()));
  return run_engine(plan,
                    initial_iterate(plan, config, plan.weights, row_to_latent,
                                    fill),
                    config);
}

} // namespace unfold
