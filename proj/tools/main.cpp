// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: calibrate, simulate, mitigate, score, sweep.
// Exit codes: 0 success, 2 bad input, 3 the model cannot explain an
// observed outcome.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "unfold/errors.hpp"
#include "unfold/io.hpp"
#include "unfold/metrics.hpp"
#include "unfold/simulate.hpp"
#include "unfold/sweep.hpp"
#include "unfold/unfolding.hpp"

namespace {

using unfold::Json;

std::string join_command(int argc, char **argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i)
      out += ' ';
    out += argv[i];
  }
  return out;
}

Json make_manifest(const std::string &command,
                   const std::vector<std::string> &input_paths,
                   std::optional<std::uint64_t> seed) {
  Json inputs = Json::object();
  for (const auto &p : input_paths)
    inputs[p] = unfold::file_digest(p);
  Json m{{"command", command},
         {"version", unfold::kToolVersion},
         {"inputs", std::move(inputs)}};
  if (seed)
    m["seed"] = *seed;
  return m;
}

unfold::IdealDistribution resolve_ideal(const std::string &ideal, int n,
                                        const std::string &hidden) {
  if (ideal == "ghz") {
    if (n < 1)
      throw unfold::ValidationError("--ideal ghz needs --n");
    return unfold::ideal_ghz(n);
  }
  if (ideal == "bv") {
    if (hidden.empty())
      throw unfold::ValidationError("--ideal bv needs --hidden");
    return unfold::ideal_bv(unfold::BitString::from_string(hidden));
  }
  int file_n = 0;
  auto values = unfold::sparse_from_json(unfold::load_json_file(ideal), file_n);
  return unfold::ideal_explicit(file_n, std::move(values));
}

Json score_report_to_json(const unfold::ScoreReport &report,
                          double negative_mass) {
  Json j{{"score", report.score_name},
         {"value", report.value},
         {"resamples", report.resamples},
         {"negative_mass", negative_mass}};
  if (report.ci_low && report.ci_high) {
    j["ci_low"] = *report.ci_low;
    j["ci_high"] = *report.ci_high;
    j["interval"] = report.interval_method;
  }
  return j;
}

// Replays the mitigation recorded in a result file on fresh counts; used by
// the bootstrap so every resample goes through the full pipeline.
unfold::SparseWeights replay_mitigation(const unfold::ResultData &settings,
                                        const unfold::TensorResponse &response,
                                        const unfold::CountsTable &counts,
                                        const std::string &prior_path,
                                        int threads) {
  if (settings.method == "inverse") {
    const auto dense = unfold::materialize_full_response(response);
    const unfold::ProbVector p(unfold::VectorDomain::full(counts.qubit_count()),
                               unfold::counts_to_full_vector(counts));
    return unfold::to_sparse(unfold::invert_mitigate(dense, p));
  }
  unfold::IbuConfig config;
  config.tol = settings.tol > 0 ? settings.tol : 1e-6;
  config.max_iters = settings.max_iters > 0 ? settings.max_iters : 1000;
  config.norm = unfold::stop_norm_from_name(settings.norm);
  config.init = unfold::init_kind_from_name(settings.init);
  unfold::ReducedOperatorOptions ops;
  ops.threads = threads;
  std::optional<unfold::DirichletPrior> prior;
  const unfold::Method method = unfold::method_from_name(settings.method);
  if (!prior_path.empty() && method == unfold::Method::map_ibu) {
    const auto tracked = unfold::build_subspace(counts.observed(), settings.d,
                                                counts.qubit_count());
    prior = unfold::prior_from_json(unfold::load_json_file(prior_path),
                                    tracked);
  }
  const auto result = unfold::run_ibu(method, response, counts, settings.d,
                                      config, prior, ops);
  return unfold::to_sparse(result.theta);
}

int run(int argc, char **argv) {
  CLI::App app{"Readout-error mitigation for bitstring counts"};
  app.require_subcommand(1);
  const std::string command = join_command(argc, argv);
  const int threads = unfold::env_thread_cap();

  // ---- calibrate ----
  auto *cal = app.add_subcommand(
      "calibrate", "Estimate per-qubit response matrices from counts");
  std::vector<std::string> cal_zeros, cal_ones;
  std::string cal_out;
  cal->add_option("--zeros", cal_zeros,
                  "Per-qubit counts files measured after preparing |0>")
      ->required();
  cal->add_option("--ones", cal_ones,
                  "Per-qubit counts files measured after preparing |1>")
      ->required();
  cal->add_option("-o,--output", cal_out, "Calibration file to write")
      ->required();

  // ---- simulate ----
  auto *sim = app.add_subcommand(
      "simulate", "Sample noisy counts from an ideal distribution");
  std::string sim_ideal, sim_hidden, sim_calib, sim_out;
  int sim_n = 0;
  std::uint64_t sim_shots = 0, sim_seed = 1;
  sim->add_option("--ideal", sim_ideal,
                  "ghz, bv, or a sparse distribution file")
      ->required();
  sim->add_option("--n", sim_n, "Qubit count (ghz)");
  sim->add_option("--hidden", sim_hidden, "Hidden bitstring (bv)");
  sim->add_option("--calib", sim_calib, "Calibration file")->required();
  sim->add_option("--shots", sim_shots, "Shots to draw")->required();
  sim->add_option("--seed", sim_seed, "Sampling seed")->capture_default_str();
  sim->add_option("-o,--output", sim_out, "Counts file to write")->required();

  // ---- mitigate ----
  auto *mit = app.add_subcommand("mitigate",
                                 "Unfold a counts file through a response");
  std::string mit_counts, mit_calib, mit_method = "ibu-reduced";
  std::string mit_init = "uniform", mit_prior, mit_bit_order = "q0-left";
  std::string mit_out;
  int mit_d = 0, mit_max_iters = 1000;
  double mit_tol = 1e-6;
  bool mit_no_cache = false;
  mit->add_option("--counts", mit_counts, "Counts file")->required();
  mit->add_option("--calib", mit_calib, "Calibration file")->required();
  mit->add_option("--method", mit_method,
                  "ibu-full | ibu-reduced | map-ibu | inverse")->capture_default_str();
  mit->add_option("--hamming-distance,-d", mit_d,
                  "Tracked-subspace radius around observed bitstrings")->capture_default_str();
  mit->add_option("--tol", mit_tol, "Convergence tolerance")->capture_default_str();
  mit->add_option("--max-iters", mit_max_iters, "Iteration cap")->capture_default_str();
  mit->add_option("--init", mit_init, "uniform | empirical")->capture_default_str()
      ->check(CLI::IsMember({"uniform", "empirical"}));
  mit->add_option("--prior", mit_prior, "Dirichlet prior file (map-ibu)");
  mit->add_option("--bit-order", mit_bit_order, "q0-left | q0-right")->capture_default_str()
      ->check(CLI::IsMember({"q0-left", "q0-right"}));
  mit->add_flag("--no-cache", mit_no_cache,
                "Always stream the reduced matrix instead of caching it");
  mit->add_option("-o,--output", mit_out, "Result file to write")->required();

  // ---- score ----
  auto *sco = app.add_subcommand("score",
                                 "Score a result against a reference");
  std::string sco_result, sco_dist, sco_bv, sco_counts, sco_calib, sco_prior;
  std::string sco_bit_order = "q0-left", sco_out;
  int sco_ghz = 0, sco_bootstrap = 0;
  std::uint64_t sco_seed = 1;
  sco->add_option("--result", sco_result, "Result file")->required();
  auto *ref_ghz = sco->add_option("--ghz", sco_ghz, "Reference: GHZ over N qubits");
  auto *ref_bv = sco->add_option("--bv", sco_bv, "Reference: hidden bitstring");
  auto *ref_dist =
      sco->add_option("--dist", sco_dist, "Reference: distribution file");
  ref_ghz->excludes(ref_bv)->excludes(ref_dist);
  ref_bv->excludes(ref_dist);
  sco->add_option("--bootstrap", sco_bootstrap,
                  "Resamples for a 95% confidence interval");
  sco->add_option("--counts", sco_counts, "Counts file (bootstrap)");
  sco->add_option("--calib", sco_calib, "Calibration file (bootstrap)");
  sco->add_option("--prior", sco_prior, "Prior file replayed for map-ibu");
  sco->add_option("--seed", sco_seed, "Bootstrap seed")->capture_default_str();
  sco->add_option("--bit-order", sco_bit_order, "q0-left | q0-right")->capture_default_str()
      ->check(CLI::IsMember({"q0-left", "q0-right"}));
  sco->add_option("-o,--output", sco_out, "Score file to write")->required();

  // ---- sweep ----
  auto *swp = app.add_subcommand(
      "sweep", "Run a simulate/mitigate/score grid and emit CSV");
  std::string swp_family, swp_out;
  std::vector<int> swp_ns;
  int swp_nmin = 0, swp_nmax = -1, swp_nstep = 1, swp_d = 0,
      swp_max_iters = 1000;
  std::uint64_t swp_shots = 0;
  std::vector<std::uint64_t> swp_seeds{1};
  std::vector<std::string> swp_methods{"raw", "ibu-reduced"};
  double swp_tol = 1e-6, swp_flip_lo = 0.005, swp_flip_hi = 0.04;
  double swp_flip_fixed = -1.0;
  bool swp_no_cache = false;
  swp->add_option("--family", swp_family, "ghz | bv")->required();
  swp->add_option("--n-list", swp_ns, "Explicit qubit counts")
      ->delimiter(',');
  swp->add_option("--n-min", swp_nmin, "Range start");
  swp->add_option("--n-max", swp_nmax, "Range end (inclusive)");
  swp->add_option("--n-step", swp_nstep, "Range step")->capture_default_str();
  swp->add_option("--shots", swp_shots, "Shots per cell")->required();
  swp->add_option("--seeds", swp_seeds, "Base seeds")->capture_default_str()->delimiter(',');
  swp->add_option("--methods", swp_methods,
                  "raw | ibu-full | ibu-reduced | map-ibu | inverse")->capture_default_str()
      ->delimiter(',');
  swp->add_option("--d", swp_d, "Tracked-subspace radius")->capture_default_str();
  swp->add_option("--tol", swp_tol, "Convergence tolerance")->capture_default_str();
  swp->add_option("--max-iters", swp_max_iters, "Iteration cap")->capture_default_str();
  swp->add_option("--flip", swp_flip_fixed,
                  "Fixed per-qubit flip rate for every qubit");
  swp->add_option("--flip-lo", swp_flip_lo, "Drawn flip-rate range low")->capture_default_str();
  swp->add_option("--flip-hi", swp_flip_hi, "Drawn flip-rate range high")->capture_default_str();
  swp->add_flag("--no-cache", swp_no_cache,
                "Always stream the reduced matrix instead of caching it");
  swp->add_option("-o,--output", swp_out, "CSV file to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (cal->parsed()) {
    if (cal_zeros.size() != cal_ones.size() || cal_zeros.empty())
      throw unfold::ValidationError(
          "calibration incomplete: need one |0> and one |1> counts file per "
          "qubit");
    std::vector<unfold::SingleQubitResponse> factors;
    std::vector<std::string> inputs;
    for (std::size_t k = 0; k < cal_zeros.size(); ++k) {
      const auto c0 = unfold::counts_from_json(
          unfold::load_json_file(cal_zeros[k]));
      const auto c1 = unfold::counts_from_json(
          unfold::load_json_file(cal_ones[k]));
      factors.push_back(unfold::estimate_single_qubit_response(c0, c1));
      inputs.push_back(cal_zeros[k]);
      inputs.push_back(cal_ones[k]);
    }
    Json out = unfold::calibration_to_json(
        unfold::TensorResponse(std::move(factors)));
    out["manifest"] = make_manifest(command, inputs, std::nullopt);
    unfold::save_json_file(cal_out, out);
    return 0;
  }

  if (sim->parsed()) {
    const auto response =
        unfold::calibration_from_json(unfold::load_json_file(sim_calib));
    const auto ideal = resolve_ideal(sim_ideal, sim_n, sim_hidden);
    if (ideal.n != response.qubit_count())
      throw unfold::ValidationError(
          "calibration and ideal distribution disagree on qubit count");
    const auto counts =
        unfold::sample_noisy_counts(ideal, response, sim_shots, sim_seed);
    Json out = unfold::counts_to_json(counts);
    Json ideal_meta{{"kind", sim_ideal == "ghz"  ? "ghz"
                             : sim_ideal == "bv" ? "bv"
                                                 : "file"}};
    if (sim_ideal == "ghz")
      ideal_meta["n"] = ideal.n;
    else if (sim_ideal == "bv")
      ideal_meta["hidden"] = sim_hidden;
    else
      ideal_meta["path"] = sim_ideal;
    std::vector<std::string> inputs{sim_calib};
    if (ideal.kind == unfold::IdealDistribution::Kind::explicit_values)
      inputs.push_back(sim_ideal);
    out["metadata"] = Json{{"seed", sim_seed},
                           {"ideal", std::move(ideal_meta)},
                           {"response_file", sim_calib}};
    out["manifest"] = make_manifest(command, inputs, sim_seed);
    unfold::save_json_file(sim_out, out);
    return 0;
  }

  if (mit->parsed()) {
    const auto order = unfold::bit_order_from_name(mit_bit_order);
    const auto counts =
        unfold::counts_from_json(unfold::load_json_file(mit_counts), order);
    const auto response =
        unfold::calibration_from_json(unfold::load_json_file(mit_calib));
    if (counts.qubit_count() != response.qubit_count())
      throw unfold::ValidationError(
          "counts and calibration disagree on qubit count");

    unfold::ResultData data;
    data.method = mit_method;
    data.n = counts.qubit_count();
    data.d = mit_d;
    data.tol = mit_tol;
    data.max_iters = mit_max_iters;
    data.init = mit_init;
    double wall = 0.0, per_iter = 0.0;

    if (mit_method == "inverse") {
      const auto dense = unfold::materialize_full_response(response);
      const unfold::ProbVector p(unfold::VectorDomain::full(data.n),
                                 unfold::counts_to_full_vector(counts));
      const auto q = unfold::invert_mitigate(dense, p);
      data.quasi = true;
      data.converged = true;
      data.theta = unfold::to_sparse(q);
    } else {
      unfold::IbuConfig config;
      config.tol = mit_tol;
      config.max_iters = mit_max_iters;
      config.init = unfold::init_kind_from_name(mit_init);
      unfold::ReducedOperatorOptions ops;
      ops.threads = threads;
      ops.cache_enabled = !mit_no_cache;
      const unfold::Method method = unfold::method_from_name(mit_method);
      std::optional<unfold::DirichletPrior> prior;
      if (!mit_prior.empty()) {
        if (method != unfold::Method::map_ibu)
          throw unfold::ValidationError(
              "a prior requires the map-ibu method");
        const auto tracked =
            unfold::build_subspace(counts.observed(), mit_d, data.n);
        prior = unfold::prior_from_json(unfold::load_json_file(mit_prior),
                                        tracked);
      }
      const auto result = unfold::run_ibu(method, response, counts, mit_d,
                                          config, prior, ops);
      data.iterations = result.iterations;
      data.converged = result.converged;
      data.final_delta = result.final_delta;
      data.theta = unfold::to_sparse(result.theta);
      data.log_likelihood = result.likelihood_trace;
      wall = result.wall_seconds;
      per_iter = result.seconds_per_iteration;
    }

    Json out = unfold::result_to_json(data);
    std::vector<std::string> inputs{mit_counts, mit_calib};
    if (!mit_prior.empty())
      inputs.push_back(mit_prior);
    Json manifest = make_manifest(command, inputs, std::nullopt);
    manifest["wall_seconds"] = wall;
    manifest["per_iteration_seconds"] = per_iter;
    out["manifest"] = std::move(manifest);
    unfold::save_json_file(mit_out, out);
    return 0;
  }

  if (sco->parsed()) {
    const auto result =
        unfold::result_from_json(unfold::load_json_file(sco_result));
    if (!*ref_ghz && !*ref_bv && !*ref_dist)
      throw unfold::ValidationError(
          "score needs a reference: --ghz, --bv, or --dist");

    std::string score_name = "normalized-l1";
    unfold::SparseWeights reference;
    unfold::BitString hidden;
    if (*ref_ghz) {
      reference = unfold::ideal_ghz(sco_ghz).values;
    } else if (*ref_bv) {
      hidden = unfold::BitString::from_string(sco_bv);
      score_name = "success-probability";
    } else {
      int ref_n = 0;
      auto values =
          unfold::sparse_from_json(unfold::load_json_file(sco_dist), ref_n);
      reference = unfold::make_sparse(std::move(values));
      if (ref_n != result.n)
        throw unfold::ValidationError(
            "reference and result disagree on qubit count");
    }

    const auto score_of = [&](const unfold::SparseWeights &est) {
      if (score_name == "success-probability")
        return unfold::success_probability(est, hidden);
      return unfold::normalized_l1_score(est, reference);
    };

    const double negmass = unfold::negative_mass(result.theta);
    unfold::ScoreReport report;
    std::vector<std::string> inputs{sco_result};
    if (sco_bootstrap > 0) {
      if (sco_counts.empty() || sco_calib.empty())
        throw unfold::ValidationError(
            "--bootstrap needs --counts and --calib to replay the pipeline");
      const auto order = unfold::bit_order_from_name(sco_bit_order);
      const auto counts = unfold::counts_from_json(
          unfold::load_json_file(sco_counts), order);
      const auto response = unfold::calibration_from_json(
          unfold::load_json_file(sco_calib));
      report = unfold::bootstrap_ci(
          counts,
          [&](const unfold::CountsTable &resampled) {
            return score_of(replay_mitigation(result, response, resampled,
                                              sco_prior, threads));
          },
          sco_bootstrap, sco_seed, score_name);
      inputs.push_back(sco_counts);
      inputs.push_back(sco_calib);
      if (!sco_prior.empty())
        inputs.push_back(sco_prior);
    } else {
      report.score_name = score_name;
      report.value = score_of(result.theta);
    }
    if (*ref_dist)
      inputs.push_back(sco_dist);

    Json out = score_report_to_json(report, negmass);
    out["method"] = result.method;
    out["manifest"] = make_manifest(
        command, inputs,
        sco_bootstrap > 0 ? std::optional<std::uint64_t>(sco_seed)
                          : std::nullopt);
    unfold::save_json_file(sco_out, out);
    return 0;
  }

  if (swp->parsed()) {
    unfold::SweepSpec spec;
    spec.family = swp_family;
    spec.qubit_counts = swp_ns;
    if (spec.qubit_counts.empty()) {
      if (swp_nmax < swp_nmin)
        throw unfold::ValidationError("empty qubit-count range");
      if (swp_nstep < 1)
        throw unfold::ValidationError("range step must be positive");
      for (int n = swp_nmin; n <= swp_nmax; n += swp_nstep)
        spec.qubit_counts.push_back(n);
    }
    spec.shots = swp_shots;
    spec.seeds = swp_seeds;
    spec.methods = swp_methods;
    spec.d = swp_d;
    spec.config.tol = swp_tol;
    spec.config.max_iters = swp_max_iters;
    spec.flip_low = swp_flip_lo;
    spec.flip_high = swp_flip_hi;
    if (swp_flip_fixed >= 0.0)
      spec.fixed_flip = swp_flip_fixed;
    spec.op_options.threads = threads;
    spec.op_options.cache_enabled = !swp_no_cache;

    const auto cells = unfold::run_sweep(spec);
    unfold::save_text_file(swp_out, unfold::sweep_csv(cells));
    Json manifest = make_manifest(command, {}, std::nullopt);
    manifest["rows"] = cells.size();
    unfold::save_json_file(swp_out + ".manifest.json", manifest);
    return 0;
  }

  return 0;
}

} // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const unfold::UnreachableOutcomeError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const unfold::ValidationError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
