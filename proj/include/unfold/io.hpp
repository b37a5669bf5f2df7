// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_IO_HPP
#define UNFOLD_IO_HPP

#include <json.hpp>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "unfold/counts.hpp"
#include "unfold/metrics.hpp"
#include "unfold/response.hpp"
#include "unfold/unfolding.hpp"

namespace unfold {

inline constexpr const char kToolVersion[] = "0.1.0";

/// Entries of a written distribution smaller than this (in magnitude) are
/// dropped.
inline constexpr double kOutputFloor = 1e-12;

using Json = nlohmann::json;

/// How the characters of a counts-file key map to qubits. Internally qubit 0
/// is always the leftmost character; q0_right inputs are reversed on load.
enum class BitOrder { q0_left, q0_right };
BitOrder bit_order_from_name(const std::string &name);

std::string stop_norm_name(StopNorm n);
StopNorm stop_norm_from_name(const std::string &name);
std::string init_kind_name(InitKind k);
InitKind init_kind_from_name(const std::string &name);

Json load_json_file(const std::string &path);
void save_json_file(const std::string &path, const Json &j);
void save_text_file(const std::string &path, const std::string &text);

/// FNV-1a over the raw bytes, as "fnv1a64:<16 hex digits>".
std::string fnv1a64_hex(std::string_view bytes);
std::string file_digest(const std::string &path);

/// Counts file: {"n": 3, "shots": 32000, "counts": {"000": 12345, ...}}.
CountsTable counts_from_json(const Json &j,
                             BitOrder order = BitOrder::q0_left);
Json counts_to_json(const CountsTable &counts);

/// Calibration file: {"n": 3, "responses": [[[m00,m01],[m10,m11]], ...]}
/// with responses[k][i][j] = P(measured i | prepared j) for qubit k.
/// Columns must sum to 1 within 1e-6 or the file is rejected; accepted
/// columns are renormalized exactly.
TensorResponse calibration_from_json(const Json &j);
Json calibration_to_json(const TensorResponse &r);

/// Contents of a mitigation result file.
struct ResultData {
  std::string method;
  int n = 0;
  int d = 0;
  int iterations = 0;
  bool converged = false;
  double final_delta = 0.0;
  bool quasi = false;   // inversion output: entries may be negative
  SparseWeights theta;
  std::vector<double> log_likelihood;
  // settings echoed so scoring can replay the run
  double tol = 0.0;
  int max_iters = 0;
  std::string norm = "l1";
  std::string init = "uniform";
};

/// Non-finite log-likelihood values are serialized as the string "-inf".
Json result_to_json(const ResultData &r, double floor = kOutputFloor);
ResultData result_from_json(const Json &j);

/// Sparse distribution file: {"n": 2, "values": {"00": 0.5, ...}}.
std::vector<std::pair<BitString, double>> sparse_from_json(const Json &j,
                                                           int &n_out);
Json sparse_to_json(int n, const SparseWeights &values, double floor = 0.0);

/// Prior file: {"alpha": {"000": 3.0, ...}}; tracked bitstrings not listed
/// get concentration 1. Entries outside the tracked subspace are rejected.
DirichletPrior prior_from_json(const Json &j, SubspacePtr tracked);

/// Worker cap from UNFOLD_MEM_THREADS (default 1 when unset).
int env_thread_cap();

} // namespace unfold

#endif
