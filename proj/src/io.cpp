// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#include "unfold/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "unfold/errors.hpp"

namespace unfold {

namespace {

constexpr double kCalibrationColumnTol = 1e-6;

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw ValidationError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const Json &field(const Json &j, const char *name, const char *what) {
  const auto it = j.find(name);
  if (it == j.end())
    throw ValidationError(std::string(what) + " is missing the '" + name +
                          "' field");
  return *it;
}

std::int64_t nonneg_int(const Json &j, const std::string &what) {
  if (!j.is_number_integer() && !j.is_number_unsigned())
    throw ValidationError(what + " must be an integer");
  const auto v = j.get<std::int64_t>();
  if (v < 0)
    throw ValidationError(what + " must be non-negative");
  return v;
}

std::string maybe_reversed(const std::string &key, BitOrder order) {
  if (order == BitOrder::q0_left)
    return key;
  return std::string(key.rbegin(), key.rend());
}

} // namespace

BitOrder bit_order_from_name(const std::string &name) {
  if (name == "q0-left")
    return BitOrder::q0_left;
  if (name == "q0-right")
    return BitOrder::q0_right;
  throw ValidationError("unknown bit order '" + name +
                        "' (expected q0-left or q0-right)");
}

std::string stop_norm_name(StopNorm n) {
  switch (n) {
  case StopNorm::l1:
    return "l1";
  case StopNorm::l2:
    return "l2";
  case StopNorm::linf:
    return "linf";
  }
  return "?";
}

StopNorm stop_norm_from_name(const std::string &name) {
  if (name == "l1")
    return StopNorm::l1;
  if (name == "l2")
    return StopNorm::l2;
  if (name == "linf")
    return StopNorm::linf;
  throw ValidationError("unknown norm '" + name + "'");
}

std::string init_kind_name(InitKind k) {
  switch (k) {
  case InitKind::uniform:
    return "uniform";
  case InitKind::empirical:
    return "empirical";
  case InitKind::explicit_values:
    return "explicit";
  }
  return "?";
}

InitKind init_kind_from_name(const std::string &name) {
  if (name == "uniform")
    return InitKind::uniform;
  if (name == "empirical")
    return InitKind::empirical;
  if (name == "explicit")
    return InitKind::explicit_values;
  throw ValidationError("unknown initialization '" + name + "'");
}

Json load_json_file(const std::string &path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception &e) {
    throw ValidationError("invalid JSON in '" + path + "': " + e.what());
  }
}

void save_json_file(const std::string &path, const Json &j) {
  save_text_file(path, j.dump(2) + "\n");
}

void save_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw ValidationError("cannot write file '" + path + "'");
  out << text;
  if (!out)
    throw ValidationError("failed while writing '" + path + "'");
}

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string file_digest(const std::string &path) {
  return fnv1a64_hex(read_file(path));
}

CountsTable counts_from_json(const Json &j, BitOrder order) {
  const int n = static_cast<int>(nonneg_int(field(j, "n", "counts file"),
                                            "qubit count"));
  const auto shots = static_cast<std::uint64_t>(
      nonneg_int(field(j, "shots", "counts file"), "shot count"));
  const Json &table = field(j, "counts", "counts file");
  if (!table.is_object())
    throw ValidationError("'counts' must map bitstrings to counts");
  std::vector<CountsTable::Entry> entries;
  entries.reserve(table.size());
  for (const auto &[key, value] : table.items()) {
    if (static_cast<int>(key.size()) != n)
      throw ValidationError("counts key '" + key + "' does not have length " +
                            std::to_string(n));
    entries.emplace_back(
        BitString::from_string(maybe_reversed(key, order)),
        static_cast<std::uint64_t>(
            nonneg_int(value, "count for '" + key + "'")));
  }
  // Zero-count entries are tolerated on input and dropped.
  entries.erase(std::remove_if(entries.begin(), entries.end(),
                               [](const CountsTable::Entry &e) {
                                 return e.second == 0;
                               }),
                entries.end());
  return CountsTable::from_entries(std::move(entries), shots);
}

Json counts_to_json(const CountsTable &counts) {
  Json table = Json::object();
  for (const auto &[bits, c] : counts.entries())
    table[bits.str()] = c;
  return Json{{"n", counts.qubit_count()},
              {"shots", counts.shots()},
              {"counts", std::move(table)}};
}

TensorResponse calibration_from_json(const Json &j) {
  const int n = static_cast<int>(nonneg_int(field(j, "n", "calibration file"),
                                            "qubit count"));
  const Json &responses = field(j, "responses", "calibration file");
  if (!responses.is_array() || static_cast<int>(responses.size()) != n)
    throw ValidationError("'responses' must be an array of n 2x2 matrices");
  std::vector<SingleQubitResponse> factors;
  factors.reserve(responses.size());
  for (const Json &rj : responses) {
    if (!rj.is_array() || rj.size() != 2 || !rj[0].is_array() ||
        !rj[1].is_array() || rj[0].size() != 2 || rj[1].size() != 2)
      throw ValidationError("each response must be a 2x2 matrix");
    Eigen::Matrix2d m;
    for (int i = 0; i < 2; ++i)
      for (int c = 0; c < 2; ++c) {
        const Json &cell = rj[static_cast<std::size_t>(i)]
                             [static_cast<std::size_t>(c)];
        if (!cell.is_number())
          throw ValidationError("response entries must be numbers");
        m(i, c) = cell.get<double>();
        if (!(m(i, c) >= 0.0) || m(i, c) > 1.0)
          throw ValidationError("response entries must lie in [0, 1]");
      }
    for (int c = 0; c < 2; ++c) {
      const double sum = m(0, c) + m(1, c);
      if (std::abs(sum - 1.0) > kCalibrationColumnTol)
        throw ValidationError(
            "calibration columns must sum to 1 within 1e-6");
      m(0, c) /= sum;
      m(1, c) /= sum;
    }
    factors.emplace_back(m);
  }
  return TensorResponse(std::move(factors));
}

Json calibration_to_json(const TensorResponse &r) {
  Json responses = Json::array();
  for (const auto &f : r.factors()) {
    const Eigen::Matrix2d &m = f.matrix();
    responses.push_back(Json::array(
        {Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})}));
  }
  return Json{{"n", r.qubit_count()}, {"responses", std::move(responses)}};
}

Json result_to_json(const ResultData &r, double floor) {
  Json theta = Json::object();
  for (const auto &[bits, v] : r.theta)
    if (std::abs(v) >= floor)
      theta[bits.str()] = v;
  Json ll = Json::array();
  for (const double v : r.log_likelihood) {
    if (std::isfinite(v))
      ll.push_back(v);
    else
      ll.push_back("-inf");
  }
  return Json{{"method", r.method},
              {"n", r.n},
              {"d", r.d},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"final_delta", r.final_delta},
              {"quasi", r.quasi},
              {"theta", std::move(theta)},
              {"log_likelihood", std::move(ll)},
              {"settings",
               Json{{"tol", r.tol},
                    {"max_iters", r.max_iters},
                    {"norm", r.norm},
                    {"init", r.init}}}};
}

ResultData result_from_json(const Json &j) {
  ResultData r;
  r.method = field(j, "method", "result file").get<std::string>();
  r.n = static_cast<int>(nonneg_int(field(j, "n", "result file"),
                                    "qubit count"));
  r.d = static_cast<int>(nonneg_int(field(j, "d", "result file"),
                                    "hamming radius"));
  r.iterations = static_cast<int>(
      nonneg_int(field(j, "iterations", "result file"), "iteration count"));
  r.converged = field(j, "converged", "result file").get<bool>();
  r.final_delta = field(j, "final_delta", "result file").get<double>();
  r.quasi = j.value("quasi", false);
  const Json &theta = field(j, "theta", "result file");
  std::vector<std::pair<BitString, double>> entries;
  for (const auto &[key, value] : theta.items()) {
    if (static_cast<int>(key.size()) != r.n)
      throw ValidationError("theta key '" + key + "' does not have length " +
                            std::to_string(r.n));
    entries.emplace_back(BitString::from_string(key), value.get<double>());
  }
  r.theta = make_sparse(std::move(entries));
  if (const auto it = j.find("log_likelihood"); it != j.end())
    for (const Json &v : *it)
      r.log_likelihood.push_back(
          v.is_string() ? -std::numeric_limits<double>::infinity()
                        : v.get<double>());
  if (const auto it = j.find("settings"); it != j.end()) {
    r.tol = it->value("tol", 0.0);
    r.max_iters = it->value("max_iters", 0);
    r.norm = it->value("norm", "l1");
    r.init = it->value("init", "uniform");
  }
  return r;
}

std::vector<std::pair<BitString, double>> sparse_from_json(const Json &j,
                                                           int &n_out) {
  n_out = static_cast<int>(nonneg_int(field(j, "n", "distribution file"),
                                      "qubit count"));
  const Json &values = field(j, "values", "distribution file");
  if (!values.is_object())
    throw ValidationError("'values' must map bitstrings to probabilities");
  std::vector<std::pair<BitString, double>> out;
  out.reserve(values.size());
  for (const auto &[key, value] : values.items()) {
    if (static_cast<int>(key.size()) != n_out)
      throw ValidationError("key '" + key + "' does not have length " +
                            std::to_string(n_out));
    out.emplace_back(BitString::from_string(key), value.get<double>());
  }
  return out;
}

Json sparse_to_json(int n, const SparseWeights &values, double floor) {
  Json table = Json::object();
  for (const auto &[bits, v] : values)
    if (std::abs(v) >= floor)
      table[bits.str()] = v;
  return Json{{"n", n}, {"values", std::move(table)}};
}

DirichletPrior prior_from_json(const Json &j, SubspacePtr tracked) {
  const Json &alpha = field(j, "alpha", "prior file");
  if (!alpha.is_object())
    throw ValidationError("'alpha' must map bitstrings to concentrations");
  Eigen::VectorXd a =
      Eigen::VectorXd::Ones(static_cast<Eigen::Index>(tracked->size()));
  for (const auto &[key, value] : alpha.items()) {
    if (static_cast<int>(key.size()) != tracked->qubit_count())
      throw ValidationError("prior key '" + key + "' does not have length " +
                            std::to_string(tracked->qubit_count()));
    const BitString bits = BitString::from_string(key);
    const auto idx = tracked->find(bits);
    if (!idx)
      throw ValidationError("prior entry '" + key +
                            "' is outside the tracked subspace");
    a[static_cast<Eigen::Index>(*idx)] = value.get<double>();
  }
  return DirichletPrior(std::move(tracked), std::move(a));
}

int env_thread_cap() {
  const char *raw = std::getenv("UNFOLD_MEM_THREADS");
  if (!raw || !*raw)
    return 1;
  char *end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  if (!end || *end != '\0' || v < 1 || v > 1024)
    throw ValidationError("UNFOLD_MEM_THREADS must be an integer in [1, 1024]");
  return static_cast<int>(v);
}

} // namespace unfold
