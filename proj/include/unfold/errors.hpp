// Copyright (c) 2026 The unfold developers
// SPDX-License-Identifier: Apache-2.0

#ifndef UNFOLD_ERRORS_HPP
#define UNFOLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace unfold {

// Bad or inconsistent user input (malformed files, mismatched sizes,
// out-of-range parameters). CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string &what) : std::runtime_error(what) {}
};

// The noise model assigns zero probability to an outcome that was actually
// observed; the tracked subspace cannot explain the data. CLI exit code 3.
class UnreachableOutcomeError : public std::runtime_error {
public:
  explicit UnreachableOutcomeError(const std::string &what)
      : std::runtime_error(what) {}
};

} // namespace unfold

#endif
