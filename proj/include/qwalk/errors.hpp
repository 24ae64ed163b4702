// Copyright 2026 The qwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qwalk {

// Malformed or out-of-contract input: bad dimensions, non-unitary matrices,
// out-of-range labels, unparsable files.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// A compilation stage could not complete on otherwise well-formed input.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string step, const std::string& what)
      : std::runtime_error(step + ": " + what), step_(std::move(step)) {}

  const std::string& step() const { return step_; }

 private:
  std::string step_;
};

namespace tol {
// Matrix entries at or below this modulus count as structural zeros.
inline constexpr double kZero = 1e-12;
inline constexpr double kUnitarity = 1e-10;
inline constexpr double kCoreUnitarity = 1e-12;
// Maximum distance from the nearest integer accepted for an index flow.
inline constexpr double kIndexRounding = 1e-6;
inline constexpr double kProjector = 1e-10;
inline constexpr double kDecoupling = 1e-10;
// Coins this close to the identity are dropped by the peephole pass.
inline constexpr double kIdentityCoin = 1e-13;
}  // namespace tol

}  // namespace qwalk
