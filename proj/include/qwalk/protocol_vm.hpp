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

#include <cmath>
#include <limits>
#include <string>
#include <variant>

#include "qwalk/protocol.hpp"

namespace qwalk {

namespace detail {

// Left-multiplies the rows of `target` (a matrix or a column vector) by one
// instruction.
template <typename Derived>
void apply_instruction(
    const Instruction& ins, const CellStructure& cs,
    Eigen::MatrixBase<Derived>& target) {
  if (const auto* sh = std::get_if<Shift>(&ins)) {
    const int m = cs.num_cells();
    const int power = ((sh->power % m) + m) % m;
    if (power == 0) return;
    using Row = Eigen::Matrix<Complex, 1, Eigen::Dynamic>;
    std::vector<Row> level_one(m);
    for (int x = 0; x < m; ++x) level_one[x] = target.row(cs.offset(x));
    for (int x = 0; x < m; ++x) target.row(cs.offset(x + power)) = level_one[x];
    return;
  }
  for (const auto& [cell, coin] : std::get<CoinLayer>(ins).coins) {
    const int d = cs.dim(cell);
    auto rows = target.middleRows(cs.offset(cell), d);
    rows = (coin * rows).eval();
  }
}

inline void validate_protocol(const Protocol& p, const CellStructure& cs) {
  for (const auto& ins : p.items) {
    if (const auto* layer = std::get_if<CoinLayer>(&ins)) validate_coin_layer(*layer, cs);
  }
}

}  // namespace detail

inline Matrix eval_protocol_matrix(const Protocol& p, const CellStructure& cs) {
  detail::validate_protocol(p, cs);
  Matrix acc = Matrix::Identity(cs.total_dim(), cs.total_dim());
  for (auto it = p.items.rbegin(); it != p.items.rend(); ++it) {
    detail::apply_instruction(*it, cs, acc);
  }
  return acc;
}

inline BandedUnitary eval_protocol(const Protocol& p, const CellStructure& cs) {
  return BandedUnitary(cs, eval_protocol_matrix(p, cs));
}

// Runs the protocol `steps` times on a state without forming its matrix.
inline Vector apply_protocol(
    const Protocol& p, const CellStructure& cs, Vector state, int steps = 1) {
  if (state.size() != cs.total_dim()) {
    throw InvalidInput("state dimension does not match the cell structure");
  }
  if (std::abs(state.norm() - 1.0) > 1e-12) {
    throw InvalidInput("state is not normalized");
  }
  if (steps < 0) throw InvalidInput("negative step count");
  detail::validate_protocol(p, cs);
  for (int t = 0; t < steps; ++t) {
    for (auto it = p.items.rbegin(); it != p.items.rend(); ++it) {
      detail::apply_instruction(*it, cs, state);
    }
  }
  return state;
}

inline double default_tolerance(const CellStructure& cs) {
  return 1e-9 * std::sqrt(static_cast<double>(cs.total_dim()));
}

struct VerificationReport {
  double max_abs_deviation = 0.0;
  double frobenius_distance = 0.0;
  int reconstructed_bandwidth = 0;
  double tolerance = 0.0;
  bool passed = false;
};

inline VerificationReport verify(
    const Protocol& p, const BandedUnitary& reference, double tolerance) {
  const auto& cs = reference.structure();
  const Matrix rebuilt = eval_protocol_matrix(p, cs);
  const Matrix diff = rebuilt - reference.matrix();
  VerificationReport r;
  r.max_abs_deviation = max_abs(diff);
  r.frobenius_distance = diff.norm();
  r.reconstructed_bandwidth = measure_bandwidth(rebuilt, cs);
  r.tolerance = tolerance;
  r.passed = r.frobenius_distance <= tolerance;
  return r;
}

inline VerificationReport verify(const Protocol& p, const BandedUnitary& reference) {
  return verify(p, reference, default_tolerance(reference.structure()));
}

}  // namespace qwalk
