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
#include <string>
#include <utility>

#include "qwalk/lattice.hpp"

namespace qwalk {

// The cut between cell `position` and cell `position + 1`.
struct Cut {
  int position = 0;
  bool operator==(const Cut&) const = default;
};

// Conditional shift: |x,1> -> |x+1,1>, all other levels fixed.
inline BandedUnitary shift_operator(const CellStructure& cs) {
  return build_partial_shift(cs, 1, 1);
}

inline BandedUnitary shift_power(const CellStructure& cs, int power) {
  return build_partial_shift(cs, 1, power);
}

// Net flow of probability weight to the right across `cut`. Sums, over
// pairs x in (c-L, c], y in (c, c+L] with y - x <= L, the difference
// |<y,j|W|x,i>|^2 - |<x,i|W|y,j>|^2. For a walk whose band fits the ring
// this is an integer and does not depend on the cut.
inline double index_flow(const BandedUnitary& w, Cut cut) {
  const auto& cs = w.structure();
  const int band = w.bandwidth();
  if (2 * band + 1 > cs.num_cells()) {
    throw PipelineError(
        "index", "interaction length " + std::to_string(band) +
                     " is too long for a ring of " +
                     std::to_string(cs.num_cells()) + " cells");
  }
  const Matrix& m = w.matrix();
  const int c = cs.wrap(cut.position);
  double flow = 0.0;
  for (int dx = 0; dx < band; ++dx) {
    const int x = cs.wrap(c - dx);
    for (int dy = 1; dx + dy <= band; ++dy) {
      const int y = cs.wrap(c + dy);
      const int ox = cs.offset(x);
      const int oy = cs.offset(y);
      for (int i = 0; i < cs.dim(x); ++i) {
        for (int j = 0; j < cs.dim(y); ++j) {
          flow += std::norm(m(oy + j, ox + i)) - std::norm(m(ox + i, oy + j));
        }
      }
    }
  }
  return flow;
}

inline int index(const BandedUnitary& w, Cut cut = {}) {
  const double flow = index_flow(w, cut);
  const double rounded = std::round(flow);
  if (!(std::abs(flow - rounded) <= tol::kIndexRounding)) {
    throw PipelineError(
        "index", "flow " + std::to_string(flow) + " across cut " +
                     std::to_string(cut.position) + " is not an integer");
  }
  return static_cast<int>(rounded);
}

struct NormalizedWalk {
  int net_shift = 0;
  BandedUnitary walk;  // S^{-net_shift} W, index 0
};

inline NormalizedWalk normalize_index(const BandedUnitary& w) {
  const int n = index(w);
  if (n == 0) return {0, w};
  return {n, shift_power(w.structure(), -n) * w};
}

}  // namespace qwalk
