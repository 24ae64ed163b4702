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
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

// Identity except for the 2x2 unitary `core` on flat indices n < m:
// (n,n) = a, (n,m) = b, (m,n) = c, (m,m) = d.
struct ElementaryUnitary {
  int n = 0;
  int m = 1;
  Eigen::Matrix2cd core = Eigen::Matrix2cd::Identity();
};

// u = factors[0] * factors[1] * ... * factors[K-1] * diag(diagonal), with
// the diagonal occupying flat indices [offset, offset + diagonal.size()).
struct TwoLevelFactorization {
  std::vector<ElementaryUnitary> factors;
  std::vector<Complex> diagonal;
  int offset = 0;
};

inline Matrix embed_elementary(const ElementaryUnitary& e, int total_dim) {
  if (e.n < 0 || e.n >= e.m || e.m >= total_dim) {
    throw InvalidInput(
        "elementary unitary indices (" + std::to_string(e.n) + ", " +
        std::to_string(e.m) + ") invalid for dimension " +
        std::to_string(total_dim));
  }
  Matrix out = Matrix::Identity(total_dim, total_dim);
  out(e.n, e.n) = e.core(0, 0);
  out(e.n, e.m) = e.core(0, 1);
  out(e.m, e.n) = e.core(1, 0);
  out(e.m, e.m) = e.core(1, 1);
  return out;
}

// Right-multiplies `acc` by the embedding of `e` in place.
inline void apply_elementary_right(Matrix& acc, const ElementaryUnitary& e) {
  const Vector cn = acc.col(e.n);
  const Vector cm = acc.col(e.m);
  acc.col(e.n) = cn * e.core(0, 0) + cm * e.core(1, 0);
  acc.col(e.m) = cn * e.core(0, 1) + cm * e.core(1, 1);
}

inline Matrix evaluate_factorization(const TwoLevelFactorization& f, int total_dim) {
  Matrix acc = Matrix::Identity(total_dim, total_dim);
  for (const auto& e : f.factors) {
    if (e.n < 0 || e.n >= e.m || e.m >= total_dim) {
      throw InvalidInput("factor index out of range");
    }
    apply_elementary_right(acc, e);
  }
  if (f.offset < 0 || f.offset + static_cast<int>(f.diagonal.size()) > total_dim) {
    throw InvalidInput("diagonal does not fit the target dimension");
  }
  for (std::size_t k = 0; k < f.diagonal.size(); ++k) {
    acc.col(f.offset + static_cast<int>(k)) *= f.diagonal[k];
  }
  return acc;
}

// Column-by-column Givens elimination. Column n is cleared below the
// diagonal by rotations on rows (n, m), m = n+1, ..., D-1, each chosen to
// keep the pivot's phase so a vanishing entry needs no rotation at all. The
// adjoint rotations in elimination order are the factors; what remains is
// a diagonal of phases. Each phase is then folded into the last factor that
// touches its index, so only indices untouched by any factor keep an
// explicit diagonal entry.
inline TwoLevelFactorization decompose_block(const Matrix& u, int flat_offset = 0) {
  const int d = static_cast<int>(u.rows());
  if (u.cols() != d || d < 1) throw InvalidInput("block must be square and non-empty");
  if (!is_unitary(u, tol::kUnitarity)) {
    throw InvalidInput(
        "block is not unitary (defect " + std::to_string(unitarity_defect(u)) + ")");
  }
  Matrix r = u;
  TwoLevelFactorization out;
  out.offset = flat_offset;
  for (int n = 0; n + 1 < d; ++n) {
    for (int m = n + 1; m < d; ++m) {
      const Complex a = r(n, n);
      const Complex b = r(m, n);
      if (b == Complex(0.0)) continue;
      const double abs_a = std::abs(a);
      const double norm = std::hypot(abs_a, std::abs(b));
      const Complex phase = abs_a > 0 ? a / abs_a : Complex(1.0);
      Eigen::Matrix2cd g;
      g << abs_a / norm, phase * std::conj(b) / norm,
          -b * std::conj(phase) / norm, abs_a / norm;
      const Eigen::RowVectorXcd rn = r.row(n);
      const Eigen::RowVectorXcd rm = r.row(m);
      r.row(n) = g(0, 0) * rn + g(0, 1) * rm;
      r.row(m) = g(1, 0) * rn + g(1, 1) * rm;
      const Eigen::Matrix2cd core = g.adjoint();
      if ((core - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() <= tol::kZero) {
        continue;
      }
      out.factors.push_back(ElementaryUnitary{n, m, core});
    }
  }
  out.diagonal.resize(d);
  for (int k = 0; k < d; ++k) out.diagonal[k] = r(k, k) / std::abs(r(k, k));
  for (int k = 0; k < d; ++k) {
    for (auto it = out.factors.rbegin(); it != out.factors.rend(); ++it) {
      if (it->n == k) {
        it->core.col(0) *= out.diagonal[k];
      } else if (it->m == k) {
        it->core.col(1) *= out.diagonal[k];
      } else {
        continue;
      }
      out.diagonal[k] = 1.0;
      break;
    }
  }
  for (auto& e : out.factors) {
    e.n += flat_offset;
    e.m += flat_offset;
  }
  return out;
}

}  // namespace qwalk
