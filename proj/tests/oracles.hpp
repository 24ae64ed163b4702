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

// Dense reference constructions used to check the library. Everything here
// is built directly from definitions and shares no code path with the
// protocol evaluator or the compiler.

#include <random>
#include <variant>
#include <vector>

#include "qwalk/qwalk.hpp"

namespace qwalk::testing {

// S^power as an explicit permutation matrix.
inline Matrix dense_shift(const CellStructure& cs, int power) {
  const int n = cs.total_dim();
  const int m = cs.num_cells();
  Matrix s = Matrix::Zero(n, n);
  int flat = 0;
  for (int x = 0; x < m; ++x) {
    for (int i = 0; i < cs.dims()[x]; ++i, ++flat) {
      if (i == 0) {
        int target = (x + power) % m;
        if (target < 0) target += m;
        int target_flat = 0;
        for (int z = 0; z < target; ++z) target_flat += cs.dims()[z];
        s(target_flat, flat) = 1.0;
      } else {
        s(flat, flat) = 1.0;
      }
    }
  }
  return s;
}

inline Matrix dense_coin_layer(const CellStructure& cs, const CoinLayer& layer) {
  const int n = cs.total_dim();
  Matrix c = Matrix::Identity(n, n);
  for (const auto& [cell, coin] : layer.coins) {
    int start = 0;
    for (int z = 0; z < cell; ++z) start += cs.dims()[z];
    c.block(start, start, coin.rows(), coin.cols()) = coin;
  }
  return c;
}

// Product of the dense item matrices in list order.
inline Matrix dense_protocol(const Protocol& p, const CellStructure& cs) {
  Matrix acc = Matrix::Identity(cs.total_dim(), cs.total_dim());
  for (const auto& ins : p.items) {
    if (const auto* sh = std::get_if<Shift>(&ins)) {
      acc = acc * dense_shift(cs, sh->power);
    } else {
      acc = acc * dense_coin_layer(cs, std::get<CoinLayer>(ins));
    }
  }
  return acc;
}

// Two-level unitary written out entry by entry.
inline Matrix dense_two_level(int dim, int n, int m, const Eigen::Matrix2cd& core) {
  Matrix out = Matrix::Identity(dim, dim);
  out(n, n) = core(0, 0);
  out(n, m) = core(0, 1);
  out(m, n) = core(1, 0);
  out(m, m) = core(1, 1);
  return out;
}

// Index as the change of trace of the projector onto a half ring, read off
// near one of its two boundaries: sum over rows z in cells (c-L, c+L] of
// (W P W^dag)_zz - P_zz, with P projecting onto the M/2 cells ending at c.
inline double trace_index(const BandedUnitary& w, int cut) {
  const auto& cs = w.structure();
  const int m = cs.num_cells();
  const int band = std::max(1, w.bandwidth());
  const auto left = cs.flat_indices(cut - m / 2 + 1, m / 2);
  const Matrix a = w.matrix()(Eigen::all, left);
  const Matrix wpw = a * a.adjoint();
  double total = 0.0;
  for (int dx = -band + 1; dx <= band; ++dx) {
    const int x = cs.wrap(cut + dx);
    for (int i = 0; i < cs.dim(x); ++i) {
      const int z = cs.offset(x) + i;
      total += wpw(z, z).real() - (dx <= 0 ? 1.0 : 0.0);
    }
  }
  return total;
}

inline Eigen::Matrix2cd random_core(std::mt19937_64& rng) {
  return haar_unitary(2, rng);
}

// Random protocol of alternating coin layers and shifts of power in
// [-max_power, max_power] \ {0}.
inline Protocol random_protocol(
    const CellStructure& cs, int layers, int max_power, std::mt19937_64& rng) {
  Protocol p;
  std::uniform_int_distribution<int> power(1, max_power);
  std::bernoulli_distribution sign(0.5);
  std::bernoulli_distribution touch(0.7);
  for (int l = 0; l < layers; ++l) {
    CoinLayer layer;
    for (int x = 0; x < cs.num_cells(); ++x) {
      if (touch(rng)) layer.coins.emplace(x, haar_unitary(cs.dim(x), rng));
    }
    p.items.push_back(layer);
    const int k = power(rng);
    p.items.push_back(Shift{sign(rng) ? k : -k});
  }
  return p;
}

inline Vector random_state(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v / v.norm();
}

}  // namespace qwalk::testing
