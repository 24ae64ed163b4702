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

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <limits>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/errors.hpp"

namespace qwalk {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// A ring of M cells, cell x carrying a d_x-dimensional Hilbert space. Flat
// indices run cell-major, level-minor, with level 1 first in each cell.
class CellStructure {
 public:
  explicit CellStructure(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) {
      throw InvalidInput("a cell structure needs at least two cells");
    }
    offsets_.reserve(dims_.size() + 1);
    offsets_.push_back(0);
    for (std::size_t x = 0; x < dims_.size(); ++x) {
      if (dims_[x] < 2) {
        throw InvalidInput(
            "cell " + std::to_string(x) + " has dimension " +
            std::to_string(dims_[x]) + "; every cell needs at least 2 levels");
      }
      offsets_.push_back(offsets_.back() + dims_[x]);
    }
    cell_of_.resize(offsets_.back());
    for (std::size_t x = 0; x < dims_.size(); ++x) {
      std::fill(
          cell_of_.begin() + offsets_[x], cell_of_.begin() + offsets_[x + 1],
          static_cast<int>(x));
    }
  }

  static CellStructure uniform(int num_cells, int dim) {
    if (num_cells < 0) throw InvalidInput("negative cell count");
    return CellStructure(std::vector<int>(num_cells, dim));
  }

  int num_cells() const { return static_cast<int>(dims_.size()); }
  int total_dim() const { return offsets_.back(); }
  const std::vector<int>& dims() const { return dims_; }

  // Cell arguments are taken modulo the ring size.
  int wrap(int cell) const {
    const int m = num_cells();
    return ((cell % m) + m) % m;
  }
  int dim(int cell) const { return dims_[wrap(cell)]; }
  int offset(int cell) const { return offsets_[wrap(cell)]; }
  int max_dim() const { return *std::max_element(dims_.begin(), dims_.end()); }

  int ring_distance(int x, int y) const {
    const int d = wrap(x - y);
    return std::min(d, num_cells() - d);
  }

  int cell_of(int flat) const {
    if (flat < 0 || flat >= total_dim()) {
      throw InvalidInput("flat index " + std::to_string(flat) + " out of range");
    }
    return cell_of_[flat];
  }

  // Flat indices of `cell_count` consecutive cells starting at `first_cell`,
  // in window order (wrapping around the ring).
  std::vector<int> flat_indices(int first_cell, int cell_count) const {
    std::vector<int> out;
    for (int c = 0; c < cell_count; ++c) {
      const int x = wrap(first_cell + c);
      for (int i = 0; i < dims_[x]; ++i) out.push_back(offsets_[x] + i);
    }
    return out;
  }

  bool operator==(const CellStructure& other) const {
    return dims_ == other.dims_;
  }

 private:
  std::vector<int> dims_;
  std::vector<int> offsets_;
  std::vector<int> cell_of_;
};

// Displacement from cell `from` to cell `to` with the smallest magnitude on
// the ring; ties (antipodal cells) go to the positive direction.
inline int ring_displacement(const CellStructure& cs, int from, int to) {
  const int m = cs.num_cells();
  const int forward = cs.wrap(to - from);
  return forward <= m - forward ? forward : forward - m;
}

// Basis ket |cell, level>, level counted from 1.
struct SiteLabel {
  int cell = 0;
  int level = 1;
  bool operator==(const SiteLabel&) const = default;
};

inline int flat_index(const CellStructure& cs, SiteLabel s) {
  if (s.cell < 0 || s.cell >= cs.num_cells()) {
    throw InvalidInput("cell " + std::to_string(s.cell) + " out of range");
  }
  if (s.level < 1 || s.level > cs.dim(s.cell)) {
    throw InvalidInput(
        "level " + std::to_string(s.level) + " out of range for cell " +
        std::to_string(s.cell));
  }
  return cs.offset(s.cell) + s.level - 1;
}

inline SiteLabel site_label(const CellStructure& cs, int flat) {
  const int x = cs.cell_of(flat);
  return SiteLabel{x, flat - cs.offset(x) + 1};
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(
      m.adjoint() * m - Matrix::Identity(m.rows(), m.cols()));
}

inline bool is_unitary(const Matrix& m, double tolerance) {
  return unitarity_defect(m) <= tolerance;
}

// Smallest L such that every entry coupling cells at ring distance > L is
// at most tol::kZero in modulus.
inline int measure_bandwidth(const Matrix& w, const CellStructure& cs) {
  if (w.rows() != cs.total_dim() || w.cols() != cs.total_dim()) {
    throw InvalidInput("matrix dimension does not match the cell structure");
  }
  int band = 0;
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    const int y = cs.cell_of(static_cast<int>(c));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      if (std::abs(w(r, c)) > tol::kZero) {
        band = std::max(band, cs.ring_distance(cs.cell_of(static_cast<int>(r)), y));
      }
    }
  }
  return band;
}

// A unitary on the flat space of a cell structure, with its interaction
// length cached at construction.
class BandedUnitary {
 public:
  BandedUnitary(
      CellStructure structure, Matrix matrix,
      double unitarity_tolerance = tol::kUnitarity)
      : structure_(std::move(structure)), matrix_(std::move(matrix)) {
    const int n = structure_.total_dim();
    if (matrix_.rows() != n || matrix_.cols() != n) {
      throw InvalidInput(
          "matrix is " + std::to_string(matrix_.rows()) + "x" +
          std::to_string(matrix_.cols()) + " but the cell structure has total "
          "dimension " + std::to_string(n));
    }
    const double defect = unitarity_defect(matrix_);
    if (!(defect <= unitarity_tolerance)) {
      throw InvalidInput(
          "matrix is not unitary (max |W^dag W - 1| = " +
          std::to_string(defect) + ")");
    }
    bandwidth_ = measure_bandwidth(matrix_, structure_);
  }

  static BandedUnitary identity(const CellStructure& cs) {
    return BandedUnitary(cs, Matrix::Identity(cs.total_dim(), cs.total_dim()));
  }

  const CellStructure& structure() const { return structure_; }
  const Matrix& matrix() const { return matrix_; }
  int bandwidth() const { return bandwidth_; }
  int total_dim() const { return structure_.total_dim(); }

  BandedUnitary adjoint() const {
    return BandedUnitary(structure_, matrix_.adjoint());
  }

 private:
  CellStructure structure_;
  Matrix matrix_;
  int bandwidth_ = 0;
};

inline BandedUnitary operator*(const BandedUnitary& a, const BandedUnitary& b) {
  if (!(a.structure() == b.structure())) {
    throw InvalidInput("cannot multiply operators on different cell structures");
  }
  return BandedUnitary(a.structure(), a.matrix() * b.matrix());
}

// Reinterprets the flat space under a different cell bracketing. Matrix
// entries are copied verbatim; only the cached bandwidth changes.
inline BandedUnitary regroup(const BandedUnitary& w, const CellStructure& target) {
  if (target.total_dim() != w.total_dim()) {
    throw InvalidInput(
        "cannot regroup: total dimension " + std::to_string(w.total_dim()) +
        " differs from target " + std::to_string(target.total_dim()));
  }
  return BandedUnitary(target, w.matrix(), std::numeric_limits<double>::infinity());
}

// Moves level `level` of every cell by `displacement` cells around the ring
// and fixes all other levels. level = 1, displacement = 1 is the conditional
// shift.
inline BandedUnitary build_partial_shift(
    const CellStructure& cs, int level, int displacement) {
  for (int x = 0; x < cs.num_cells(); ++x) {
    if (level < 1 || level > cs.dim(x)) {
      throw InvalidInput(
          "level " + std::to_string(level) + " does not exist in cell " +
          std::to_string(x));
    }
  }
  const int n = cs.total_dim();
  Matrix s = Matrix::Zero(n, n);
  for (int x = 0; x < cs.num_cells(); ++x) {
    for (int i = 1; i <= cs.dim(x); ++i) {
      const int src = cs.offset(x) + i - 1;
      const int dst = i == level ? cs.offset(x + displacement) + i - 1 : src;
      s(dst, src) = 1.0;
    }
  }
  return BandedUnitary(cs, std::move(s));
}

// Block-diagonal operator with coins[x] acting on cell x.
inline BandedUnitary build_coin_layer(
    const CellStructure& cs, const std::vector<Matrix>& coins) {
  if (static_cast<int>(coins.size()) != cs.num_cells()) {
    throw InvalidInput("need exactly one coin per cell");
  }
  const int n = cs.total_dim();
  Matrix c = Matrix::Zero(n, n);
  for (int x = 0; x < cs.num_cells(); ++x) {
    const int d = cs.dim(x);
    if (coins[x].rows() != d || coins[x].cols() != d) {
      throw InvalidInput("coin for cell " + std::to_string(x) + " has wrong size");
    }
    c.block(cs.offset(x), cs.offset(x), d, d) = coins[x];
  }
  return BandedUnitary(cs, std::move(c));
}

inline Matrix grover_coin(int dim = 3) {
  Matrix g = Matrix::Constant(dim, dim, Complex(2.0 / dim, 0.0));
  g -= Matrix::Identity(dim, dim);
  return g;
}

// W = S_1 S_3^dag C on a ring of qutrits, with the same coin in every cell.
inline BandedUnitary build_three_state_walk(int qutrit_cells, const Matrix& coin) {
  if (coin.rows() != 3 || coin.cols() != 3) {
    throw InvalidInput("the three-state walk needs a 3x3 coin");
  }
  if (!is_unitary(coin, tol::kUnitarity)) {
    throw InvalidInput("coin is not unitary");
  }
  const auto cs = CellStructure::uniform(qutrit_cells, 3);
  const auto coins = build_coin_layer(cs, std::vector<Matrix>(qutrit_cells, coin));
  return build_partial_shift(cs, 1, 1) * build_partial_shift(cs, 3, -1) * coins;
}

// Haar-distributed unitary from the QR decomposition of a complex Ginibre
// matrix, with R's diagonal phases folded back into Q.
inline Matrix haar_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) g(r, c) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix& rr = qr.matrixQR();
  for (int k = 0; k < dim; ++k) {
    const double mod = std::abs(rr(k, k));
    if (mod > 0) q.col(k) *= rr(k, k) / mod;
  }
  return q;
}

// Random walk S^net_shift * B, where B is a product of `bandwidth` brickwork
// units. Each unit is a Haar coin layer followed by a layer of Haar unitaries
// on the straddling subspaces {levels 2..d_x of cell x} + {level 1 of cell
// x+1}, so B has interaction length at most `bandwidth` and vanishing index.
inline BandedUnitary random_banded_unitary(
    const CellStructure& cs, int bandwidth, int net_shift, std::uint64_t seed) {
  if (bandwidth < 1) throw InvalidInput("target bandwidth must be at least 1");
  if (cs.num_cells() < 4) {
    throw InvalidInput("random walks need a ring of at least 4 cells");
  }
  std::mt19937_64 rng(seed);
  const int n = cs.total_dim();
  auto random_coins = [&]() {
    Matrix c = Matrix::Zero(n, n);
    for (int x = 0; x < cs.num_cells(); ++x) {
      c.block(cs.offset(x), cs.offset(x), cs.dim(x), cs.dim(x)) =
          haar_unitary(cs.dim(x), rng);
    }
    return c;
  };
  auto random_straddle = [&]() {
    Matrix s = Matrix::Zero(n, n);
    for (int x = 0; x < cs.num_cells(); ++x) {
      std::vector<int> idx;
      for (int i = 1; i < cs.dim(x); ++i) idx.push_back(cs.offset(x) + i);
      idx.push_back(cs.offset(x + 1));
      const Matrix u = haar_unitary(static_cast<int>(idx.size()), rng);
      for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) s(idx[a], idx[b]) = u(a, b);
      }
    }
    return s;
  };
  Matrix b = random_coins();
  for (int layer = 0; layer < bandwidth; ++layer) {
    b = random_coins() * random_straddle() * b;
  }
  const Matrix w = build_partial_shift(cs, 1, net_shift).matrix() * b;
  return BandedUnitary(cs, w);
}

}  // namespace qwalk
