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

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/index.hpp"
#include "qwalk/lattice.hpp"

namespace qwalk {

// `cell_count` consecutive cells starting at `first_cell`, wrapping.
struct Window {
  int first_cell = 0;
  int cell_count = 0;

  std::vector<int> flat_indices(const CellStructure& cs) const {
    return cs.flat_indices(first_cell, cell_count);
  }
  std::vector<int> dims(const CellStructure& cs) const {
    std::vector<int> out;
    for (int c = 0; c < cell_count; ++c) out.push_back(cs.dim(first_cell + c));
    return out;
  }
  int flat_dim(const CellStructure& cs) const {
    int d = 0;
    for (int c = 0; c < cell_count; ++c) d += cs.dim(first_cell + c);
    return d;
  }
  bool operator==(const Window&) const = default;
};

// Where to cut the ring and how far each decoupling window reaches. The
// window around cut c spans cells [c - left_extent + 1, c + right_extent].
struct DecouplingPlan {
  std::vector<int> cuts;
  int left_extent = 0;
  int right_extent = 0;
};

struct VBlock {
  Window window;
  Matrix unitary;
};

// W = V^dag U with V the direct sum of `v_blocks` and U block diagonal on
// `u_block_extents`.
struct DecouplingResult {
  std::vector<VBlock> v_blocks;
  BandedUnitary u;
  std::vector<Window> u_block_extents;
  std::vector<Cut> cuts;

  Matrix v_matrix() const {
    const auto& cs = u.structure();
    Matrix v = Matrix::Identity(cs.total_dim(), cs.total_dim());
    for (const auto& blk : v_blocks) {
      const auto idx = blk.window.flat_indices(cs);
      v(idx, idx) = blk.unitary;
    }
    return v;
  }
};

namespace detail {

inline void require_projector(const Matrix& p, const char* name) {
  if (p.rows() != p.cols()) {
    throw InvalidInput(std::string(name) + " is not square");
  }
  if (max_abs(p - p.adjoint()) > tol::kProjector ||
      max_abs(p * p - p) > tol::kProjector) {
    throw InvalidInput(std::string(name) + " is not an orthogonal projector");
  }
}

// Orthonormal bases of range(p) and its complement, each ordered by
// descending eigenvalue.
inline std::pair<Matrix, Matrix> projector_bases(const Matrix& p) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  const Eigen::Index n = p.rows();
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (es.eigenvalues()(k) > 0.5) ++rank;
  }
  // Eigenvalues come out ascending.
  Matrix range(n, rank);
  Matrix complement(n, n - rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    range.col(k) = es.eigenvectors().col(n - 1 - k);
  }
  for (Eigen::Index k = 0; k < n - rank; ++k) {
    complement.col(k) = es.eigenvectors().col(n - rank - 1 - k);
  }
  return {range, complement};
}

// Unitary polar factor of a square matrix.
inline Matrix polar_unitary(const Matrix& a) {
  if (a.size() == 0) return a;
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// Maps span(from) onto span(to), rotating within the span so the image of
// `from` is as close as possible to `to`.
inline Matrix aligned_map(const Matrix& to, const Matrix& from) {
  if (to.cols() == 0) return Matrix::Zero(to.rows(), to.rows());
  const Matrix omega = polar_unitary(from.adjoint() * to);
  return to * (from * omega).adjoint();
}

}  // namespace detail

// Unitary V with V q V^dag = p for two projectors of equal rank. Among all
// such unitaries this returns the one closest to the identity on each
// eigenspace, so p == q gives V == 1.
inline Matrix projector_intertwiner(const Matrix& p, const Matrix& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw InvalidInput("projectors have different dimensions");
  }
  detail::require_projector(p, "p");
  detail::require_projector(q, "q");
  const auto [p_range, p_comp] = detail::projector_bases(p);
  const auto [q_range, q_comp] = detail::projector_bases(q);
  if (p_range.cols() != q_range.cols()) {
    throw InvalidInput(
        "projector ranks differ (" + std::to_string(p_range.cols()) + " vs " +
        std::to_string(q_range.cols()) + "); the walk has a residual index");
  }
  return detail::aligned_map(p_range, q_range) +
         detail::aligned_map(p_comp, q_comp);
}

// Cuts every 2L cells starting at `anchor`, windows reaching L cells to
// either side.
inline DecouplingPlan periodic_plan(
    const CellStructure& cs, int bandwidth, Cut anchor) {
  const int m = cs.num_cells();
  if (bandwidth < 1) {
    throw PipelineError("decouple", "periodic decoupling needs bandwidth >= 1");
  }
  if (m % (2 * bandwidth) != 0 || m < 4 * bandwidth) {
    throw PipelineError(
        "decouple", "a ring of " + std::to_string(m) +
                        " cells cannot hold disjoint windows of " +
                        std::to_string(2 * bandwidth) + " cells");
  }
  DecouplingPlan plan{{}, bandwidth, bandwidth};
  for (int k = 0; k < m / (2 * bandwidth); ++k) {
    plan.cuts.push_back(cs.wrap(anchor.position + 2 * bandwidth * k));
  }
  std::sort(plan.cuts.begin(), plan.cuts.end());
  return plan;
}

// As many cuts as fit with segments of at least 2L cells, spread evenly.
// Segment lengths differ by at most one when 2L does not divide M.
inline std::optional<DecouplingPlan> balanced_plan(
    const CellStructure& cs, int bandwidth, Cut anchor) {
  const int m = cs.num_cells();
  if (bandwidth < 1) return std::nullopt;
  const int k_cuts = m / (2 * bandwidth);
  if (k_cuts < 2) return std::nullopt;
  DecouplingPlan plan{{}, bandwidth, bandwidth};
  for (int k = 0; k < k_cuts; ++k) {
    plan.cuts.push_back(cs.wrap(anchor.position + (k * m) / k_cuts));
  }
  std::sort(plan.cuts.begin(), plan.cuts.end());
  return plan;
}

namespace detail {

inline std::vector<int> segment_lengths(
    const CellStructure& cs, const std::vector<int>& cuts) {
  std::vector<int> len(cuts.size());
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const int prev = cuts[(k + cuts.size() - 1) % cuts.size()];
    len[k] = cuts.size() == 1 ? cs.num_cells() : cs.wrap(cuts[k] - prev);
  }
  return len;
}

// Smallest uniform window extents for the given cuts, read off the actual
// support of W: every row whose support leaves its own segment must sit in
// the window of the cut it crosses.
inline std::optional<std::pair<int, int>> tight_extents(
    const BandedUnitary& w, const std::vector<int>& cuts) {
  const auto& cs = w.structure();
  const Matrix& m = w.matrix();
  const int k_cuts = static_cast<int>(cuts.size());
  const auto len = segment_lengths(cs, cuts);
  // Segment k holds cells (cuts[k-1], cuts[k]].
  std::vector<int> seg_of(cs.num_cells());
  std::vector<int> pos_in_seg(cs.num_cells());
  for (int k = 0; k < k_cuts; ++k) {
    for (int c = 0; c < len[k]; ++c) {
      const int x = cs.wrap(cuts[k] - len[k] + 1 + c);
      seg_of[x] = k;
      pos_in_seg[x] = c;
    }
  }
  int left = 0;
  int right = 0;
  for (int r = 0; r < cs.total_dim(); ++r) {
    const int x = cs.cell_of(r);
    const int s = seg_of[x];
    const int next = (s + 1) % k_cuts;
    const int prev = (s + k_cuts - 1) % k_cuts;
    bool to_next = false;
    bool to_prev = false;
    for (int c = 0; c < cs.total_dim(); ++c) {
      if (std::abs(m(r, c)) <= tol::kZero) continue;
      const int y = cs.cell_of(c);
      const int t = seg_of[y];
      if (t == s) continue;
      if (ring_displacement(cs, x, y) > 0 && t == next) {
        to_next = true;
      } else if (ring_displacement(cs, x, y) < 0 && t == prev) {
        to_prev = true;
      } else {
        return std::nullopt;
      }
    }
    if (to_next && to_prev) return std::nullopt;
    if (to_next) left = std::max(left, len[s] - pos_in_seg[x]);
    if (to_prev) right = std::max(right, pos_in_seg[x] + 1);
  }
  for (int l : len) {
    if (left + right > l) return std::nullopt;
  }
  return std::make_pair(left, right);
}

}  // namespace detail

// Searches evenly spaced cut sets, most cuts first, for one whose windows
// (sized from the actual support of W) are pairwise disjoint. Among anchors
// for the same number of cuts the narrowest windows win.
inline std::optional<DecouplingPlan> tight_plan(const BandedUnitary& w) {
  const auto& cs = w.structure();
  const int m = cs.num_cells();
  for (int k_cuts = m; k_cuts >= 2; --k_cuts) {
    std::optional<DecouplingPlan> best;
    for (int anchor = 0; anchor < (m + k_cuts - 1) / k_cuts; ++anchor) {
      std::vector<int> cuts;
      for (int k = 0; k < k_cuts; ++k) cuts.push_back(cs.wrap(anchor + (k * m) / k_cuts));
      std::sort(cuts.begin(), cuts.end());
      const auto ext = detail::tight_extents(w, cuts);
      if (!ext) continue;
      if (!best || ext->first + ext->second < best->left_extent + best->right_extent) {
        best = DecouplingPlan{cuts, ext->first, ext->second};
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

// Plan used by the compiler: the periodic 2L layout when the ring admits
// it, otherwise evenly spread 2L-or-longer segments, otherwise windows
// fitted to the walk's actual support.
inline DecouplingPlan choose_decoupling_plan(const BandedUnitary& w) {
  const auto& cs = w.structure();
  const int band = w.bandwidth();
  const Cut anchor{band - 1};
  if (band >= 1 && cs.num_cells() % (2 * band) == 0 &&
      cs.num_cells() >= 4 * band) {
    return periodic_plan(cs, band, anchor);
  }
  if (auto plan = balanced_plan(cs, band, anchor)) return *plan;
  if (auto plan = tight_plan(w)) return *plan;
  throw PipelineError(
      "decouple", "no set of disjoint decoupling windows fits a ring of " +
                      std::to_string(cs.num_cells()) +
                      " cells at interaction length " + std::to_string(band));
}

inline DecouplingResult decouple(const BandedUnitary& w, const DecouplingPlan& plan) {
  const auto& cs = w.structure();
  const int k_cuts = static_cast<int>(plan.cuts.size());
  if (k_cuts < 2) throw PipelineError("decouple", "need at least two cuts");
  for (int k = 0; k < k_cuts; ++k) {
    if (plan.cuts[k] < 0 || plan.cuts[k] >= cs.num_cells() ||
        (k > 0 && plan.cuts[k] <= plan.cuts[k - 1])) {
      throw PipelineError("decouple", "cuts must be increasing cell indices");
    }
  }
  if (plan.left_extent < 0 || plan.right_extent < 0) {
    throw PipelineError("decouple", "negative window extent");
  }
  const auto len = detail::segment_lengths(cs, plan.cuts);
  const int width = plan.left_extent + plan.right_extent;
  if (*std::min_element(len.begin(), len.end()) < width) {
    throw PipelineError("decouple", "decoupling windows overlap");
  }
  const Matrix& wm = w.matrix();
  const int n = cs.total_dim();
  DecouplingResult result{{}, BandedUnitary::identity(cs), {}, {}};
  Matrix v = Matrix::Identity(n, n);
  for (int k = 0; k < k_cuts; ++k) {
    const int c = plan.cuts[k];
    result.cuts.push_back(Cut{c});
    result.u_block_extents.push_back(Window{cs.wrap(c + 1), len[(k + 1) % k_cuts]});
    if (width == 0) continue;
    const Window window{cs.wrap(c - plan.left_extent + 1), width};
    const auto rows = window.flat_indices(cs);
    const auto left_cols = cs.flat_indices(c - len[k] + 1, len[k]);
    const Matrix a = wm(rows, left_cols);
    const Matrix q = a * a.adjoint();
    const int left_dim = Window{window.first_cell, plan.left_extent}.flat_dim(cs);
    Matrix p = Matrix::Zero(q.rows(), q.cols());
    p.topLeftCorner(left_dim, left_dim).setIdentity();
    if (max_abs(q * q - q) > tol::kProjector) {
      throw PipelineError(
          "decouple", "window around cut " + std::to_string(c) +
                          " does not contain the walk's coupling across it");
    }
    Matrix vw;
    try {
      vw = projector_intertwiner(p, q);
    } catch (const InvalidInput& e) {
      throw PipelineError("decouple", "cut " + std::to_string(c) + ": " + e.what());
    }
    v(rows, rows) = vw;
    result.v_blocks.push_back(VBlock{window, std::move(vw)});
  }
  result.u = BandedUnitary(cs, v * wm);
  for (const auto& ext : result.u_block_extents) {
    const auto idx = ext.flat_indices(cs);
    std::vector<bool> inside(n, false);
    for (int i : idx) inside[i] = true;
    const Matrix& um = result.u.matrix();
    for (int i : idx) {
      for (int j = 0; j < n; ++j) {
        if (inside[j]) continue;
        if (std::abs(um(i, j)) > tol::kDecoupling ||
            std::abs(um(j, i)) > tol::kDecoupling) {
          throw PipelineError(
              "decouple", "decoupled operator still couples across cut " +
                              std::to_string(ext.first_cell - 1));
        }
      }
    }
  }
  return result;
}

// Decouples a walk of index 0 with windows of 2L cells centred on cuts
// every 2L cells, the first at `anchor`.
inline DecouplingResult decouple(const BandedUnitary& w, Cut anchor) {
  return decouple(w, periodic_plan(w.structure(), std::max(1, w.bandwidth()), anchor));
}

// Diagonal blocks of an operator that is block diagonal on `extents`.
inline std::vector<Matrix> extract_blocks(
    const BandedUnitary& op, const std::vector<Window>& extents) {
  const auto& cs = op.structure();
  const int n = cs.total_dim();
  const Matrix& m = op.matrix();
  std::vector<Matrix> blocks;
  for (const auto& ext : extents) {
    const auto idx = ext.flat_indices(cs);
    std::vector<bool> inside(n, false);
    for (int i : idx) inside[i] = true;
    for (int i : idx) {
      for (int j = 0; j < n; ++j) {
        if (!inside[j] && (std::abs(m(i, j)) > tol::kDecoupling ||
                           std::abs(m(j, i)) > tol::kDecoupling)) {
          throw PipelineError(
              "extract_blocks", "operator couples the block at cell " +
                                    std::to_string(ext.first_cell) +
                                    " to its outside");
        }
      }
    }
    blocks.push_back(m(idx, idx));
  }
  return blocks;
}

}  // namespace qwalk
