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

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/decoupler.hpp"
#include "qwalk/index.hpp"
#include "qwalk/protocol.hpp"
#include "qwalk/two_level.hpp"

namespace qwalk {

namespace detail {

// Permutation coin on a d-level cell exchanging levels a and b (0-based).
inline Matrix transposition(int d, int a, int b) {
  Matrix t = Matrix::Identity(d, d);
  if (a != b) {
    t(a, a) = t(b, b) = 0.0;
    t(a, b) = t(b, a) = 1.0;
  }
  return t;
}

// 2x2 core placed on levels (i, j) of a d-level cell.
inline Matrix embed_core(int d, int i, int j, const Eigen::Matrix2cd& core) {
  Matrix c = Matrix::Identity(d, d);
  c(i, i) = core(0, 0);
  c(i, j) = core(0, 1);
  c(j, i) = core(1, 0);
  c(j, j) = core(1, 1);
  return c;
}

// One two-level unitary to be realized: core rows/columns refer to
// (cell x, level i) and (cell y, level j), levels 0-based.
struct Placement {
  int x = 0;
  int i = 0;
  int y = 0;
  int j = 0;
  Eigen::Matrix2cd core;
};

// Realizes all placements at once. Every placement must share the same
// displacement k = y - x and touch cells no other placement touches.
//   k == 0: a single coin layer.
//   k != 0: [C^dag, S^-k, C_M, S^k, C], where C moves (x,i) to (x,1) and
//           (y,j) to (y,2), and C_M carries the core on levels 1, 2 of y.
inline Protocol realize_placements(
    const CellStructure& cs, int k, const std::vector<Placement>& placements) {
  std::set<int> used;
  auto claim = [&](int cell) {
    if (!used.insert(cell).second) {
      throw PipelineError(
          "compile_class", "two blocks claim cell " + std::to_string(cell) +
                               " in the same coin layer");
    }
  };
  if (k == 0) {
    CoinLayer layer;
    for (const auto& pl : placements) {
      claim(pl.x);
      layer.coins.emplace(pl.x, embed_core(cs.dim(pl.x), pl.i, pl.j, pl.core));
    }
    return Protocol{{layer}};
  }
  CoinLayer swap;
  CoinLayer swap_back;
  CoinLayer inner;
  for (const auto& pl : placements) {
    claim(pl.x);
    claim(pl.y);
    const Matrix cx = transposition(cs.dim(pl.x), pl.i, 0);
    const Matrix cy = transposition(cs.dim(pl.y), pl.j, 1);
    if (pl.i != 0) {
      swap.coins.emplace(pl.x, cx);
      swap_back.coins.emplace(pl.x, cx.adjoint());
    }
    if (pl.j != 1) {
      swap.coins.emplace(pl.y, cy);
      swap_back.coins.emplace(pl.y, cy.adjoint());
    }
    inner.coins.emplace(pl.y, embed_core(cs.dim(pl.y), 0, 1, pl.core));
  }
  return Protocol{{swap_back, Shift{-k}, inner, Shift{k}, swap}};
}

}  // namespace detail

// Shift-coin fragment evaluating exactly to embed_elementary(e).
inline Protocol compile_elementary(const ElementaryUnitary& e, const CellStructure& cs) {
  if (e.n == e.m) throw InvalidInput("elementary unitary needs two distinct indices");
  const SiteLabel a = site_label(cs, e.n);
  const SiteLabel b = site_label(cs, e.m);
  const int k = a.cell == b.cell ? 0 : ring_displacement(cs, a.cell, b.cell);
  return detail::realize_placements(
      cs, k, {{a.cell, a.level - 1, b.cell, b.level - 1, e.core}});
}

// A decoupled block together with its factorization in window-local flat
// indices (offset 0).
struct BlockMember {
  Window window;
  TwoLevelFactorization factorization;
};

// Blocks whose windows carry the same sequence of cell dimensions.
struct ConfigClass {
  std::vector<int> signature;
  std::vector<BlockMember> members;
};

inline std::vector<ConfigClass> group_by_configuration(
    const std::vector<BlockMember>& blocks, const CellStructure& cs) {
  std::vector<int> owner(cs.num_cells(), -1);
  std::map<std::vector<int>, ConfigClass> classes;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& w = blocks[b].window;
    if (w.cell_count > cs.num_cells()) {
      throw InvalidInput("block window longer than the ring");
    }
    for (int c = 0; c < w.cell_count; ++c) {
      int& o = owner[cs.wrap(w.first_cell + c)];
      if (o != -1) {
        throw InvalidInput(
            "blocks " + std::to_string(o) + " and " + std::to_string(b) +
            " overlap at cell " + std::to_string(cs.wrap(w.first_cell + c)));
      }
      o = static_cast<int>(b);
    }
    auto sig = w.dims(cs);
    auto& cls = classes[sig];
    cls.signature = std::move(sig);
    cls.members.push_back(blocks[b]);
  }
  std::vector<ConfigClass> out;
  for (auto& [sig, cls] : classes) out.push_back(std::move(cls));
  return out;
}

// Compiles all members of a class on one shift skeleton. Each member's
// factor list is a subsequence of the canonical order (0,1), (0,2), ...,
// (1,2), ...; positions a member lacks are identity for it.
inline Protocol compile_class(const ConfigClass& cls, const CellStructure& cs) {
  std::set<std::pair<int, int>> skeleton;
  for (const auto& mem : cls.members) {
    const auto& f = mem.factorization;
    const int dim = mem.window.flat_dim(cs);
    if (mem.window.dims(cs) != cls.signature) {
      throw PipelineError("compile_class", "member does not match the class signature");
    }
    if (f.offset != 0 || static_cast<int>(f.diagonal.size()) != dim) {
      throw PipelineError("compile_class", "factorization is not window-local");
    }
    for (std::size_t r = 0; r < f.factors.size(); ++r) {
      const auto& e = f.factors[r];
      if (e.n < 0 || e.n >= e.m || e.m >= dim) {
        throw PipelineError("compile_class", "factor index outside the block");
      }
      if (r > 0 && std::pair(f.factors[r - 1].n, f.factors[r - 1].m) >=
                       std::pair(e.n, e.m)) {
        throw PipelineError("compile_class", "skeleton mismatch: factors out of canonical order");
      }
      skeleton.emplace(e.n, e.m);
    }
  }

  // Window-local flat index -> (relative cell, 0-based level).
  std::vector<std::pair<int, int>> local_site;
  for (int c = 0; c < static_cast<int>(cls.signature.size()); ++c) {
    for (int lv = 0; lv < cls.signature[c]; ++lv) local_site.emplace_back(c, lv);
  }

  Protocol out;
  std::vector<std::size_t> cursor(cls.members.size(), 0);
  for (const auto& [n, m] : skeleton) {
    std::vector<detail::Placement> placements;
    std::optional<int> k;
    for (std::size_t b = 0; b < cls.members.size(); ++b) {
      const auto& mem = cls.members[b];
      const auto& factors = mem.factorization.factors;
      if (cursor[b] >= factors.size() || factors[cursor[b]].n != n ||
          factors[cursor[b]].m != m) {
        continue;
      }
      const auto& e = factors[cursor[b]++];
      const int x = cs.wrap(mem.window.first_cell + local_site[n].first);
      const int y = cs.wrap(mem.window.first_cell + local_site[m].first);
      const int kb = x == y ? 0 : ring_displacement(cs, x, y);
      if (k && *k != kb) {
        throw PipelineError("compile_class", "members disagree on a shift power");
      }
      k = kb;
      placements.push_back({x, local_site[n].second, y, local_site[m].second, e.core});
    }
    out.append(detail::realize_placements(cs, *k, placements));
  }

  CoinLayer residue;
  for (const auto& mem : cls.members) {
    int l = 0;
    for (int c = 0; c < mem.window.cell_count; ++c) {
      const int d = cls.signature[c];
      Matrix coin = Matrix::Identity(d, d);
      bool trivial = true;
      for (int lv = 0; lv < d; ++lv, ++l) {
        const Complex ph = mem.factorization.diagonal[l];
        coin(lv, lv) = ph;
        if (std::abs(ph - Complex(1.0)) > 0.0) trivial = false;
      }
      if (!trivial) residue.coins.emplace(cs.wrap(mem.window.first_cell + c), coin);
    }
  }
  if (!residue.empty()) out.items.push_back(residue);
  return out;
}

struct CompileOptions {
  bool optimize = true;
  // Overrides the automatic choice of cuts and windows.
  std::optional<DecouplingPlan> plan;
};

// Everything the pipeline produced on the way to the protocol.
struct CompilationTrace {
  int net_shift = 0;
  BandedUnitary normalized;
  DecouplingPlan plan;
  DecouplingResult decoupling;
  std::vector<ConfigClass> v_classes;  // blocks of V^dag
  std::vector<ConfigClass> u_classes;  // blocks of U
  Protocol protocol;

  int max_block_dim() const {
    int d = 0;
    for (const auto* classes : {&v_classes, &u_classes}) {
      for (const auto& cls : *classes) {
        int sum = 0;
        for (int v : cls.signature) sum += v;
        d = std::max(d, sum);
      }
    }
    return d;
  }
  std::size_t num_classes() const { return v_classes.size() + u_classes.size(); }
};

namespace detail {

template <typename F>
auto run_stage(const char* step, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(step, e.what());
  }
}

inline std::vector<BlockMember> factorize_blocks(
    const std::vector<Window>& windows, const std::vector<Matrix>& blocks) {
  std::vector<BlockMember> out;
  for (std::size_t b = 0; b < windows.size(); ++b) {
    out.push_back(BlockMember{windows[b], decompose_block(blocks[b], 0)});
  }
  return out;
}

}  // namespace detail

// Index normalization, periodic decoupling W = S^n V^dag U, two-level
// factorization of every block of V^dag and U, class-wise shift-coin
// compilation, then peephole cleanup.
inline CompilationTrace compile_walk_traced(
    const BandedUnitary& w, const CompileOptions& options = {}) {
  auto normalized = detail::run_stage("normalize_index", [&] { return normalize_index(w); });
  const auto& w0 = normalized.walk;
  const DecouplingPlan plan = detail::run_stage("decouple", [&] {
    return options.plan ? *options.plan : choose_decoupling_plan(w0);
  });
  auto dec = detail::run_stage("decouple", [&] { return decouple(w0, plan); });

  const auto& cs = w.structure();
  std::vector<Window> v_windows;
  std::vector<Matrix> v_dagger;
  for (const auto& blk : dec.v_blocks) {
    v_windows.push_back(blk.window);
    v_dagger.push_back(blk.unitary.adjoint());
  }
  const auto u_blocks = detail::run_stage(
      "extract_blocks", [&] { return extract_blocks(dec.u, dec.u_block_extents); });

  const auto v_members = detail::run_stage(
      "decompose_block", [&] { return detail::factorize_blocks(v_windows, v_dagger); });
  const auto u_members = detail::run_stage(
      "decompose_block", [&] { return detail::factorize_blocks(dec.u_block_extents, u_blocks); });

  auto v_classes = detail::run_stage(
      "group_by_configuration", [&] { return group_by_configuration(v_members, cs); });
  auto u_classes = detail::run_stage(
      "group_by_configuration", [&] { return group_by_configuration(u_members, cs); });

  Protocol protocol;
  if (normalized.net_shift != 0) protocol.items.push_back(Shift{normalized.net_shift});
  detail::run_stage("compile_class", [&] {
    for (const auto& cls : v_classes) protocol.append(compile_class(cls, cs));
    for (const auto& cls : u_classes) protocol.append(compile_class(cls, cs));
    return 0;
  });
  if (options.optimize) {
    protocol = detail::run_stage("optimize", [&] { return optimize(protocol); });
  }
  return CompilationTrace{
      normalized.net_shift, std::move(normalized.walk), plan, std::move(dec),
      std::move(v_classes), std::move(u_classes), std::move(protocol)};
}

inline Protocol compile_walk(const BandedUnitary& w, const CompileOptions& options = {}) {
  return compile_walk_traced(w, options).protocol;
}

}  // namespace qwalk
