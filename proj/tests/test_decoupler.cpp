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

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qwalk/decoupler.hpp"

using namespace qwalk;

namespace {

Matrix coordinate_projector(int dim, std::vector<int> ones) {
  Matrix p = Matrix::Zero(dim, dim);
  for (int i : ones) p(i, i) = 1.0;
  return p;
}

// Largest entry of U coupling a block extent to its outside.
double max_crossing(const DecouplingResult& r) {
  const auto& cs = r.u.structure();
  double worst = 0.0;
  for (const auto& ext : r.u_block_extents) {
    const auto idx = ext.flat_indices(cs);
    std::vector<bool> in(cs.total_dim(), false);
    for (int i : idx) in[i] = true;
    for (int i : idx) {
      for (int j = 0; j < cs.total_dim(); ++j) {
        if (!in[j]) {
          worst = std::max({worst, std::abs(r.u.matrix()(i, j)), std::abs(r.u.matrix()(j, i))});
        }
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("intertwiner maps q onto p", "[decoupler]") {
  const Matrix p = coordinate_projector(2, {0});
  const Matrix q = coordinate_projector(2, {1});
  const Matrix v = projector_intertwiner(p, q);
  CHECK(unitarity_defect(v) < 1e-12);
  CHECK(max_abs(v * q * v.adjoint() - p) < 1e-12);

  const Matrix same = coordinate_projector(5, {1, 3});
  CHECK(max_abs(projector_intertwiner(same, same) - Matrix::Identity(5, 5)) < 1e-12);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3 + trial % 8;
    std::vector<int> ones;
    for (int i = 0; i < dim; i += 2) ones.push_back(i);
    const Matrix pp = coordinate_projector(dim, ones);
    const Matrix g = haar_unitary(dim, rng);
    const Matrix qq = g * pp * g.adjoint();
    const Matrix vv = projector_intertwiner(pp, qq);
    CHECK(unitarity_defect(vv) < 1e-10);
    CHECK(max_abs(vv * qq * vv.adjoint() - pp) < 1e-10);
  }
}

TEST_CASE("intertwiner input checks", "[decoupler]") {
  CHECK_THROWS_AS(
      projector_intertwiner(coordinate_projector(3, {0}), coordinate_projector(3, {0, 1})),
      InvalidInput);
  Matrix not_projector = Matrix::Identity(2, 2) * 0.5;
  CHECK_THROWS_AS(
      projector_intertwiner(coordinate_projector(2, {0}), not_projector), InvalidInput);
  CHECK_THROWS_AS(
      projector_intertwiner(coordinate_projector(2, {0}), coordinate_projector(3, {0})),
      InvalidInput);
}

TEST_CASE("coin layers are already decoupled", "[decoupler]") {
  const auto cs = CellStructure::uniform(6, 3);
  std::mt19937_64 rng(1);
  std::vector<Matrix> coins;
  for (int x = 0; x < 6; ++x) coins.push_back(haar_unitary(3, rng));
  const auto w = build_coin_layer(cs, coins);
  const auto r = decouple(w, Cut{0});
  CHECK(max_crossing(r) <= 1e-10);
  CHECK(max_abs(r.v_matrix().adjoint() * r.u.matrix() - w.matrix()) <= 1e-10);
  for (const auto& blk : r.v_blocks) {
    CHECK(max_abs(blk.unitary - Matrix::Identity(blk.unitary.rows(), blk.unitary.cols())) < 1e-12);
  }
}

TEST_CASE("random walks decouple with windows offset by L", "[decoupler]") {
  for (int band : {1, 2}) {
    for (int m : {8, 12}) {
      if (m % (2 * band) != 0 || m < 4 * band) continue;
      const auto cs = CellStructure::uniform(m, 2);
      const auto w = random_banded_unitary(cs, band, 0, 100 + m + band);
      const auto r = decouple(w, Cut{0});
      CHECK(r.cuts.size() == static_cast<std::size_t>(m / (2 * w.bandwidth())));
      CHECK(max_crossing(r) <= 1e-10);
      CHECK(unitarity_defect(r.v_matrix()) <= 1e-10);
      CHECK(max_abs(r.v_matrix().adjoint() * r.u.matrix() - w.matrix()) <= 1e-10);
      for (std::size_t k = 0; k < r.v_blocks.size(); ++k) {
        CHECK(r.v_blocks[k].window.cell_count == 2 * w.bandwidth());
        CHECK(cs.wrap(r.u_block_extents[k].first_cell - r.v_blocks[k].window.first_cell) ==
              w.bandwidth());
      }
    }
  }
}

TEST_CASE("decoupling the decoupled operator gives identity windows", "[decoupler]") {
  const auto cs = CellStructure({2, 3, 2, 3, 2, 3, 2, 3});
  const auto w = random_banded_unitary(cs, 1, 0, 4242);
  REQUIRE(w.bandwidth() == 1);
  const auto plan = periodic_plan(cs, 1, Cut{3});
  const auto first = decouple(w, plan);
  const auto second = decouple(first.u, plan);
  for (const auto& blk : second.v_blocks) {
    CHECK(max_abs(blk.unitary - Matrix::Identity(blk.unitary.rows(), blk.unitary.cols())) < 1e-10);
  }
  CHECK(max_abs(second.u.matrix() - first.u.matrix()) < 1e-10);
}

TEST_CASE("decoupling rejects residual index and bad rings", "[decoupler]") {
  const auto cs = CellStructure::uniform(8, 2);
  CHECK_THROWS_AS(decouple(shift_operator(cs), Cut{0}), PipelineError);
  const auto w = random_banded_unitary(CellStructure::uniform(6, 2), 2, 0, 5);
  CHECK_THROWS_AS(decouple(w, Cut{0}), PipelineError);
}

TEST_CASE("plan selection falls back for awkward rings", "[decoupler]") {
  // 10 cells at L=2: no periodic layout, two segments of 5.
  const auto w = random_banded_unitary(CellStructure::uniform(10, 2), 2, 0, 9);
  REQUIRE(w.bandwidth() == 2);
  const auto plan = choose_decoupling_plan(w);
  CHECK(plan.cuts.size() == 2);
  CHECK(plan.left_extent == 2);
  const auto r = decouple(w, plan);
  CHECK(max_crossing(r) <= 1e-10);
  CHECK(max_abs(r.v_matrix().adjoint() * r.u.matrix() - w.matrix()) <= 1e-10);

  // Coin layer on an odd ring: one cut per cell, no windows.
  const auto coin = build_coin_layer(CellStructure::uniform(5, 2), std::vector<Matrix>(5, grover_coin(2)));
  const auto cplan = choose_decoupling_plan(coin);
  CHECK(cplan.cuts.size() == 5);
  CHECK(cplan.left_extent + cplan.right_extent == 0);
  CHECK(decouple(coin, cplan).v_blocks.empty());
}

TEST_CASE("three-state walk decouples every two qutrit cells", "[decoupler]") {
  const auto qubits = regroup(build_three_state_walk(4, grover_coin(3)), CellStructure::uniform(6, 2));
  const auto plan = choose_decoupling_plan(qubits);
  CHECK(plan.cuts == std::vector<int>{2, 5});
  CHECK(plan.left_extent == 1);
  CHECK(plan.right_extent == 1);
  const auto r = decouple(qubits, plan);
  CHECK(max_crossing(r) <= 1e-10);
  CHECK(max_abs(r.v_matrix().adjoint() * r.u.matrix() - qubits.matrix()) <= 1e-10);
  // U blocks sit on qubit cells x, x+1, x+2 with x in 3Z.
  REQUIRE(r.u_block_extents.size() == 2);
  CHECK(r.u_block_extents[0] == Window{3, 3});
  CHECK(r.u_block_extents[1] == Window{0, 3});
}

TEST_CASE("extract_blocks", "[decoupler]") {
  const auto cs = CellStructure::uniform(4, 2);
  std::mt19937_64 rng(6);
  Matrix bd = Matrix::Zero(8, 8);
  const Matrix a = haar_unitary(4, rng);
  const Matrix b = haar_unitary(4, rng);
  bd.topLeftCorner(4, 4) = a;
  bd.bottomRightCorner(4, 4) = b;
  const BandedUnitary op(cs, bd);
  const auto blocks = extract_blocks(op, {Window{0, 2}, Window{2, 2}});
  REQUIRE(blocks.size() == 2);
  CHECK(max_abs(blocks[0] - a) == 0.0);
  CHECK(max_abs(blocks[1] - b) == 0.0);

  const auto whole = extract_blocks(op, {Window{0, 4}});
  CHECK(max_abs(whole[0] - bd) == 0.0);

  CHECK_THROWS_AS(extract_blocks(op, {Window{1, 2}}), PipelineError);

  const auto w = random_banded_unitary(CellStructure::uniform(8, 3), 1, 0, 12);
  const auto r = decouple(w, Cut{1});
  for (const auto& blk : extract_blocks(r.u, r.u_block_extents)) {
    CHECK(unitarity_defect(blk) <= 1e-10);
  }
}

TEST_CASE("hand-built swap windows decouple the three-state walk", "[decoupler]") {
  const auto qubits = regroup(build_three_state_walk(4, grover_coin(3)), CellStructure::uniform(6, 2));
  // Window on qubit cells x-1..x+1 for x in {0, 3}; swap window positions
  // 2<->3 and 5<->6.
  Matrix v = Matrix::Identity(12, 12);
  auto swap = [&](int a, int b) {
    v(a, a) = v(b, b) = 0.0;
    v(a, b) = v(b, a) = 1.0;
  };
  swap(11, 0);
  swap(2, 3);
  swap(5, 6);
  swap(8, 9);
  const Matrix u = v * qubits.matrix();
  Matrix expected(3, 3);
  expected << 2, 2, -1, 2, -1, 2, -1, 2, 2;
  expected /= 3.0;
  Matrix block_diag = Matrix::Zero(12, 12);
  for (int b = 0; b < 4; ++b) block_diag.block(3 * b, 3 * b, 3, 3) = expected;
  CHECK(max_abs(u - block_diag) < 1e-12);
}
