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

#include <limits>

#include "oracles.hpp"
#include "qwalk/index.hpp"
#include "qwalk/protocol_vm.hpp"

using namespace qwalk;

TEST_CASE("evaluating small protocols", "[protocol_vm]") {
  const CellStructure cs({2, 3, 2});
  CHECK(max_abs(eval_protocol_matrix(Protocol{}, cs) - Matrix::Identity(7, 7)) == 0.0);
  const auto s = eval_protocol(Protocol{{Shift{1}}}, cs);
  CHECK(max_abs(s.matrix() - testing::dense_shift(cs, 1)) == 0.0);
  CHECK(s.bandwidth() == 1);

  CoinLayer bad;
  bad.coins.emplace(1, Matrix::Identity(2, 2));
  CHECK_THROWS_AS(eval_protocol(Protocol{{bad}}, cs), InvalidInput);
  CoinLayer outside;
  outside.coins.emplace(3, Matrix::Identity(2, 2));
  CHECK_THROWS_AS(eval_protocol(Protocol{{outside}}, cs), InvalidInput);
}

TEST_CASE("evaluation matches the dense oracle", "[protocol_vm]") {
  std::mt19937_64 rng(31);
  for (const auto& dims : std::vector<std::vector<int>>{{2, 2, 2, 2, 2}, {2, 3, 4, 3}, {4, 4, 2}}) {
    const CellStructure cs(dims);
    for (int trial = 0; trial < 10; ++trial) {
      const auto p = testing::random_protocol(cs, 4, 3, rng);
      CHECK(max_abs(eval_protocol_matrix(p, cs) - testing::dense_protocol(p, cs)) < 1e-12);
    }
  }
}

TEST_CASE("state evolution agrees with the matrix", "[protocol_vm]") {
  const CellStructure cs({3, 2, 2, 3, 2});
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testing::random_protocol(cs, 3, 2, rng);
    const Vector psi = testing::random_state(cs.total_dim(), rng);
    const Matrix m = eval_protocol_matrix(p, cs);
    CHECK((apply_protocol(p, cs, psi) - m * psi).norm() < 1e-12);
    CHECK((apply_protocol(p, cs, psi, 3) - m * m * m * psi).norm() < 1e-12);
    CHECK((apply_protocol(p, cs, psi, 0) - psi).norm() == 0.0);
  }
  const auto p = testing::random_protocol(cs, 3, 2, rng);
  Vector psi = testing::random_state(cs.total_dim(), rng);
  psi = apply_protocol(p, cs, psi, 1000);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-10);

  CHECK_THROWS_AS(apply_protocol(p, cs, Vector::Zero(3)), InvalidInput);
  CHECK_THROWS_AS(apply_protocol(p, cs, 2.0 * psi / psi.norm()), InvalidInput);
  CHECK_THROWS_AS(apply_protocol(p, cs, psi / psi.norm(), -1), InvalidInput);
}

TEST_CASE("verification reports", "[protocol_vm]") {
  const auto cs = CellStructure::uniform(5, 2);
  const auto s = shift_operator(cs);
  const auto ok = verify(Protocol{{Shift{1}}}, s);
  CHECK(ok.passed);
  CHECK(ok.frobenius_distance == 0.0);
  CHECK(ok.reconstructed_bandwidth == 1);
  CHECK(ok.tolerance == Catch::Approx(1e-9 * std::sqrt(10.0)));

  const auto bad = verify(Protocol{}, s);
  CHECK_FALSE(bad.passed);
  CHECK(bad.max_abs_deviation == Catch::Approx(1.0));
  CHECK(verify(Protocol{}, s, std::numeric_limits<double>::infinity()).passed);
}

TEST_CASE("index of an evaluated protocol is its net shift", "[protocol_vm]") {
  const CellStructure cs({2, 3, 2, 2, 3, 2, 2, 3, 2, 2, 3, 2});
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = testing::random_protocol(cs, 2, 1, rng);
    int total = 0;
    for (const auto& ins : p.items) {
      if (const auto* sh = std::get_if<Shift>(&ins)) total += sh->power;
    }
    CHECK(index(eval_protocol(p, cs)) == total);
  }
}
