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

#include <cstdlib>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qwalk/lattice.hpp"

namespace qwalk {

// S^power, power != 0.
struct Shift {
  int power = 0;
};

// Per-cell coins; cells without an entry are left alone.
struct CoinLayer {
  std::map<int, Matrix> coins;

  bool empty() const { return coins.empty(); }
};

using Instruction = std::variant<Shift, CoinLayer>;

// Operator product of `items` in list order: the last item acts on states
// first, so {C0, S^n1, C1} means C0 * S^n1 * C1.
struct Protocol {
  std::vector<Instruction> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }

  void append(const Protocol& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
  }
};

inline bool is_shift(const Instruction& ins) {
  return std::holds_alternative<Shift>(ins);
}

inline void validate_coin_layer(const CoinLayer& layer, const CellStructure& cs) {
  for (const auto& [cell, coin] : layer.coins) {
    if (cell < 0 || cell >= cs.num_cells()) {
      throw InvalidInput("coin on cell " + std::to_string(cell) + " outside the ring");
    }
    if (coin.rows() != cs.dim(cell) || coin.cols() != cs.dim(cell)) {
      throw InvalidInput(
          "coin on cell " + std::to_string(cell) + " is " +
          std::to_string(coin.rows()) + "x" + std::to_string(coin.cols()) +
          " but the cell has dimension " + std::to_string(cs.dim(cell)));
    }
  }
}

// Peephole cleanup to normal form: adjacent shifts are summed, adjacent
// coin layers multiplied cell-wise, and zero shifts, near-identity coins and
// empty layers dropped. A single stack pass suffices because every removal
// exposes at most one new adjacent pair.
inline Protocol optimize(const Protocol& p) {
  auto near_identity = [](const Matrix& c) {
    return max_abs(c - Matrix::Identity(c.rows(), c.cols())) <= tol::kIdentityCoin;
  };
  std::vector<Instruction> out;
  auto push = [&](Instruction ins) {
    if (auto* layer = std::get_if<CoinLayer>(&ins)) {
      std::erase_if(layer->coins, [&](const auto& kv) { return near_identity(kv.second); });
      if (layer->empty()) return;
    } else if (std::get<Shift>(ins).power == 0) {
      return;
    }
    if (out.empty() || is_shift(out.back()) != is_shift(ins)) {
      out.push_back(std::move(ins));
      return;
    }
    if (is_shift(ins)) {
      std::get<Shift>(out.back()).power += std::get<Shift>(ins).power;
      if (std::get<Shift>(out.back()).power == 0) out.pop_back();
      return;
    }
    // Earlier layer is on the left of the product.
    auto& left = std::get<CoinLayer>(out.back()).coins;
    for (auto& [cell, coin] : std::get<CoinLayer>(ins).coins) {
      auto it = left.find(cell);
      if (it == left.end()) {
        left.emplace(cell, std::move(coin));
      } else {
        it->second = (it->second * coin).eval();
        if (near_identity(it->second)) left.erase(it);
      }
    }
    if (left.empty()) out.pop_back();
  };
  for (const auto& ins : p.items) push(ins);
  return Protocol{std::move(out)};
}

struct ProtocolStats {
  std::size_t num_items = 0;
  std::size_t num_shifts = 0;
  long total_shift_distance = 0;
  std::size_t num_coin_layers = 0;
  bool operator==(const ProtocolStats&) const = default;
};

inline ProtocolStats protocol_stats(const Protocol& p) {
  ProtocolStats s;
  s.num_items = p.items.size();
  for (const auto& ins : p.items) {
    if (const auto* sh = std::get_if<Shift>(&ins)) {
      ++s.num_shifts;
      s.total_shift_distance += std::abs(sh->power);
    } else {
      ++s.num_coin_layers;
    }
  }
  return s;
}

}  // namespace qwalk
