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

#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "json.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/protocol.hpp"

// Walk files:     {"dims": [...], "matrix": [[[re, im], ...], ...]}
//                 or {"dims": [...], "sparse": [[row, col, re, im], ...]}
// Protocol files: {"dims": [...], "items": [{"shift": n} |
//                  {"coins": {"<cell>": [[[re, im], ...], ...]}}, ...]}
// Matrices are dense row-major; protocol items are in operator-product
// order, the last item acting first.

namespace qwalk::io {

using nlohmann::json;

namespace detail {

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidInput("complex numbers must be [re, im] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw InvalidInput("matrix must have " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (int r = 0; r < n; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != n) {
      throw InvalidInput("matrix row " + std::to_string(r) + " must have " +
                         std::to_string(n) + " entries");
    }
    for (int c = 0; c < n; ++c) m(r, c) = complex_from_json(j[r][c]);
  }
  return m;
}

inline CellStructure dims_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("dims") || !doc["dims"].is_array()) {
    throw InvalidInput("missing \"dims\" array");
  }
  std::vector<int> dims;
  for (const auto& d : doc["dims"]) {
    if (!d.is_number_integer()) throw InvalidInput("dims must be integers");
    dims.push_back(d.get<int>());
  }
  return CellStructure(std::move(dims));
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace detail

inline json walk_to_json(const BandedUnitary& w) {
  return json{{"dims", w.structure().dims()}, {"matrix", detail::matrix_to_json(w.matrix())}};
}

inline BandedUnitary walk_from_json(const json& doc) {
  const CellStructure cs = detail::dims_from_json(doc);
  const int n = cs.total_dim();
  if (doc.contains("matrix")) {
    return BandedUnitary(cs, detail::matrix_from_json(doc["matrix"], n));
  }
  if (doc.contains("sparse") && doc["sparse"].is_array()) {
    Matrix m = Matrix::Zero(n, n);
    for (const auto& e : doc["sparse"]) {
      if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || !e[2].is_number() || !e[3].is_number()) {
        throw InvalidInput("sparse entries must be [row, col, re, im]");
      }
      const int r = e[0].get<int>();
      const int c = e[1].get<int>();
      if (r < 0 || r >= n || c < 0 || c >= n) {
        throw InvalidInput("sparse entry index out of range");
      }
      m(r, c) = Complex(e[2].get<double>(), e[3].get<double>());
    }
    return BandedUnitary(cs, std::move(m));
  }
  throw InvalidInput("walk file needs a \"matrix\" or \"sparse\" field");
}

inline json protocol_to_json(const Protocol& p, const CellStructure& cs) {
  json items = json::array();
  for (const auto& ins : p.items) {
    if (const auto* sh = std::get_if<Shift>(&ins)) {
      items.push_back(json{{"shift", sh->power}});
    } else {
      json coins = json::object();
      for (const auto& [cell, coin] : std::get<CoinLayer>(ins).coins) {
        coins[std::to_string(cell)] = detail::matrix_to_json(coin);
      }
      items.push_back(json{{"coins", std::move(coins)}});
    }
  }
  return json{{"dims", cs.dims()}, {"items", std::move(items)}};
}

inline std::pair<Protocol, CellStructure> protocol_from_json(const json& doc) {
  CellStructure cs = detail::dims_from_json(doc);
  if (!doc.contains("items") || !doc["items"].is_array()) {
    throw InvalidInput("protocol file needs an \"items\" array");
  }
  Protocol p;
  for (const auto& item : doc["items"]) {
    if (item.is_object() && item.contains("shift")) {
      if (!item["shift"].is_number_integer() || item["shift"].get<int>() == 0) {
        throw InvalidInput("shift powers must be nonzero integers");
      }
      p.items.push_back(Shift{item["shift"].get<int>()});
    } else if (item.is_object() && item.contains("coins") && item["coins"].is_object()) {
      CoinLayer layer;
      for (const auto& [key, value] : item["coins"].items()) {
        int cell = 0;
        std::size_t used = 0;
        try {
          cell = std::stoi(key, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != key.size() || cell < 0 || cell >= cs.num_cells()) {
          throw InvalidInput("bad coin cell key \"" + key + "\"");
        }
        Matrix coin = detail::matrix_from_json(value, cs.dim(cell));
        if (!is_unitary(coin, tol::kUnitarity)) {
          throw InvalidInput("coin on cell " + key + " is not unitary");
        }
        layer.coins.emplace(cell, std::move(coin));
      }
      p.items.push_back(std::move(layer));
    } else {
      throw InvalidInput("protocol items must be {\"shift\": n} or {\"coins\": {...}}");
    }
  }
  return {std::move(p), std::move(cs)};
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << doc.dump(1) << '\n';
}

inline BandedUnitary load_walk(const std::string& path) {
  return walk_from_json(detail::parse(read_file(path)));
}

inline std::pair<Protocol, CellStructure> load_protocol(const std::string& path) {
  return protocol_from_json(detail::parse(read_file(path)));
}

}  // namespace qwalk::io
