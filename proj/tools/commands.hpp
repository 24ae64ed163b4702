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
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "qwalk/io.hpp"
#include "qwalk/qwalk.hpp"

// Subcommand bodies for the qwalk tool. Each returns the process exit code:
// 0 success, 1 verification failure, 2 invalid input, 3 pipeline error.

namespace qwalk::cli {

enum ExitStatus : int {
  kSuccess = 0,
  kVerificationFailed = 1,
  kInvalidInput = 2,
  kPipelineError = 3,
};

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const PipelineError& e) {
    err << "pipeline error in " << e.step() << ": " << e.what() << '\n';
    return kPipelineError;
  } catch (const std::exception& e) {
    err << "pipeline error: " << e.what() << '\n';
    return kPipelineError;
  }
}

inline io::json report_to_json(const VerificationReport& r) {
  return io::json{
      {"max_abs_deviation", r.max_abs_deviation},
      {"frobenius_distance", r.frobenius_distance},
      {"reconstructed_bandwidth", r.reconstructed_bandwidth},
      {"tolerance", r.tolerance},
      {"passed", r.passed}};
}

inline void print_report(std::ostream& out, const VerificationReport& r) {
  out << (r.passed ? "PASSED" : "FAILED") << ": frobenius distance "
      << r.frobenius_distance << " (tolerance " << r.tolerance
      << "), max abs deviation " << r.max_abs_deviation
      << ", reconstructed bandwidth " << r.reconstructed_bandwidth << '\n';
}

inline void print_stats(std::ostream& out, const Protocol& p) {
  const auto s = protocol_stats(p);
  out << "protocol: " << s.num_items << " items, " << s.num_shifts
      << " shifts (total distance " << s.total_shift_distance << "), "
      << s.num_coin_layers << " coin layers\n";
}

inline void dump_stages(const std::filesystem::path& dir, const CompilationTrace& trace) {
  std::filesystem::create_directories(dir);
  const auto& cs = trace.normalized.structure();
  auto normalized = io::walk_to_json(trace.normalized);
  normalized["net_shift"] = trace.net_shift;
  io::write_json((dir / "normalized_walk.json").string(), normalized);

  io::json v_blocks = io::json::array();
  for (const auto& blk : trace.decoupling.v_blocks) {
    v_blocks.push_back(
        {{"first_cell", blk.window.first_cell},
         {"cell_count", blk.window.cell_count},
         {"matrix", io::detail::matrix_to_json(blk.unitary)}});
  }
  const auto u_mats = extract_blocks(trace.decoupling.u, trace.decoupling.u_block_extents);
  io::json u_blocks = io::json::array();
  for (std::size_t b = 0; b < u_mats.size(); ++b) {
    const auto& w = trace.decoupling.u_block_extents[b];
    u_blocks.push_back(
        {{"first_cell", w.first_cell},
         {"cell_count", w.cell_count},
         {"matrix", io::detail::matrix_to_json(u_mats[b])}});
  }
  io::json cuts = io::json::array();
  for (const auto& c : trace.decoupling.cuts) cuts.push_back(c.position);
  io::write_json(
      (dir / "decoupling.json").string(),
      {{"dims", cs.dims()},
       {"cuts", cuts},
       {"left_extent", trace.plan.left_extent},
       {"right_extent", trace.plan.right_extent},
       {"v_blocks", v_blocks},
       {"u_blocks", u_blocks}});

  io::json classes = io::json::array();
  auto add_classes = [&](const char* layer, const std::vector<ConfigClass>& list) {
    for (const auto& cls : list) {
      io::json members = io::json::array();
      for (const auto& mem : cls.members) {
        io::json factors = io::json::array();
        for (const auto& e : mem.factorization.factors) {
          factors.push_back(
              {{"n", e.n}, {"m", e.m}, {"core", io::detail::matrix_to_json(e.core)}});
        }
        io::json diagonal = io::json::array();
        for (const auto& z : mem.factorization.diagonal) {
          diagonal.push_back(io::detail::complex_to_json(z));
        }
        members.push_back(
            {{"first_cell", mem.window.first_cell},
             {"factors", factors},
             {"diagonal", diagonal}});
      }
      classes.push_back({{"layer", layer}, {"signature", cls.signature}, {"members", members}});
    }
  };
  add_classes("v_dagger", trace.v_classes);
  add_classes("u", trace.u_classes);
  io::write_json((dir / "factorizations.json").string(), {{"classes", classes}});
}

inline int run_index(const std::string& walk_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto w = io::load_walk(walk_path);
    out << index(w) << '\n';
    return kSuccess;
  });
}

struct CompileFlags {
  std::optional<double> tolerance;
  std::optional<std::string> dump_dir;
  bool optimize = true;
};

inline int run_compile(
    const std::string& walk_path, const std::string& protocol_path,
    const CompileFlags& flags, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto w = io::load_walk(walk_path);
    CompileOptions options;
    options.optimize = flags.optimize;
    const auto trace = compile_walk_traced(w, options);
    if (flags.dump_dir) dump_stages(*flags.dump_dir, trace);
    io::write_json(protocol_path, io::protocol_to_json(trace.protocol, w.structure()));
    print_stats(out, trace.protocol);
    const auto report =
        verify(trace.protocol, w, flags.tolerance.value_or(default_tolerance(w.structure())));
    print_report(out, report);
    return report.passed ? kSuccess : kVerificationFailed;
  });
}

inline int run_verify(
    const std::string& protocol_path, const std::string& walk_path,
    std::optional<double> tolerance, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto [protocol, pcs] = io::load_protocol(protocol_path);
    const auto w = io::load_walk(walk_path);
    if (!(pcs == w.structure())) {
      throw InvalidInput("protocol and walk are defined on different cell structures");
    }
    const auto report =
        verify(protocol, w, tolerance.value_or(default_tolerance(w.structure())));
    print_report(out, report);
    return report.passed ? kSuccess : kVerificationFailed;
  });
}

inline int run_eval(
    const std::string& protocol_path, const std::string& walk_path, std::ostream& out,
    std::ostream& err) {
  return guarded(err, [&] {
    const auto [protocol, cs] = io::load_protocol(protocol_path);
    const auto w = eval_protocol(protocol, cs);
    io::write_json(walk_path, io::walk_to_json(w));
    out << "bandwidth " << w.bandwidth() << '\n';
    return kSuccess;
  });
}

inline int run_gen(
    const std::vector<int>& dims, int bandwidth, int net_shift, std::uint64_t seed,
    const std::string& walk_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto w = random_banded_unitary(CellStructure(dims), bandwidth, net_shift, seed);
    io::write_json(walk_path, io::walk_to_json(w));
    out << "bandwidth " << w.bandwidth() << '\n';
    return kSuccess;
  });
}

// Builds S_1 S_3^dag C with the Grover coin on `qutrit_cells` qutrits,
// regroups it onto qubit cells, compiles and verifies. Writes
// qutrit_walk.json, qubit_walk.json, protocol.json and report.json.
inline int run_example_three_state(
    int qutrit_cells, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (qutrit_cells < 4 || qutrit_cells % 2 != 0) {
      throw InvalidInput("the qutrit ring needs an even number of cells, at least 4");
    }
    const std::filesystem::path dir(out_dir);
    std::filesystem::create_directories(dir);
    const auto qutrit = build_three_state_walk(qutrit_cells, grover_coin(3));
    const auto qubit = regroup(qutrit, CellStructure::uniform(3 * qutrit_cells / 2, 2));
    out << "qutrit bandwidth " << qutrit.bandwidth() << ", qubit bandwidth "
        << qubit.bandwidth() << ", index " << index(qubit) << '\n';
    const auto protocol = compile_walk(qubit);
    const auto report = verify(protocol, qubit);
    io::write_json((dir / "qutrit_walk.json").string(), io::walk_to_json(qutrit));
    io::write_json((dir / "qubit_walk.json").string(), io::walk_to_json(qubit));
    io::write_json(
        (dir / "protocol.json").string(), io::protocol_to_json(protocol, qubit.structure()));
    io::write_json((dir / "report.json").string(), report_to_json(report));
    print_stats(out, protocol);
    print_report(out, report);
    return report.passed ? kSuccess : kVerificationFailed;
  });
}

}  // namespace qwalk::cli
