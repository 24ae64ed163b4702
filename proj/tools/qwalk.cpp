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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace qwalk::cli;
  CLI::App app{"Factorize banded unitaries into conditional-shift and coin protocols"};
  app.require_subcommand(1);

  std::string walk;
  std::string protocol;
  std::string output;
  std::optional<double> tolerance;

  auto* index_cmd = app.add_subcommand("index", "Print the index of a walk");
  index_cmd->add_option("walk", walk, "Walk JSON file")->required();

  CompileFlags flags;
  std::string dump_dir;
  bool no_optimize = false;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a walk into a protocol and verify it");
  compile_cmd->add_option("walk", walk, "Walk JSON file")->required();
  compile_cmd->add_option("-o,--output", output, "Protocol JSON output")->required();
  compile_cmd->add_option("--tol", tolerance, "Frobenius tolerance (default 1e-9*sqrt(dim))");
  compile_cmd->add_option("--dump-stages", dump_dir, "Directory for intermediate artifacts");
  compile_cmd->add_flag("--no-optimize", no_optimize, "Skip peephole cleanup");

  auto* verify_cmd = app.add_subcommand("verify", "Check a protocol against a walk");
  verify_cmd->add_option("protocol", protocol, "Protocol JSON file")->required();
  verify_cmd->add_option("walk", walk, "Walk JSON file")->required();
  verify_cmd->add_option("--tol", tolerance, "Frobenius tolerance (default 1e-9*sqrt(dim))");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a protocol to a walk file");
  eval_cmd->add_option("protocol", protocol, "Protocol JSON file")->required();
  eval_cmd->add_option("-o,--output", output, "Walk JSON output")->required();

  std::vector<int> dims;
  int bandwidth = 1;
  int net_shift = 0;
  std::uint64_t seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random banded unitary");
  gen_cmd->add_option("--dims", dims, "Cell dimensions, e.g. 2,2,2,2")
      ->required()
      ->delimiter(',');
  gen_cmd->add_option("-L,--bandwidth", bandwidth, "Interaction length of the index-free part");
  gen_cmd->add_option("--index", net_shift, "Net shift (index) of the walk");
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_option("-o,--output", output, "Walk JSON output")->required();

  int qutrit_cells = 4;
  auto* example_cmd = app.add_subcommand(
      "example-three-state", "Compile the Grover three-state walk onto qubit cells");
  example_cmd->add_option("--cells", qutrit_cells, "Number of qutrit cells (even, >= 4)");
  example_cmd->add_option("--out-dir", output, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidInput;
  }

  if (index_cmd->parsed()) return run_index(walk, std::cout, std::cerr);
  if (compile_cmd->parsed()) {
    flags.tolerance = tolerance;
    if (!dump_dir.empty()) flags.dump_dir = dump_dir;
    flags.optimize = !no_optimize;
    return run_compile(walk, output, flags, std::cout, std::cerr);
  }
  if (verify_cmd->parsed()) return run_verify(protocol, walk, tolerance, std::cout, std::cerr);
  if (eval_cmd->parsed()) return run_eval(protocol, output, std::cout, std::cerr);
  if (gen_cmd->parsed()) {
    return run_gen(dims, bandwidth, net_shift, seed, output, std::cout, std::cerr);
  }
  if (example_cmd->parsed()) {
    return run_example_three_state(qutrit_cells, output, std::cout, std::cerr);
  }
  return kInvalidInput;
}
