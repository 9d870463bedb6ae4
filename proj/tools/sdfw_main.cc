// Copyright 2026 The SDFW Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>

#include "CLI11.hpp"
#include "sdfw/cli.h"

int main(int argc, char** argv) {
  CLI::App app{"Distributed stateful firewall simulator"};
  app.require_subcommand(1);

  sdfw::RunConfig run;
  std::string format = "json";
  std::uint64_t seed = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and emit a metrics report");
  run_cmd->add_option("--scenario", run.scenario_path, "Scenario JSON file")->required();
  run_cmd->add_option("--out", run.output_path, "Write the report here instead of stdout");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the scenario seed");
  run_cmd->add_option("--format", format, "json or table")
      ->check(CLI::IsMember({"json", "table"}));
  run_cmd->add_flag("-v,--verbose", run.verbosity, "Print agent decisions to stderr");

  std::string policy_path;
  auto* check_cmd = app.add_subcommand("check-policies", "List policy conflicts");
  check_cmd->add_option("--policies", policy_path, "Policy JSON file")->required();

  std::string compile_policies;
  std::string topology = "flat:2";
  auto* compile_cmd = app.add_subcommand("compile", "Print the rules each switch receives");
  compile_cmd->add_option("--policies", compile_policies, "Policy JSON file")->required();
  compile_cmd->add_option("--topology", topology, "flat:N or tree:D,F");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : sdfw::kExitValidation;
  }

  if (*run_cmd) {
    if (*seed_opt) run.seed = seed;
    run.format = format == "table" ? sdfw::ReportFormat::kTable : sdfw::ReportFormat::kJson;
    return sdfw::CmdRun(run, std::cout, std::cerr);
  }
  if (*check_cmd) return sdfw::CmdCheckPolicies(policy_path, std::cout, std::cerr);
  return sdfw::CmdCompile(compile_policies, topology, std::cout, std::cerr);
}
