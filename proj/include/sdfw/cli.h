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

// Subcommands behind the `sdfw` binary, callable from tests.

#ifndef SDFW_CLI_H_
#define SDFW_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "sdfw/simnet.h"

namespace sdfw {

enum ExitCode : int {
  kExitOk = 0,
  kExitConflicts = 1,
  kExitValidation = 2,
  kExitCompile = 3,
  kExitRuntime = 4,  // also missing files
};

enum class ReportFormat : std::uint8_t { kJson, kTable };

struct RunConfig {
  std::string scenario_path;
  std::optional<std::string> output_path;
  std::optional<std::uint64_t> seed;
  int verbosity = 0;
  ReportFormat format = ReportFormat::kJson;
};

// "flat:N" or "tree:D,F". Throws ValidationError.
TopologySpec ParseTopologySpec(const std::string& text);

int CmdRun(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int CmdCheckPolicies(const std::string& policy_path, std::ostream& out,
                     std::ostream& err);
int CmdCompile(const std::string& policy_path, const std::string& topology,
               std::ostream& out, std::ostream& err);

// Tables 3-4 style side-by-side summary of a run with and without SDFW.
std::string RenderComparison(std::size_t hosts, const MetricsReport& off,
                             const MetricsReport& on);

}  // namespace sdfw

#endif  // SDFW_CLI_H_
