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

#include "sdfw/cli.h"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "sdfw/conflict.h"
#include "sdfw/errors.h"
#include "sdfw/scenario_io.h"

namespace sdfw {
namespace {

std::size_t ParseSize(std::string_view s, const std::string& whole) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) {
    throw ValidationError("bad topology '" + whole + "'");
  }
  return v;
}

double AggregateGoodput(const MetricsReport& r) { return r.aggregate_goodput_bps; }

bool WriteText(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path);
  if (!f) {
    err << "error: cannot write " << path << "\n";
    return false;
  }
  f << text;
  return true;
}

}  // namespace

TopologySpec ParseTopologySpec(const std::string& text) {
  TopologySpec t;
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("bad topology '" + text + "'");
  const std::string_view kind(text.data(), colon);
  const std::string_view rest(text.data() + colon + 1, text.size() - colon - 1);
  if (kind == "flat") {
    t.kind = TopologySpec::Kind::kFlat;
    t.hosts = ParseSize(rest, text);
  } else if (kind == "tree") {
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) throw ValidationError("bad topology '" + text + "'");
    t.kind = TopologySpec::Kind::kTree;
    t.depth = ParseSize(rest.substr(0, comma), text);
    t.fanout = ParseSize(rest.substr(comma + 1), text);
  } else {
    throw ValidationError("bad topology '" + text + "'");
  }
  return t;
}

std::string RenderComparison(std::size_t hosts, const MetricsReport& off,
                             const MetricsReport& on) {
  char buf[256];
  std::string out =
      "Hosts  BW-No-SDFW (Gb/s)  BW-SDFW (Gb/s)  Latency-No-SDFW (ms)  "
      "Latency-SDFW (ms)\n";
  std::snprintf(buf, sizeof(buf), "%5zu  %17.3f  %14.3f  %20.3f  %17.3f\n", hosts,
                AggregateGoodput(off) / 1e9, AggregateGoodput(on) / 1e9,
                off.mean_latency_s * 1e3, on.mean_latency_s * 1e3);
  out += buf;
  const double bw_off = AggregateGoodput(off);
  const double lat_off = off.mean_latency_s;
  std::snprintf(buf, sizeof(buf), "bandwidth drop %.2f%%, latency increase %.2f%%\n",
                bw_off > 0 ? 100.0 * (1.0 - AggregateGoodput(on) / bw_off) : 0.0,
                lat_off > 0 ? 100.0 * (on.mean_latency_s / lat_off - 1.0) : 0.0);
  out += buf;
  out += "mitigations " + std::to_string(on.mitigations.size());
  if (on.detection_time_s) {
    std::snprintf(buf, sizeof(buf), ", detection after %.3fs", *on.detection_time_s);
    out += buf;
  }
  out += "\n";
  return out;
}

int CmdRun(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  Scenario scenario;
  try {
    scenario = DecodeScenario(ReadJsonFile(cfg.scenario_path));
    if (cfg.seed) scenario.seed = *cfg.seed;
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const ValidationError& e) {
    err << "error: " << cfg.scenario_path << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << cfg.scenario_path << ": " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    std::string text;
    if (cfg.format == ReportFormat::kJson) {
      const MetricsReport report = RunScenario(scenario);
      if (cfg.verbosity > 0) {
        for (const std::string& d : report.decisions) err << d << "\n";
      }
      text = EncodeReport(report).dump(2) + "\n";
    } else {
      Scenario off = scenario;
      off.sdfw_enabled = false;
      Scenario on = scenario;
      on.sdfw_enabled = true;
      const MetricsReport r_off = RunScenario(off);
      const MetricsReport r_on = RunScenario(on);
      if (cfg.verbosity > 0) {
        for (const std::string& d : r_on.decisions) err << d << "\n";
      }
      const std::size_t hosts = scenario.topology.Build().hosts().size();
      text = RenderComparison(hosts, r_off, r_on);
      if (cfg.output_path) {
        const Json both = {{"no_sdfw", EncodeReport(r_off)}, {"sdfw", EncodeReport(r_on)}};
        if (!WriteText(*cfg.output_path, both.dump(2) + "\n", err)) return kExitRuntime;
        out << text;
        return kExitOk;
      }
    }
    if (cfg.output_path) {
      if (!WriteText(*cfg.output_path, text, err)) return kExitRuntime;
    } else {
      out << text;
    }
  } catch (const CompileError& e) {
    err << "error: " << cfg.scenario_path << ": " << e.what() << "\n";
    return kExitCompile;
  } catch (const ValidationError& e) {
    err << "error: " << cfg.scenario_path << ": " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int CmdCheckPolicies(const std::string& policy_path, std::ostream& out,
                     std::ostream& err) {
  std::vector<Policy> policies;
  try {
    policies = DecodePolicies(ReadJsonFile(policy_path));
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const Error& e) {
    err << "error: " << policy_path << ": " << e.what() << "\n";
    return kExitValidation;
  }
  const std::vector<Conflict> conflicts = DetectConflicts(policies);
  if (conflicts.empty()) {
    out << "no conflicts\n";
    return kExitOk;
  }
  for (const Conflict& c : conflicts) out << RenderConflict(c) << "\n";
  return kExitConflicts;
}

int CmdCompile(const std::string& policy_path, const std::string& topology,
               std::ostream& out, std::ostream& err) {
  std::vector<Policy> policies;
  Topology topo;
  try {
    policies = DecodePolicies(ReadJsonFile(policy_path));
  } catch (const NotFoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const Error& e) {
    err << "error: " << policy_path << ": " << e.what() << "\n";
    return kExitValidation;
  }
  try {
    topo = ParseTopologySpec(topology).Build();
  } catch (const Error& e) {
    err << "error: --topology: " << e.what() << "\n";
    return kExitValidation;
  }
  CompiledRules compiled;
  try {
    compiled = CompileToFlowRules(BuildPolicyGraph(policies, topo), topo);
  } catch (const CompileError& e) {
    err << "error: " << policy_path << ": " << e.what() << "\n";
    return kExitCompile;
  }
  for (const auto& [sw, mods] : compiled.per_switch) {
    FlowTable table(0, compiled.miss_policy);
    for (const FlowMod& m : mods) table.Apply(m);
    out << "# switch " << sw << " (" << mods.size() << " rules, miss=packet_in)\n";
    out << table.Dump(SimTime{0});
  }
  return kExitOk;
}

}  // namespace sdfw
