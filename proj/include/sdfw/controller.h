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

// Logically centralized controller. It owns the topology and the policy set,
// compiles them, and publishes per-switch rule sets through the NIB. Switches
// (or their agents) watch "/rules/<switch>" and reconcile.
//
// NIB layout:
//   /topology/switches   JSON list of switch ids
//   /topology/links      JSON list of {a, pa, b, pb, up} (switch links)
//   /topology/hosts      JSON list of {name, ip, switch, port}
//   /policies/<id>       one policy
//   /rules/<switch>      full desired Add list for that switch
//   /decisions/<switch>  latest agent decision (versions keep the history)

#ifndef SDFW_CONTROLLER_H_
#define SDFW_CONTROLLER_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sdfw/dfw_agent.h"
#include "sdfw/flow_table.h"
#include "sdfw/nib.h"
#include "sdfw/policy.h"
#include "sdfw/topology.h"

namespace sdfw {

namespace topo_event {
struct PortUp {
  SwitchId sw = 0;
  PortId port = 0;
};
struct PortDown {
  SwitchId sw = 0;
  PortId port = 0;
};
struct SwitchJoin {
  struct Uplink {
    PortId port = 0;
    SwitchId peer = 0;
    PortId peer_port = 0;
  };
  SwitchId sw = 0;
  std::vector<Uplink> links;
};
struct SwitchLeave {
  SwitchId sw = 0;
};
struct HostAttach {
  Host host;
};
}  // namespace topo_event

using TopologyEvent =
    std::variant<topo_event::PortUp, topo_event::PortDown,
                 topo_event::SwitchJoin, topo_event::SwitchLeave,
                 topo_event::HostAttach>;

struct TopologyUpdate {
  // Mods per switch that take its previous rule set to the new one.
  std::map<SwitchId, std::vector<FlowMod>> mods;
  // Set when the new topology cannot carry the policy set; the previous
  // rules stay in force.
  std::optional<std::string> compile_error;
};

class Controller {
 public:
  Controller(Nib& nib, Topology topology, std::vector<Policy> policies,
             CompileOptions options = {});

  Controller(const Controller&) = delete;
  Controller& operator=(const Controller&) = delete;

  // Compiles and publishes every rule set. Throws CompileError.
  const CompiledRules& Start();

  // Applies the event, recompiles and republishes the switches whose rule
  // set changed. Throws TopologyError for events naming unknown elements;
  // the topology is left untouched in that case.
  TopologyUpdate HandleTopologyEvent(const TopologyEvent& event);

  void PublishDecision(const Decision& d);

  static std::string RulesKey(SwitchId sw);
  static std::string DecisionsKey(SwitchId sw);

  const Topology& topology() const { return topology_; }
  const std::vector<Policy>& policies() const { return policies_; }
  const CompiledRules& compiled() const { return compiled_; }

 private:
  void PublishTopology();
  void PublishRules(SwitchId sw);

  Nib& nib_;
  Topology topology_;
  std::vector<Policy> policies_;
  CompileOptions options_;
  CompiledRules compiled_;
};

// Everything one switch reports for aggregation.
struct SwitchReport {
  SwitchId switch_id = 0;
  std::vector<RuleSnapshot> rules;
  std::uint64_t table_misses = 0;
  std::vector<Decision> decisions;
  std::size_t active_mitigations = 0;
};

SwitchReport MakeReport(SwitchId sw, const FlowTable& table,
                        const DfwAgent* agent, SimTime now);

struct SwitchSummary {
  std::size_t rules = 0;
  std::uint64_t packets = 0;
  std::uint64_t bytes = 0;
  std::uint64_t table_misses = 0;
  std::size_t syn_flood_decisions = 0;
  std::size_t saturation_decisions = 0;
  std::size_t active_mitigations = 0;

  friend bool operator==(const SwitchSummary&, const SwitchSummary&) = default;
};

struct FabricSnapshot {
  std::map<SwitchId, SwitchSummary> per_switch;
  SwitchSummary total;
  std::vector<Decision> decisions;  // ordered by (ts, switch)
};

// Throws ValidationError if two reports name the same switch.
FabricSnapshot AggregateStats(std::span<const SwitchReport> reports);

}  // namespace sdfw

#endif  // SDFW_CONTROLLER_H_
