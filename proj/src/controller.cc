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

#include "sdfw/controller.h"

#include <algorithm>
#include <tuple>

#include "sdfw/codec.h"
#include "sdfw/errors.h"

namespace sdfw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

CompiledRules Compile(const std::vector<Policy>& policies,
                      const Topology& topology, CompileOptions options) {
  return CompileToFlowRules(BuildPolicyGraph(policies, topology), topology,
                            options);
}

void RequireSwitch(const Topology& t, SwitchId sw) {
  if (!t.HasSwitch(sw)) throw TopologyError("unknown switch " + std::to_string(sw));
}

}  // namespace

Controller::Controller(Nib& nib, Topology topology, std::vector<Policy> policies,
                       CompileOptions options)
    : nib_(nib),
      topology_(std::move(topology)),
      policies_(std::move(policies)),
      options_(options) {}

std::string Controller::RulesKey(SwitchId sw) {
  return "/rules/" + std::to_string(sw);
}

std::string Controller::DecisionsKey(SwitchId sw) {
  return "/decisions/" + std::to_string(sw);
}

const CompiledRules& Controller::Start() {
  compiled_ = Compile(policies_, topology_, options_);
  PublishTopology();
  for (const Policy& p : policies_) {
    nib_.Put("/policies/" + p.id, EncodePolicy(p).dump());
  }
  for (const auto& [sw, mods] : compiled_.per_switch) PublishRules(sw);
  return compiled_;
}

TopologyUpdate Controller::HandleTopologyEvent(const TopologyEvent& event) {
  Topology next = topology_;
  std::visit(
      Overloaded{
          [&](const topo_event::PortUp& e) {
            RequireSwitch(next, e.sw);
            next.SetPortState(e.sw, e.port, true);
          },
          [&](const topo_event::PortDown& e) {
            RequireSwitch(next, e.sw);
            next.SetPortState(e.sw, e.port, false);
          },
          [&](const topo_event::SwitchJoin& e) {
            next.AddSwitch(e.sw);
            for (const auto& l : e.links) {
              RequireSwitch(next, l.peer);
              if (next.HasPort(l.peer, l.peer_port)) {
                throw TopologyError("port " + std::to_string(l.peer_port) +
                                    " on switch " + std::to_string(l.peer) +
                                    " already in use");
              }
              next.AddSwitchLink(e.sw, l.port, l.peer, l.peer_port);
            }
          },
          [&](const topo_event::SwitchLeave& e) { next.RemoveSwitch(e.sw); },
          [&](const topo_event::HostAttach& e) {
            next.AddHost(e.host.name, e.host.ip, e.host.mac,
                         e.host.attached_switch, e.host.port);
          },
      },
      event);
  topology_ = std::move(next);
  PublishTopology();

  TopologyUpdate update;
  CompiledRules fresh;
  try {
    fresh = Compile(policies_, topology_, options_);
  } catch (const CompileError& e) {
    update.compile_error = e.what();
    return update;
  }
  for (const auto& [sw, mods] : fresh.per_switch) {
    static const std::vector<FlowMod> kNone;
    auto old = compiled_.per_switch.find(sw);
    const auto& before = old == compiled_.per_switch.end() ? kNone : old->second;
    std::vector<FlowMod> diff = DiffRuleSets(before, mods);
    const bool fresh_switch = old == compiled_.per_switch.end();
    if (diff.empty() && !fresh_switch) continue;
    update.mods[sw] = std::move(diff);
  }
  compiled_ = std::move(fresh);
  for (const auto& [sw, mods] : update.mods) PublishRules(sw);
  return update;
}

void Controller::PublishDecision(const Decision& d) {
  nib_.Put(DecisionsKey(d.switch_id), EncodeDecision(d).dump());
}

void Controller::PublishTopology() {
  Json switches = Json::array();
  for (SwitchId sw : topology_.switches()) switches.push_back(sw);
  Json links = Json::array();
  Json hosts = Json::array();
  for (const Link& l : topology_.links()) {
    if (l.a.kind != Endpoint::Kind::kSwitch || l.b.kind != Endpoint::Kind::kSwitch) {
      continue;
    }
    links.push_back({{"a", l.a.id}, {"pa", l.a.port}, {"b", l.b.id},
                     {"pb", l.b.port}, {"up", l.up}});
  }
  for (const Host& h : topology_.hosts()) {
    hosts.push_back({{"name", h.name}, {"ip", h.ip.ToString()},
                     {"switch", h.attached_switch}, {"port", h.port}});
  }
  nib_.Put("/topology/switches", switches.dump());
  nib_.Put("/topology/links", links.dump());
  nib_.Put("/topology/hosts", hosts.dump());
}

void Controller::PublishRules(SwitchId sw) {
  nib_.Put(RulesKey(sw), EncodeFlowMods(compiled_.per_switch[sw]).dump());
}

SwitchReport MakeReport(SwitchId sw, const FlowTable& table,
                        const DfwAgent* agent, SimTime now) {
  SwitchReport r;
  r.switch_id = sw;
  r.rules = table.ReadStats(std::nullopt, now);
  r.table_misses = table.miss_count();
  if (agent != nullptr) {
    r.decisions = agent->decisions();
    r.active_mitigations = agent->active_mitigations().size();
  }
  return r;
}

FabricSnapshot AggregateStats(std::span<const SwitchReport> reports) {
  FabricSnapshot snap;
  for (const SwitchReport& r : reports) {
    if (snap.per_switch.contains(r.switch_id)) {
      throw ValidationError("duplicate report for switch " +
                            std::to_string(r.switch_id));
    }
    SwitchSummary& s = snap.per_switch[r.switch_id];
    s.rules = r.rules.size();
    for (const RuleSnapshot& rule : r.rules) {
      s.packets += rule.stats.n_packets;
      s.bytes += rule.stats.n_bytes;
    }
    s.table_misses = r.table_misses;
    for (const Decision& d : r.decisions) {
      if (d.verdict == Verdict::kSynFlood) ++s.syn_flood_decisions;
      if (d.verdict == Verdict::kSaturationFlood) ++s.saturation_decisions;
      snap.decisions.push_back(d);
    }
    s.active_mitigations = r.active_mitigations;

    snap.total.rules += s.rules;
    snap.total.packets += s.packets;
    snap.total.bytes += s.bytes;
    snap.total.table_misses += s.table_misses;
    snap.total.syn_flood_decisions += s.syn_flood_decisions;
    snap.total.saturation_decisions += s.saturation_decisions;
    snap.total.active_mitigations += s.active_mitigations;
  }
  std::stable_sort(snap.decisions.begin(), snap.decisions.end(),
                   [](const Decision& a, const Decision& b) {
                     return std::tie(a.ts, a.switch_id) < std::tie(b.ts, b.switch_id);
                   });
  return snap;
}

}  // namespace sdfw
