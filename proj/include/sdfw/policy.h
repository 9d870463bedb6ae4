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

// High-level allow/deny intents and their compilation into per-switch rules.

#ifndef SDFW_POLICY_H_
#define SDFW_POLICY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdfw/core_model.h"
#include "sdfw/flow_table.h"
#include "sdfw/topology.h"

namespace sdfw {

enum class PolicyAction : std::uint8_t { kAllow, kDeny };

std::string_view PolicyActionName(PolicyAction a);

struct Policy {
  std::string id;
  std::vector<Ipv4> src;  // literal host sets
  std::vector<Ipv4> dst;
  std::optional<Protocol> proto;  // nullopt = any
  std::optional<std::uint16_t> dst_port;  // nullopt = any
  PolicyAction action = PolicyAction::kAllow;
  std::uint16_t priority = 0;
  // A stateful Allow compiles to the conntrack rule triple.
  bool stateful = true;

  // Throws ValidationError (empty groups, non-TCP/UDP protocol with a port).
  void Validate() const;
  // Traffic class of one (src, dst) member pair.
  MatchSpec PairMatch(Ipv4 s, Ipv4 d) const;

  friend bool operator==(const Policy&, const Policy&) = default;
};

// Named host groups, resolved into literal sets when policies are loaded.
using HostGroups = std::map<std::string, std::vector<Ipv4>, std::less<>>;

using HostPair = std::pair<Ipv4, Ipv4>;

struct PolicyEdge {
  std::string policy_id;
  std::size_t src_node = 0;  // index into PolicyGraph::nodes
  std::size_t dst_node = 0;
  std::optional<Protocol> proto;
  std::optional<std::uint16_t> dst_port;
  PolicyAction action = PolicyAction::kAllow;
  std::uint16_t priority = 0;
  bool stateful = true;
  // Allow: full switch path per surviving pair. Deny: the ingress hop only.
  std::map<HostPair, std::vector<Hop>> paths;
};

struct PolicyGraph {
  std::vector<std::vector<Ipv4>> nodes;  // endpoint groups, sorted
  std::vector<PolicyEdge> edges;
};

// Resolves conflicts (Deny wins at equal priority, otherwise the higher
// priority wins; fully shadowed pairs are dropped) and routes every
// surviving Allow pair over the shortest path. Throws CompileError naming the
// pair when an Allow pair is unreachable.
PolicyGraph BuildPolicyGraph(const std::vector<Policy>& policies,
                             const Topology& topology);

struct CompileOptions {
  // When false, Allow compiles to a single stateless output rule.
  bool stateful_enabled = true;
  std::uint16_t ct_zone = 0;
};

struct CompiledRules {
  std::map<SwitchId, std::vector<FlowMod>> per_switch;  // every switch present
  MissPolicy miss_policy = MissPolicy::kPacketIn;

  std::size_t total() const;
};

CompiledRules CompileToFlowRules(const PolicyGraph& graph,
                                 const Topology& topology,
                                 CompileOptions options = {});

// Mods that take an installed Add list `from` to `to`: strict Deletes for
// rules that disappear, Adds for new or changed ones.
std::vector<FlowMod> DiffRuleSets(const std::vector<FlowMod>& from,
                                  const std::vector<FlowMod>& to);

// Invariant check over one switch's compiled rules: no two rules with equal
// priority and overlapping matches have different action heads.
bool CompiledSetIsConflictFree(const std::vector<FlowMod>& rules);

}  // namespace sdfw

#endif  // SDFW_POLICY_H_
