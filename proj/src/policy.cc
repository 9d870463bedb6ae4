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

#include "sdfw/policy.h"

#include <algorithm>
#include <set>
#include <tuple>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

std::vector<Ipv4> SortedUnique(std::vector<Ipv4> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool Has(const std::vector<Ipv4>& sorted, Ipv4 ip) {
  return std::binary_search(sorted.begin(), sorted.end(), ip);
}

struct Prepared {
  const Policy* policy;
  std::vector<Ipv4> src;
  std::vector<Ipv4> dst;
};

// Whether the pair (s, d) of `p` survives resolution against the others.
bool Survives(const Prepared& p, Ipv4 s, Ipv4 d,
              const std::vector<Prepared>& all) {
  const MatchSpec mine = p.policy->PairMatch(s, d);
  const bool is_allow = p.policy->action == PolicyAction::kAllow;
  for (const Prepared& q : all) {
    if (&q == &p || q.policy->action == p.policy->action) continue;
    if (!Has(q.src, s) || !Has(q.dst, d)) continue;
    const MatchSpec theirs = q.policy->PairMatch(s, d);
    if (is_allow) {
      // A deny at equal priority removes any allow class it touches, since
      // the difference is not expressible as a single match.
      if (q.policy->priority == p.policy->priority &&
          SpecsOverlap(mine, theirs)) {
        return false;
      }
      if (q.policy->priority > p.policy->priority &&
          SpecContains(theirs, mine)) {
        return false;
      }
    } else if (q.policy->priority > p.policy->priority &&
               SpecContains(theirs, mine)) {
      return false;
    }
  }
  return true;
}

std::size_t NodeIndex(std::vector<std::vector<Ipv4>>& nodes,
                      const std::vector<Ipv4>& group) {
  auto it = std::find(nodes.begin(), nodes.end(), group);
  if (it != nodes.end()) return static_cast<std::size_t>(it - nodes.begin());
  nodes.push_back(group);
  return nodes.size() - 1;
}

MatchSpec WithCt(MatchSpec m, std::uint8_t set, std::uint8_t unset) {
  m.ct = CtMatch{set, unset};
  return m;
}

void Emit(std::vector<FlowMod>& out,
          std::set<std::pair<std::uint16_t, MatchSpec>>& seen, FlowMod mod) {
  if (!seen.emplace(mod.priority, mod.match).second) return;
  out.push_back(std::move(mod));
}

std::size_t ActionHead(const std::vector<Action>& actions) {
  // An empty list drops, same as action::Drop.
  if (actions.empty()) return Action(action::Drop{}).index();
  return actions.front().index();
}

}  // namespace

std::string_view PolicyActionName(PolicyAction a) {
  return a == PolicyAction::kAllow ? "allow" : "deny";
}

void Policy::Validate() const {
  if (id.empty()) throw ValidationError("policy without id");
  if (src.empty()) throw ValidationError("policy " + id + ": empty src group");
  if (dst.empty()) throw ValidationError("policy " + id + ": empty dst group");
  if (dst_port && proto && *proto == Protocol::kOther) {
    throw ValidationError("policy " + id + ": port on a non-TCP/UDP protocol");
  }
}

MatchSpec Policy::PairMatch(Ipv4 s, Ipv4 d) const {
  MatchSpec m;
  m.ip_src = s;
  m.ip_dst = d;
  m.protocol = proto;
  m.tp_dst = dst_port;
  return m;
}

PolicyGraph BuildPolicyGraph(const std::vector<Policy>& policies,
                             const Topology& topology) {
  std::vector<Prepared> prepared;
  prepared.reserve(policies.size());
  for (const Policy& p : policies) {
    p.Validate();
    prepared.push_back({&p, SortedUnique(p.src), SortedUnique(p.dst)});
  }

  PolicyGraph graph;
  for (const Prepared& p : prepared) {
    const Policy& pol = *p.policy;
    PolicyEdge edge;
    edge.policy_id = pol.id;
    edge.proto = pol.proto;
    edge.dst_port = pol.dst_port;
    edge.action = pol.action;
    edge.priority = pol.priority;
    edge.stateful = pol.stateful;
    for (Ipv4 s : p.src) {
      for (Ipv4 d : p.dst) {
        if (s == d || !Survives(p, s, d, prepared)) continue;
        if (pol.action == PolicyAction::kAllow) {
          // Hosts not attached yet get rules once a HostAttach brings them in.
          if (!topology.FindHost(s) || !topology.FindHost(d)) continue;
          std::vector<Hop> path = topology.Path(s, d);
          if (path.empty()) {
            throw CompileError("policy " + pol.id + ": no path from " +
                               s.ToString() + " to " + d.ToString());
          }
          edge.paths.emplace(HostPair{s, d}, std::move(path));
        } else {
          const Host* h = topology.FindHost(s);
          if (h == nullptr) continue;  // nothing to block at
          edge.paths.emplace(HostPair{s, d},
                             std::vector<Hop>{{h->attached_switch, h->port, 0}});
        }
      }
    }
    if (edge.paths.empty()) continue;
    edge.src_node = NodeIndex(graph.nodes, p.src);
    edge.dst_node = NodeIndex(graph.nodes, p.dst);
    graph.edges.push_back(std::move(edge));
  }
  return graph;
}

std::size_t CompiledRules::total() const {
  std::size_t n = 0;
  for (const auto& [sw, mods] : per_switch) n += mods.size();
  return n;
}

CompiledRules CompileToFlowRules(const PolicyGraph& graph,
                                 const Topology& topology,
                                 CompileOptions options) {
  CompiledRules out;
  std::map<SwitchId, std::set<std::pair<std::uint16_t, MatchSpec>>> seen;
  for (SwitchId sw : topology.switches()) out.per_switch[sw];

  // Stateful allow classes per (priority, pair). A stateless pair that
  // overlaps one of them is compiled stateful too, otherwise its plain output
  // rule would collide with the -trk rule at the same priority.
  std::map<std::tuple<std::uint16_t, Ipv4, Ipv4>, std::vector<MatchSpec>> stateful;
  for (const PolicyEdge& e : graph.edges) {
    if (e.action != PolicyAction::kAllow || !e.stateful) continue;
    for (const auto& [pair, hops] : e.paths) {
      MatchSpec m;
      m.protocol = e.proto;
      m.tp_dst = e.dst_port;
      stateful[{e.priority, pair.first, pair.second}].push_back(m);
    }
  }
  auto overlaps_stateful = [&](const PolicyEdge& e, const HostPair& pair) {
    auto it = stateful.find({e.priority, pair.first, pair.second});
    if (it == stateful.end()) return false;
    MatchSpec mine;
    mine.protocol = e.proto;
    mine.tp_dst = e.dst_port;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const MatchSpec& m) { return SpecsOverlap(m, mine); });
  };

  for (const PolicyEdge& e : graph.edges) {
    for (const auto& [pair, hops] : e.paths) {
      MatchSpec base;
      base.ip_src = pair.first;
      base.ip_dst = pair.second;
      base.protocol = e.proto;
      base.tp_dst = e.dst_port;

      if (e.action == PolicyAction::kDeny) {
        const SwitchId sw = hops.front().switch_id;
        Emit(out.per_switch[sw], seen[sw],
             FlowMod::Add(e.priority, base, {action::Drop{}}));
        continue;
      }
      const bool use_ct = options.stateful_enabled &&
                          (e.stateful || overlaps_stateful(e, pair));
      for (const Hop& hop : hops) {
        MatchSpec m = base;
        m.in_port = hop.in_port;
        auto& mods = out.per_switch[hop.switch_id];
        auto& dedup = seen[hop.switch_id];
        auto triple = [&](const MatchSpec& c) {
          Emit(mods, dedup,
               FlowMod::Add(e.priority, WithCt(c, 0, ct::kTrk),
                            {action::SendToConntrack{options.ct_zone, 0}}));
          Emit(mods, dedup,
               FlowMod::Add(e.priority, WithCt(c, ct::kTrk | ct::kNew, 0),
                            {action::CommitAndOutput{hop.out_port}}));
          Emit(mods, dedup,
               FlowMod::Add(e.priority, WithCt(c, ct::kTrk | ct::kEst, 0),
                            {action::Output{hop.out_port}}));
        };
        if (!use_ct || m.protocol == Protocol::kOther) {
          Emit(mods, dedup,
               FlowMod::Add(e.priority, m, {action::Output{hop.out_port}}));
        } else if (m.protocol || m.tp_dst) {
          triple(m);
        } else {
          // Conntrack only tracks TCP/UDP; other protocols pass statelessly.
          for (Protocol p : {Protocol::kTcp, Protocol::kUdp}) {
            MatchSpec c = m;
            c.protocol = p;
            triple(c);
          }
          MatchSpec other = m;
          other.protocol = Protocol::kOther;
          Emit(mods, dedup,
               FlowMod::Add(e.priority, other, {action::Output{hop.out_port}}));
        }
      }
    }
  }
  return out;
}

std::vector<FlowMod> DiffRuleSets(const std::vector<FlowMod>& from,
                                  const std::vector<FlowMod>& to) {
  using Key = std::pair<std::uint16_t, MatchSpec>;
  std::map<Key, const std::vector<Action>*> old_rules;
  for (const FlowMod& m : from) old_rules[{m.priority, m.match}] = &m.actions;
  std::set<Key> new_keys;
  for (const FlowMod& m : to) new_keys.insert({m.priority, m.match});

  std::vector<FlowMod> diff;
  for (const FlowMod& m : from) {
    if (!new_keys.contains({m.priority, m.match})) {
      diff.push_back(FlowMod::Delete(m.match, m.priority));
    }
  }
  for (const FlowMod& m : to) {
    auto it = old_rules.find({m.priority, m.match});
    if (it == old_rules.end() || *it->second != m.actions) {
      diff.push_back(FlowMod::Add(m.priority, m.match, m.actions));
    }
  }
  return diff;
}

bool CompiledSetIsConflictFree(const std::vector<FlowMod>& rules) {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size(); ++j) {
      if (rules[i].priority != rules[j].priority) continue;
      if (ActionHead(rules[i].actions) == ActionHead(rules[j].actions)) continue;
      if (SpecsOverlap(rules[i].match, rules[j].match)) return false;
    }
  }
  return true;
}

}  // namespace sdfw
