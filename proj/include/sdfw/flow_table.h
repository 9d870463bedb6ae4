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

#ifndef SDFW_FLOW_TABLE_H_
#define SDFW_FLOW_TABLE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sdfw/core_model.h"

namespace sdfw {

enum class MissPolicy : std::uint8_t { kPacketIn, kDrop };

enum class FlowModOp : std::uint8_t { kAdd, kModify, kDelete };

std::string_view FlowModOpName(FlowModOp op);

// ofp_flow_mod. For kAdd and kModify, (priority, match, actions) describe the
// rule. For kDelete, `match` is the selector and `priority` is only compared
// when `strict` is set.
struct FlowMod {
  FlowModOp op = FlowModOp::kAdd;
  std::uint16_t priority = 0;
  MatchSpec match;
  std::vector<Action> actions;
  bool strict = true;

  static FlowMod Add(std::uint16_t priority, MatchSpec match,
                     std::vector<Action> actions);
  static FlowMod Modify(std::uint16_t priority, MatchSpec match,
                        std::vector<Action> actions);
  static FlowMod Delete(MatchSpec match,
                        std::optional<std::uint16_t> priority = std::nullopt);

  friend bool operator==(const FlowMod&, const FlowMod&) = default;
};

struct FlowModSummary {
  std::vector<RuleId> added;
  std::vector<RuleId> modified;
  std::vector<RuleId> removed;

  bool empty() const {
    return added.empty() && modified.empty() && removed.empty();
  }
};

struct Matched {
  RuleId rule_id = 0;
  std::vector<Action> actions;
};
struct TableMiss {};

using LookupResult = std::variant<Matched, TableMiss>;

struct RuleSnapshot {
  RuleId rule_id = 0;
  std::string render;
  RuleStats stats;
};

// Single OpenFlow-style table. Rules are kept ordered by (priority desc,
// install order asc); lookup returns the first match in that order.
class FlowTable {
 public:
  explicit FlowTable(std::uint8_t table_id = 0,
                     MissPolicy miss_policy = MissPolicy::kPacketIn);

  // Highest-priority match, counting the packet against that rule.
  LookupResult Lookup(const Packet& pkt, std::optional<CtState> ct);

  // Add replaces a rule with identical (priority, match). Modify rewrites
  // the actions of the rule with identical (priority, match). Delete removes
  // every rule whose match equals the selector. Unmatched Modify/Delete are
  // no-ops.
  FlowModSummary Apply(const FlowMod& mod, SimTime now = SimTime{0});

  // Rules whose match lies inside `selector` (every exact selector field is
  // present and equal in the rule; a selector ct requirement must be equal).
  // nullopt selects everything.
  std::vector<RuleSnapshot> ReadStats(const std::optional<MatchSpec>& selector,
                                      SimTime now) const;

  // Same selection as ReadStats, as full rules with durations filled in.
  std::vector<FlowRule> Select(const std::optional<MatchSpec>& selector,
                               SimTime now) const;

  const FlowRule* Find(RuleId id) const;
  std::span<const FlowRule> rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }

  std::uint8_t table_id() const { return table_id_; }
  MissPolicy miss_policy() const { return miss_policy_; }
  void set_miss_policy(MissPolicy p) { miss_policy_ = p; }

  std::uint64_t miss_count() const { return misses_; }

  // One RenderDumpLine per rule, in lookup order.
  std::string Dump(SimTime now) const;

 private:
  void Insert(FlowRule rule, SimTime now);
  FlowRule WithDuration(std::size_t index, SimTime now) const;

  std::uint8_t table_id_;
  MissPolicy miss_policy_;
  // Parallel vectors, kept in lookup order.
  std::vector<FlowRule> rules_;
  std::vector<SimTime> installed_at_;
  RuleId next_rule_id_ = 1;
  std::uint64_t misses_ = 0;
};

// True iff `rule` falls under `selector` in the ReadStats sense.
bool SelectorCovers(const MatchSpec& selector, const MatchSpec& rule);

}  // namespace sdfw

#endif  // SDFW_FLOW_TABLE_H_
