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

#include "sdfw/flow_table.h"

#include <algorithm>

namespace sdfw {
namespace {

template <typename T>
bool Covers(const std::optional<T>& selector, const std::optional<T>& rule) {
  return !selector.has_value() || selector == rule;
}

}  // namespace

std::string_view FlowModOpName(FlowModOp op) {
  switch (op) {
    case FlowModOp::kAdd:
      return "add";
    case FlowModOp::kModify:
      return "modify";
    case FlowModOp::kDelete:
      return "delete";
  }
  return "?";
}

FlowMod FlowMod::Add(std::uint16_t priority, MatchSpec match,
                     std::vector<Action> actions) {
  return FlowMod{FlowModOp::kAdd, priority, std::move(match),
                 std::move(actions), true};
}

FlowMod FlowMod::Modify(std::uint16_t priority, MatchSpec match,
                        std::vector<Action> actions) {
  return FlowMod{FlowModOp::kModify, priority, std::move(match),
                 std::move(actions), true};
}

FlowMod FlowMod::Delete(MatchSpec match,
                        std::optional<std::uint16_t> priority) {
  return FlowMod{FlowModOp::kDelete, priority.value_or(0), std::move(match),
                 {}, priority.has_value()};
}

bool SelectorCovers(const MatchSpec& selector, const MatchSpec& rule) {
  return Covers(selector.in_port, rule.in_port) &&
         Covers(selector.eth_src, rule.eth_src) &&
         Covers(selector.eth_dst, rule.eth_dst) &&
         Covers(selector.ip_src, rule.ip_src) &&
         Covers(selector.ip_dst, rule.ip_dst) &&
         Covers(selector.tp_src, rule.tp_src) &&
         Covers(selector.tp_dst, rule.tp_dst) &&
         Covers(selector.protocol, rule.protocol) &&
         Covers(selector.ct, rule.ct);
}

FlowTable::FlowTable(std::uint8_t table_id, MissPolicy miss_policy)
    : table_id_(table_id), miss_policy_(miss_policy) {}

LookupResult FlowTable::Lookup(const Packet& pkt, std::optional<CtState> ct) {
  for (FlowRule& rule : rules_) {
    if (HeaderMatches(rule.match, pkt, ct)) {
      rule.stats.n_packets += 1;
      rule.stats.n_bytes += PacketBytes(pkt);
      return Matched{rule.rule_id, rule.actions};
    }
  }
  ++misses_;
  return TableMiss{};
}

void FlowTable::Insert(FlowRule rule, SimTime now) {
  rule.rule_id = next_rule_id_++;
  rule.stats = RuleStats{};
  // Every existing rule has a smaller install sequence, so the new rule goes
  // after all rules of equal or higher priority.
  auto it = std::find_if(rules_.begin(), rules_.end(), [&](const FlowRule& r) {
    return r.priority < rule.priority;
  });
  const auto pos = static_cast<std::size_t>(it - rules_.begin());
  rules_.insert(it, std::move(rule));
  installed_at_.insert(installed_at_.begin() + pos, now);
}

FlowModSummary FlowTable::Apply(const FlowMod& mod, SimTime now) {
  FlowModSummary summary;
  auto erase_at = [&](std::size_t i) {
    summary.removed.push_back(rules_[i].rule_id);
    rules_.erase(rules_.begin() + i);
    installed_at_.erase(installed_at_.begin() + i);
  };

  switch (mod.op) {
    case FlowModOp::kAdd: {
      for (std::size_t i = 0; i < rules_.size(); ++i) {
        if (rules_[i].priority == mod.priority && rules_[i].match == mod.match) {
          erase_at(i);
          break;
        }
      }
      FlowRule rule;
      rule.priority = mod.priority;
      rule.match = mod.match;
      rule.actions = mod.actions;
      Insert(std::move(rule), now);
      summary.added.push_back(next_rule_id_ - 1);
      break;
    }
    case FlowModOp::kModify:
      for (FlowRule& r : rules_) {
        if (r.priority == mod.priority && r.match == mod.match) {
          r.actions = mod.actions;
          summary.modified.push_back(r.rule_id);
        }
      }
      break;
    case FlowModOp::kDelete:
      for (std::size_t i = rules_.size(); i-- > 0;) {
        if (rules_[i].match == mod.match &&
            (!mod.strict || rules_[i].priority == mod.priority)) {
          erase_at(i);
        }
      }
      std::reverse(summary.removed.begin(), summary.removed.end());
      break;
  }
  return summary;
}

FlowRule FlowTable::WithDuration(std::size_t index, SimTime now) const {
  FlowRule copy = rules_[index];
  copy.stats.duration = std::max(Duration{0}, now - installed_at_[index]);
  return copy;
}

std::vector<FlowRule> FlowTable::Select(const std::optional<MatchSpec>& selector,
                                        SimTime now) const {
  std::vector<FlowRule> out;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    if (!selector || SelectorCovers(*selector, rules_[i].match)) {
      out.push_back(WithDuration(i, now));
    }
  }
  return out;
}

std::vector<RuleSnapshot> FlowTable::ReadStats(
    const std::optional<MatchSpec>& selector, SimTime now) const {
  std::vector<RuleSnapshot> out;
  for (FlowRule& r : Select(selector, now)) {
    out.push_back(RuleSnapshot{r.rule_id, RenderRule(r), r.stats});
  }
  return out;
}

const FlowRule* FlowTable::Find(RuleId id) const {
  for (const FlowRule& r : rules_) {
    if (r.rule_id == id) return &r;
  }
  return nullptr;
}

std::string FlowTable::Dump(SimTime now) const {
  std::string out;
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    out += RenderDumpLine(WithDuration(i, now), table_id_);
    out += '\n';
  }
  return out;
}

}  // namespace sdfw
