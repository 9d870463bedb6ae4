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

// Local event listener co-located with each switch. It watches the
// ct_state-discriminated permit rules of its flow table and, per (src, dst)
// pair, compares the +new packet count to the +est packet count over a
// sliding window:
//
//     new / est >= delta   (est == 0 counts as an infinite ratio)
//
// A pair that crosses the threshold gets a drop rule one priority above the
// permit rules it overrides. Table-miss traffic that would be punted to the
// controller is rate limited per source with a token bucket.

#ifndef SDFW_DFW_AGENT_H_
#define SDFW_DFW_AGENT_H_

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdfw/conntrack.h"
#include "sdfw/flow_table.h"

namespace sdfw {

struct DetectionConfig {
  double delta_threshold = 10.0;
  std::uint64_t min_new_packets = 100;
  Duration eval_interval = std::chrono::seconds(1);
  Duration window = std::chrono::seconds(5);
  std::uint32_t packet_in_rate_limit = 50;  // per second per source
  std::uint32_t packet_in_burst = 50;       // bucket size
  Duration cool_down = std::chrono::seconds(30);

  // Throws ValidationError when an invariant does not hold.
  void Validate() const;
};

enum class Verdict : std::uint8_t { kBenign, kSynFlood, kSaturationFlood };

std::string_view VerdictName(Verdict v);

struct Evidence {
  std::uint64_t new_packets = 0;
  std::uint64_t est_packets = 0;
  double ratio = 0.0;  // +inf when est_packets == 0
};

struct Decision {
  Verdict verdict = Verdict::kBenign;
  Ipv4 src;
  Ipv4 dst;
  Evidence evidence;
  SimTime ts{0};
  SwitchId switch_id = 0;
};

// `ts=1.000000 switch=1 verdict=SYN_FLOOD src=.. dst=.. new=.. est=.. ratio=..`
std::string RenderDecision(const Decision& d);

enum class MitigationKind : std::uint8_t { kDrop, kRateLimit, kHoneypotRedirect };

struct Mitigation {
  MitigationKind kind = MitigationKind::kDrop;
  FlowMod flow_mod;
  SimTime installed_at{0};
  RuleId rule_id = 0;
  Ipv4 src;
  Ipv4 dst;
  SwitchId switch_id = 0;
};

// The threshold predicate on its own.
Verdict EvaluateRatio(std::uint64_t new_packets, std::uint64_t est_packets,
                      const DetectionConfig& cfg);

double Ratio(std::uint64_t new_packets, std::uint64_t est_packets);

enum class GuardVerdict : std::uint8_t { kAllow, kThrottle };

class DfwAgent {
 public:
  // The agent keeps references to its switch's tables; both must outlive it.
  // It installs itself as the CT table's event listener.
  DfwAgent(SwitchId switch_id, FlowTable& table, CtTable& ct,
           DetectionConfig cfg = {});

  DfwAgent(const DfwAgent&) = delete;
  DfwAgent& operator=(const DfwAgent&) = delete;

  // Samples the permit-rule counters, evaluates every non-mitigated pair and
  // installs (and returns) one drop mitigation per flooding pair.
  std::vector<Mitigation> OnTick(SimTime now);

  // Removes mitigations whose drop rule and +new counters have been idle for
  // the cool-down. Returns the Delete mods that were applied.
  std::vector<FlowMod> WithdrawIdle(SimTime now);

  // Withdraws one mitigation if it is active and has been idle for the
  // cool-down; nullopt otherwise.
  std::optional<FlowMod> WithdrawMitigation(const Mitigation& m, SimTime now);

  // Per-source token bucket in front of packet_in.
  GuardVerdict PacketInGuard(Ipv4 src, SimTime now);

  // CT table listener.
  void OnCtEvent(const CtEvent& e);

  const DetectionConfig& config() const { return cfg_; }
  SwitchId switch_id() const { return switch_id_; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  const std::vector<Mitigation>& history() const { return history_; }
  std::vector<Mitigation> active_mitigations() const;
  bool IsMitigationRule(RuleId id) const;
  std::uint64_t throttled(Ipv4 src) const;
  std::uint64_t ct_events(CtEventKind kind) const;

 private:
  using Pair = std::pair<Ipv4, Ipv4>;

  struct PairRules {
    std::vector<RuleId> new_rules;
    std::vector<RuleId> est_rules;
    std::uint16_t permit_priority = 0;
  };

  struct Active {
    Mitigation mitigation;
    std::uint64_t last_drop_packets = 0;
    std::uint64_t last_new_packets = 0;
    SimTime last_activity{0};
  };

  struct Bucket {
    std::int64_t credit = 0;  // token-nanoseconds
    SimTime last{0};
    bool throttling = false;
  };

  std::map<Pair, PairRules> CollectPairs() const;
  // Counter increase of `rule` over the window ending at `now`.
  std::uint64_t Windowed(RuleId rule, std::uint64_t current, SimTime now) const;
  std::uint64_t Cumulative(const std::vector<RuleId>& rules) const;
  bool IdleFor(const Active& a, SimTime now) const;
  void Refresh(Active& a, SimTime now);

  SwitchId switch_id_;
  FlowTable& table_;
  CtTable& ct_;
  DetectionConfig cfg_;

  std::map<RuleId, std::deque<std::pair<SimTime, std::uint64_t>>> samples_;
  std::map<Pair, Active> active_;
  std::map<Ipv4, Bucket> buckets_;
  std::map<Ipv4, std::uint64_t> throttled_;
  std::map<CtEventKind, std::uint64_t> ct_events_;
  std::vector<Decision> decisions_;
  std::vector<Mitigation> history_;
};

}  // namespace sdfw

#endif  // SDFW_DFW_AGENT_H_
