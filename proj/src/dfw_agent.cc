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

#include "sdfw/dfw_agent.h"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

constexpr std::int64_t kTokenUnit = 1'000'000'000;  // one token, in token-ns

bool IsPermit(const std::vector<Action>& actions) {
  return std::any_of(actions.begin(), actions.end(), [](const Action& a) {
    return std::holds_alternative<action::Output>(a) ||
           std::holds_alternative<action::CommitAndOutput>(a);
  });
}

}  // namespace

void DetectionConfig::Validate() const {
  if (!(delta_threshold > 0)) throw ValidationError("delta_threshold must be > 0");
  if (min_new_packets < 1) throw ValidationError("min_new_packets must be >= 1");
  if (eval_interval <= Duration{0}) throw ValidationError("eval_interval must be > 0");
  if (window <= Duration{0}) throw ValidationError("window must be > 0");
  if (packet_in_rate_limit < 1) {
    throw ValidationError("packet_in_rate_limit must be >= 1");
  }
  if (packet_in_burst < 1) throw ValidationError("packet_in_burst must be >= 1");
  if (cool_down < Duration{0}) throw ValidationError("cool_down must be >= 0");
}

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kBenign:
      return "BENIGN";
    case Verdict::kSynFlood:
      return "SYN_FLOOD";
    case Verdict::kSaturationFlood:
      return "SATURATION_FLOOD";
  }
  return "?";
}

std::string RenderDecision(const Decision& d) {
  char ratio[32];
  if (d.evidence.ratio == std::numeric_limits<double>::infinity()) {
    std::snprintf(ratio, sizeof(ratio), "inf");
  } else {
    std::snprintf(ratio, sizeof(ratio), "%.3f", d.evidence.ratio);
  }
  char line[256];
  std::snprintf(line, sizeof(line),
                "ts=%.6f switch=%u verdict=%s src=%s dst=%s new=%llu est=%llu "
                "ratio=%s",
                ToSeconds(d.ts), d.switch_id,
                std::string(VerdictName(d.verdict)).c_str(),
                d.src.ToString().c_str(), d.dst.ToString().c_str(),
                static_cast<unsigned long long>(d.evidence.new_packets),
                static_cast<unsigned long long>(d.evidence.est_packets), ratio);
  return line;
}

double Ratio(std::uint64_t new_packets, std::uint64_t est_packets) {
  if (est_packets == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(new_packets) / static_cast<double>(est_packets);
}

Verdict EvaluateRatio(std::uint64_t new_packets, std::uint64_t est_packets,
                      const DetectionConfig& cfg) {
  if (new_packets < cfg.min_new_packets) return Verdict::kBenign;
  if (est_packets == 0) return Verdict::kSynFlood;
  // new/est >= delta, kept multiplicative so the boundary is exact.
  return static_cast<double>(new_packets) >=
                 cfg.delta_threshold * static_cast<double>(est_packets)
             ? Verdict::kSynFlood
             : Verdict::kBenign;
}

DfwAgent::DfwAgent(SwitchId switch_id, FlowTable& table, CtTable& ct,
                   DetectionConfig cfg)
    : switch_id_(switch_id), table_(table), ct_(ct), cfg_(cfg) {
  cfg_.Validate();
  ct_.set_listener([this](const CtEvent& e) { OnCtEvent(e); });
}

std::map<DfwAgent::Pair, DfwAgent::PairRules> DfwAgent::CollectPairs() const {
  std::map<Pair, PairRules> pairs;
  for (const FlowRule& r : table_.rules()) {
    const MatchSpec& m = r.match;
    if (!m.ct || !m.ip_src || !m.ip_dst) continue;
    if (m.protocol && *m.protocol != Protocol::kTcp) continue;
    if (!IsPermit(r.actions)) continue;
    const bool is_new = (m.ct->set & ct::kNew) != 0;
    const bool is_est = (m.ct->set & ct::kEst) != 0;
    if (!is_new && !is_est) continue;
    PairRules& pr = pairs[{*m.ip_src, *m.ip_dst}];
    (is_new ? pr.new_rules : pr.est_rules).push_back(r.rule_id);
    pr.permit_priority = std::max(pr.permit_priority, r.priority);
  }
  std::erase_if(pairs, [](const auto& kv) { return kv.second.new_rules.empty(); });
  return pairs;
}

std::uint64_t DfwAgent::Windowed(RuleId rule, std::uint64_t current,
                                 SimTime now) const {
  auto it = samples_.find(rule);
  if (it == samples_.end()) return current;
  const SimTime cutoff = now - cfg_.window;
  std::uint64_t baseline = 0;
  for (const auto& [t, value] : it->second) {
    if (t > cutoff) break;
    baseline = value;
  }
  return current >= baseline ? current - baseline : current;
}

std::uint64_t DfwAgent::Cumulative(const std::vector<RuleId>& rules) const {
  std::uint64_t total = 0;
  for (RuleId id : rules) {
    if (const FlowRule* r = table_.Find(id)) total += r->stats.n_packets;
  }
  return total;
}

std::vector<Mitigation> DfwAgent::OnTick(SimTime now) {
  std::vector<Mitigation> installed;
  const std::map<Pair, PairRules> pairs = CollectPairs();

  std::map<RuleId, std::uint64_t> current;
  for (const auto& [pair, pr] : pairs) {
    for (RuleId id : pr.new_rules) current[id] = Cumulative({id});
    for (RuleId id : pr.est_rules) current[id] = Cumulative({id});
  }

  for (const auto& [pair, pr] : pairs) {
    if (auto act = active_.find(pair); act != active_.end()) {
      Refresh(act->second, now);
      continue;
    }
    std::uint64_t new_w = 0;
    std::uint64_t est_w = 0;
    for (RuleId id : pr.new_rules) new_w += Windowed(id, current[id], now);
    for (RuleId id : pr.est_rules) est_w += Windowed(id, current[id], now);

    if (EvaluateRatio(new_w, est_w, cfg_) != Verdict::kSynFlood) continue;

    Decision d{Verdict::kSynFlood, pair.first, pair.second,
               Evidence{new_w, est_w, Ratio(new_w, est_w)}, now, switch_id_};
    decisions_.push_back(d);

    MatchSpec match;
    match.ip_src = pair.first;
    match.ip_dst = pair.second;
    match.protocol = Protocol::kTcp;
    const auto prio = static_cast<std::uint16_t>(
        std::min<int>(pr.permit_priority + 1, std::numeric_limits<std::uint16_t>::max()));
    FlowMod mod = FlowMod::Add(prio, match, {action::Drop{}});
    const FlowModSummary summary = table_.Apply(mod, now);

    Mitigation m{MitigationKind::kDrop, mod, now, summary.added.front(),
                 pair.first, pair.second, switch_id_};
    Active a{m, 0, Cumulative(pr.new_rules), now};
    active_.emplace(pair, a);
    history_.push_back(m);
    installed.push_back(m);
  }

  // Sample after evaluating so the window baseline never includes `now`.
  for (const auto& [id, value] : current) {
    auto& dq = samples_[id];
    dq.emplace_back(now, value);
    const SimTime cutoff = now - cfg_.window;
    while (dq.size() > 1 && dq[1].first <= cutoff) dq.pop_front();
  }
  std::erase_if(samples_, [&](const auto& kv) { return !current.contains(kv.first); });
  return installed;
}

void DfwAgent::Refresh(Active& a, SimTime now) {
  const FlowRule* drop = table_.Find(a.mitigation.rule_id);
  const std::uint64_t drops = drop ? drop->stats.n_packets : 0;
  std::uint64_t news = 0;
  for (const auto& [pair, pr] : CollectPairs()) {
    if (pair == Pair{a.mitigation.src, a.mitigation.dst}) news = Cumulative(pr.new_rules);
  }
  if (drops != a.last_drop_packets || news != a.last_new_packets) {
    a.last_activity = now;
  }
  a.last_drop_packets = drops;
  a.last_new_packets = news;
}

bool DfwAgent::IdleFor(const Active& a, SimTime now) const {
  return now - a.last_activity >= cfg_.cool_down;
}

std::optional<FlowMod> DfwAgent::WithdrawMitigation(const Mitigation& m,
                                                    SimTime now) {
  auto it = active_.find({m.src, m.dst});
  if (it == active_.end() || it->second.mitigation.rule_id != m.rule_id) {
    return std::nullopt;
  }
  Refresh(it->second, now);
  if (!IdleFor(it->second, now)) return std::nullopt;
  FlowMod del = FlowMod::Delete(m.flow_mod.match, m.flow_mod.priority);
  table_.Apply(del, now);
  active_.erase(it);
  return del;
}

std::vector<FlowMod> DfwAgent::WithdrawIdle(SimTime now) {
  std::vector<Mitigation> candidates;
  for (const auto& [pair, a] : active_) candidates.push_back(a.mitigation);
  std::vector<FlowMod> out;
  for (const Mitigation& m : candidates) {
    if (auto del = WithdrawMitigation(m, now)) out.push_back(*del);
  }
  return out;
}

GuardVerdict DfwAgent::PacketInGuard(Ipv4 src, SimTime now) {
  const std::int64_t cap = std::int64_t{cfg_.packet_in_burst} * kTokenUnit;
  const std::int64_t rate = cfg_.packet_in_rate_limit;
  auto [it, fresh] = buckets_.try_emplace(src, Bucket{cap, now, false});
  Bucket& b = it->second;
  if (!fresh && now > b.last) {
    const std::int64_t elapsed = (now - b.last).count();
    const std::int64_t missing = cap - b.credit;
    b.credit = elapsed >= missing / rate + 1 ? cap : b.credit + rate * elapsed;
    b.last = now;
  }
  if (b.credit == cap) b.throttling = false;
  if (b.credit >= kTokenUnit) {
    b.credit -= kTokenUnit;
    return GuardVerdict::kAllow;
  }
  ++throttled_[src];
  if (!b.throttling) {
    b.throttling = true;
    decisions_.push_back(Decision{Verdict::kSaturationFlood, src, Ipv4{},
                                  Evidence{0, 0, 0.0}, now, switch_id_});
  }
  return GuardVerdict::kThrottle;
}

void DfwAgent::OnCtEvent(const CtEvent& e) { ++ct_events_[e.kind]; }

std::vector<Mitigation> DfwAgent::active_mitigations() const {
  std::vector<Mitigation> out;
  for (const auto& [pair, a] : active_) out.push_back(a.mitigation);
  return out;
}

bool DfwAgent::IsMitigationRule(RuleId id) const {
  return std::any_of(history_.begin(), history_.end(),
                     [id](const Mitigation& m) { return m.rule_id == id; });
}

std::uint64_t DfwAgent::throttled(Ipv4 src) const {
  auto it = throttled_.find(src);
  return it == throttled_.end() ? 0 : it->second;
}

std::uint64_t DfwAgent::ct_events(CtEventKind kind) const {
  auto it = ct_events_.find(kind);
  return it == ct_events_.end() ? 0 : it->second;
}

}  // namespace sdfw
