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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "sdfw/conflict.h"
#include "sdfw/dfw_agent.h"
#include "sdfw/nib.h"
#include "sdfw/policy.h"
#include "sdfw/scenario_io.h"
#include "sdfw/simnet.h"

namespace sdfw {
namespace {

std::string ScenarioPath(const std::string& name) {
  return std::string(SDFW_SOURCE_DIR) + "/scenarios/" + name;
}

Scenario LoadScenario(const std::string& name) {
  return DecodeScenario(ReadJsonFile(ScenarioPath(name)));
}

// Collects failed checks for one criterion.
class Check {
 public:
  void operator()(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ |= !ok;
  }
  bool ok() const { return !failed_; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

// ---- AC1 ----

std::string Ac1(Check& check) {
  const Scenario s = LoadScenario("flat_case_study.json");
  const SynFlood* flood = nullptr;
  for (const TrafficSpec& t : s.traffic) {
    if (const auto* f = std::get_if<SynFlood>(&t)) flood = f;
  }
  check(flood != nullptr, "scenario has no syn flood");
  if (flood == nullptr) return "";
  check(flood->count >= 199 && !flood->vary_src_port, "flood is not a 199+ fixed-tuple loop");
  const Ipv4 atk = flood->src, victim = flood->dst;

  Simulation sim(s);
  const MetricsReport r = sim.Run();
  const SwitchId sw = sim.topology().FindHost(atk)->attached_switch;
  const FlowTable& table = sim.table(sw);

  // (a) +new counted, +est untouched for the attacker pair.
  std::uint64_t new_pkts = 0, est_pkts = 0;
  int new_rules = 0, est_rules = 0;
  std::uint16_t permit_prio = 0;
  for (const FlowRule& rule : table.rules()) {
    const MatchSpec& m = rule.match;
    if (m.ip_src != atk || m.ip_dst != victim || !m.ct) continue;
    permit_prio = std::max(permit_prio, rule.priority);
    if (m.ct->set & ct::kNew) {
      ++new_rules;
      new_pkts += rule.stats.n_packets;
    }
    if (m.ct->set & ct::kEst) {
      ++est_rules;
      est_pkts += rule.stats.n_packets;
    }
  }
  check(new_rules == 1 && est_rules == 1, "permit triple missing");
  check(new_pkts >= s.detection.min_new_packets, "+new counter did not grow");
  check(est_pkts == 0, "+est counter moved");

  // (b) exactly one SynFlood decision for the pair, fabric wide.
  int decisions = 0;
  std::uint64_t evidence_new = 0;
  for (SwitchId id : sim.topology().switches()) {
    for (const Decision& d : sim.agent(id)->decisions()) {
      if (d.verdict == Verdict::kSynFlood && d.src == atk && d.dst == victim) {
        ++decisions;
        evidence_new = d.evidence.new_packets;
        check(d.evidence.est_packets == 0, "decision evidence has est packets");
      }
    }
  }
  check(decisions == 1, "expected one SynFlood decision, got " + std::to_string(decisions));

  // (c) drop rule one above the permit priority.
  const FlowRule* drop = nullptr;
  for (const FlowRule& rule : table.rules()) {
    if (rule.match.ip_src == atk && rule.match.ip_dst == victim &&
        rule.actions == std::vector<Action>{action::Drop{}}) {
      drop = &rule;
    }
  }
  check(drop != nullptr, "no drop rule");
  if (drop != nullptr) {
    check(permit_prio == 50 && drop->priority == 51, "drop rule not at 51 over 50");
    check(!drop->match.ct && drop->match.protocol == Protocol::kTcp && !drop->match.tp_src &&
              !drop->match.tp_dst && !drop->match.in_port,
          "drop rule match is not (src, dst, tcp)");
  }

  // (d) every attacker packet sent after installation is dropped.
  check(!r.mitigations.empty(), "no mitigation in report");
  std::size_t after = 0, bad = 0;
  if (!r.mitigations.empty()) {
    const SimTime installed = Seconds(r.mitigations[0].installed_at_s);
    for (const PacketRecord& p : sim.packets()) {
      if (p.pkt.header.ip_src != atk || p.injected <= installed) continue;
      ++after;
      bad += p.fate != Fate::kDroppedByMitigation;
    }
  }
  check(after > 0, "no attacker packets after installation");
  check(bad == 0, std::to_string(bad) + " later attacker packets not dropped");

  // (e) benign pairs deliver the same as without the attacker.
  Scenario quiet = s;
  std::erase_if(quiet.traffic, [](const TrafficSpec& t) { return std::holds_alternative<SynFlood>(t); });
  const MetricsReport q = RunScenario(quiet);
  check(q.pairs.size() == r.pairs.size(), "pair lists differ");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < std::min(q.pairs.size(), r.pairs.size()); ++i) {
    if (q.pairs[i].src == atk || q.pairs[i].dst == victim) continue;
    differing += q.pairs[i].delivered_bytes != r.pairs[i].delivered_bytes ||
                 q.pairs[i].delivered_packets != r.pairs[i].delivered_packets;
  }
  check(differing == 0, std::to_string(differing) + " benign pairs changed delivery");

  return "+new n_packets=" + std::to_string(new_pkts) + " +est n_packets=" +
         std::to_string(est_pkts) + " decision new=" + std::to_string(evidence_new) +
         " drop priority=" + (drop ? std::to_string(drop->priority) : "-") +
         " dropped_after=" + std::to_string(after);
}

// ---- AC2 ----

std::string Ac2(Check& check) {
  auto cfg = [](double delta, std::uint64_t min) {
    DetectionConfig c;
    c.delta_threshold = delta;
    c.min_new_packets = min;
    return c;
  };
  struct Case {
    std::uint64_t n, e;
    DetectionConfig c;
    Verdict want;
    const char* name;
  };
  const std::vector<Case> cases{
      {1400, 0, cfg(10, 100), Verdict::kSynFlood, "(1400,0)"},
      {0, 0, cfg(10, 100), Verdict::kBenign, "(0,0)"},
      {0, 7, cfg(10, 1), Verdict::kBenign, "(0,7)"},
      {0, 100000, cfg(0.5, 1), Verdict::kBenign, "(0,100000)"},
      {50, 50, cfg(10, 10), Verdict::kBenign, "(50,50)"},
      {500, 10, cfg(10, 10), Verdict::kSynFlood, "(500,10)"},
      {100, 10, cfg(10, 10), Verdict::kSynFlood, "boundary (100,10)"},
      {300, 40, cfg(7.5, 10), Verdict::kSynFlood, "boundary (300,40,7.5)"},
      {299, 40, cfg(7.5, 10), Verdict::kBenign, "(299,40,7.5)"},
  };
  for (const Case& c : cases) {
    check(EvaluateRatio(c.n, c.e, c.c) == c.want, c.name);
  }
  return std::to_string(cases.size()) + " cases";
}

// ---- AC3 ----

struct Degradation {
  double bw = 0, lat = 0;
};

Degradation Degrade(const std::string& name) {
  Scenario on = LoadScenario(name);
  on.sdfw_enabled = true;
  Scenario off = on;
  off.sdfw_enabled = false;
  const MetricsReport a = RunScenario(off);
  const MetricsReport b = RunScenario(on);
  return {1.0 - b.aggregate_goodput_bps / a.aggregate_goodput_bps,
          b.mean_latency_s / a.mean_latency_s - 1.0};
}

std::string Ac3(Check& check) {
  const Degradation flat = Degrade("flat100_synflood.json");
  const Degradation tree = Degrade("tree_d2_f8_synflood.json");
  check(flat.bw > tree.bw, "goodput: flat not worse than tree");
  check(tree.bw > 0, "goodput: tree degradation not positive");
  check(flat.lat > tree.lat, "latency: flat not worse than tree");
  check(tree.lat > 0, "latency: tree increase not positive");
  return Fmt("goodput drop flat %.4f%% tree %.4f%%, latency rise flat %.4f%% tree %.4f%%",
             100 * flat.bw, 100 * tree.bw, 100 * flat.lat, 100 * tree.lat);
}

// ---- AC4 ----

std::string Ac4(Check& check) {
  const Packet proto = oracle::MakePacket(1, MacAddr(1), MacAddr(2), Ipv4(10, 0, 0, 1),
                                          Ipv4(10, 0, 0, 2), 1024, 80, Protocol::kTcp);
  std::uint64_t sequences = 0, mismatches = 0;
  std::vector<int> seq;
  std::function<void(std::size_t)> rec = [&](std::size_t len) {
    ConnEntry e;
    e.key = KeyOf(proto, CtZone{0});
    TcpState want = TcpState::kClosed;
    for (int sym : seq) {
      Packet p = proto;
      p.tcp_flags = oracle::SegFlags(sym % oracle::kSegCount);
      AdvanceState(e, p, sym < oracle::kSegCount ? Direction::kOriginal : Direction::kReply);
      want = oracle::RefNextState(want, sym);
    }
    ++sequences;
    if (e.tcp_state != want) ++mismatches;
    if (len == 5) return;
    for (int sym = 0; sym < 2 * oracle::kSegCount; ++sym) {
      seq.push_back(sym);
      rec(len + 1);
      seq.pop_back();
    }
  };
  rec(0);
  check(sequences == 111111, "enumerated " + std::to_string(sequences) + " sequences");
  check(mismatches == 0, std::to_string(mismatches) + " mismatching sequences");
  return std::to_string(sequences) + " sequences, " + std::to_string(mismatches) + " mismatches";
}

// ---- AC5 ----

std::string Ac5(Check& check) {
  oracle::Rng rng(5005);
  std::uint64_t lookups = 0, bad_lookups = 0, bad_stats = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    FlowTable t;
    oracle::RefTable ref;
    const auto n_rules = rng.Below(21);
    for (std::uint64_t i = 0; i < n_rules; ++i) {
      const auto m = FlowMod::Add(static_cast<std::uint16_t>(rng.Below(6)),
                                  oracle::RandomSpec(rng),
                                  {action::Output{static_cast<PortId>(i + 1)}});
      t.Apply(m);
      ref.Apply(m);
    }
    const auto n_packets = rng.Below(201);
    for (std::uint64_t k = 0; k < n_packets; ++k) {
      const Packet p = oracle::RandomPacket(rng);
      const auto c = oracle::RandomCt(rng);
      const auto got = t.Lookup(p, c);
      const auto want = ref.Lookup(p, c);
      ++lookups;
      const bool same = std::holds_alternative<Matched>(got) == want.has_value() &&
                        (!want || std::get<Matched>(got).actions == ref.rules()[*want].actions);
      bad_lookups += !same;
    }
    bad_stats += oracle::Canonical(t) != ref.Canonical();
  }
  check(bad_lookups == 0, std::to_string(bad_lookups) + " lookup mismatches");
  check(bad_stats == 0, std::to_string(bad_stats) + " trials with differing final stats");

  std::uint64_t pairs = 0, bad_overlap = 0;
  for (int i = 0; i < 5000; ++i) {
    const MatchSpec a = oracle::RandomSpec(rng, 65);
    const MatchSpec b = oracle::RandomSpec(rng, 65);
    ++pairs;
    bad_overlap += SpecsOverlap(a, b) != oracle::Overlap(a, b);
  }
  check(bad_overlap == 0, std::to_string(bad_overlap) + " overlap mismatches");
  return "1000 trials, " + std::to_string(lookups) + " lookups, " + std::to_string(pairs) +
         " overlap pairs, 0 tolerated mismatches";
}

// ---- AC6 ----

struct ProbeClass {
  Protocol proto;
  std::optional<std::uint16_t> port;
};

bool PolicyCovers(const Policy& p, Ipv4 s, Ipv4 d, const ProbeClass& c) {
  if (std::find(p.src.begin(), p.src.end(), s) == p.src.end()) return false;
  if (std::find(p.dst.begin(), p.dst.end(), d) == p.dst.end()) return false;
  if (p.proto && *p.proto != c.proto) return false;
  if (p.dst_port && c.port != p.dst_port) return false;
  return true;
}

std::vector<Policy> RandomConflictFree(oracle::Rng& rng, const std::vector<Ipv4>& hosts) {
  std::vector<Policy> out;
  const std::vector<std::uint16_t> ports{22, 80, 443};
  for (int attempt = 0; attempt < 40 && out.size() < 8; ++attempt) {
    Policy p;
    p.id = "p" + std::to_string(attempt);
    for (Ipv4 h : hosts) {
      if (rng.Percent(35)) p.src.push_back(h);
      if (rng.Percent(35)) p.dst.push_back(h);
    }
    if (p.src.empty()) p.src.push_back(rng.Pick(hosts));
    if (p.dst.empty()) p.dst.push_back(rng.Pick(hosts));
    if (rng.Percent(75)) {
      p.proto = rng.Percent(60) ? Protocol::kTcp : rng.Percent(70) ? Protocol::kUdp : Protocol::kOther;
      if (*p.proto != Protocol::kOther && rng.Percent(50)) p.dst_port = rng.Pick(ports);
    }
    p.action = rng.Percent(60) ? PolicyAction::kAllow : PolicyAction::kDeny;
    p.priority = static_cast<std::uint16_t>(10 * (1 + rng.Below(3)));
    p.stateful = rng.Percent(70);
    out.push_back(p);
    if (!DetectConflicts(out).empty()) out.pop_back();
  }
  return out;
}

std::string Ac6(Check& check) {
  oracle::Rng rng(6006);
  const std::vector<ProbeClass> classes{{Protocol::kTcp, 22},  {Protocol::kTcp, 80},
                                        {Protocol::kTcp, 443}, {Protocol::kTcp, 8080},
                                        {Protocol::kUdp, 53},  {Protocol::kUdp, 80},
                                        {Protocol::kOther, std::nullopt}};
  std::uint64_t trials = 0, probes = 0, allowed = 0, denied = 0;
  std::uint64_t wrong_delivery = 0, deny_escaped = 0, unsound_tables = 0;
  for (int topo = 0; topo < 2; ++topo) {
    for (int trial = 0; trial < 25; ++trial) {
      Scenario s;
      if (topo == 0) {
        s.topology.kind = TopologySpec::Kind::kFlat;
        s.topology.hosts = 4;
      } else {
        s.topology.kind = TopologySpec::Kind::kTree;
        s.topology.depth = 2;
        s.topology.fanout = 2;
      }
      const Topology t = s.topology.Build();
      std::vector<Ipv4> hosts;
      for (const Host& h : t.hosts()) hosts.push_back(h.ip);
      s.policies = RandomConflictFree(rng, hosts);
      s.duration_s = 1.0;
      ++trials;

      const CompiledRules rules = CompileToFlowRules(BuildPolicyGraph(s.policies, t), t);
      for (const auto& [sw, mods] : rules.per_switch) {
        unsound_tables += !CompiledSetIsConflictFree(mods);
      }

      Simulation sim(s);
      struct Probe {
        std::size_t id;
        bool allow, deny;
        SwitchId ingress;
      };
      std::vector<Probe> sent;
      std::uint16_t sport = 20000;
      SimTime at = Seconds(0.001);
      for (const Host& a : t.hosts()) {
        for (const Host& b : t.hosts()) {
          if (a.ip == b.ip) continue;
          for (const ProbeClass& c : classes) {
            bool allow = false, deny = false;
            for (const Policy& p : s.policies) {
              if (!PolicyCovers(p, a.ip, b.ip, c)) continue;
              (p.action == PolicyAction::kAllow ? allow : deny) = true;
            }
            Packet pkt = oracle::MakePacket(0, a.mac, b.mac, a.ip, b.ip, sport++,
                                            c.port.value_or(0), c.proto);
            pkt.payload_len = 10;
            sent.push_back({sim.Inject(pkt, at), allow, deny, a.attached_switch});
            at += std::chrono::microseconds(500);
          }
        }
      }
      sim.Run();
      for (const Probe& p : sent) {
        const PacketRecord& rec = sim.packets()[p.id];
        ++probes;
        allowed += p.allow;
        denied += p.deny;
        const bool delivered = rec.fate == Fate::kDelivered;
        wrong_delivery += delivered != p.allow;
        if (p.deny) {
          deny_escaped += !(rec.fate == Fate::kDroppedByRule && rec.fate_switch == p.ingress &&
                            rec.hops == 1);
        }
      }
    }
  }
  check(wrong_delivery == 0, std::to_string(wrong_delivery) + " probes delivered != allowed");
  check(deny_escaped == 0, std::to_string(deny_escaped) + " deny probes left the ingress switch");
  check(unsound_tables == 0, std::to_string(unsound_tables) + " compiled tables with conflicts");
  check(allowed > 0 && denied > 0, "generator produced no allow or no deny coverage");
  return std::to_string(trials) + " policy sets, " + std::to_string(probes) + " probes (" +
         std::to_string(allowed) + " allowed, " + std::to_string(denied) + " denied)";
}

// ---- AC7 ----

std::string Ac7(Check& check) {
  Scenario s;
  s.topology.kind = TopologySpec::Kind::kFlat;
  s.topology.hosts = 3;
  s.detection.packet_in_rate_limit = 50;
  s.detection.packet_in_burst = 50;
  s.duration_s = 10.5;
  TableMissFlood attack;
  attack.src = HostAddress(1);
  attack.rate_pps = 10.0 * s.detection.packet_in_rate_limit;
  attack.duration = Seconds(10);
  TableMissFlood benign;
  benign.src = HostAddress(2);
  benign.rate_pps = 5;
  benign.duration = Seconds(10);
  s.traffic = {attack, benign};

  Simulation sim(s);
  const MetricsReport r = sim.Run();
  std::uint64_t sent_attack = 0, sent_benign = 0, benign_punted = 0;
  for (const PacketRecord& p : sim.packets()) {
    if (p.pkt.header.ip_src == attack.src) ++sent_attack;
    if (p.pkt.header.ip_src == benign.src) {
      ++sent_benign;
      benign_punted += p.fate == Fate::kPacketIn;
    }
  }
  const auto count = [&](Ipv4 ip) {
    auto it = r.packet_in_by_source.find(ip);
    return it == r.packet_in_by_source.end() ? std::uint64_t{0} : it->second;
  };
  const std::uint64_t bound = 50 * 10 + 50;
  check(sent_attack == 5000, "attacker sent " + std::to_string(sent_attack));
  check(count(attack.src) <= bound, "attacker packet_ins " + std::to_string(count(attack.src)));
  check(count(benign.src) == sent_benign && benign_punted == sent_benign,
        "benign source lost packet_ins");
  return "attacker packet_in " + std::to_string(count(attack.src)) + " <= " +
         std::to_string(bound) + " of " + std::to_string(sent_attack) + ", benign " +
         std::to_string(count(benign.src)) + "/" + std::to_string(sent_benign);
}

// ---- AC8 ----

std::string Ac8(Check& check) {
  std::uint64_t notifications = 0, violations = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    oracle::Rng rng(seed);
    Nib nib;
    std::vector<Subscription> subs(3);
    std::vector<std::map<std::string, std::uint64_t>> last(3);  // last version seen
    std::vector<std::map<std::string, std::uint64_t>> base(3);  // version at subscription
    const int join_at[3] = {0, static_cast<int>(rng.Below(50)), static_cast<int>(rng.Below(90))};
    for (int i = 0; i < 100; ++i) {
      for (std::size_t w = 0; w < 3; ++w) {
        if (i != join_at[w]) continue;
        nib.Dispatch();
        for (const NibRecord& rec : nib.List("/")) base[w][rec.key] = rec.version;
        subs[w] = nib.Watch("/keys/", [&, w](const NibRecord& rec) {
          ++notifications;
          auto it = last[w].find(rec.key);
          const std::uint64_t prev =
              it != last[w].end() ? it->second
                                  : (base[w].count(rec.key) ? base[w][rec.key] : 0);
          violations += rec.version != prev + 1;
          last[w][rec.key] = rec.version;
        });
      }
      nib.Put("/keys/k" + std::to_string(rng.Below(10)), std::to_string(i));
      if (rng.Percent(30)) nib.Dispatch();
    }
    nib.Dispatch();
    // Nothing missing at the end.
    for (std::size_t w = 0; w < 3; ++w) {
      for (const NibRecord& rec : nib.List("/keys/")) {
        const std::uint64_t seen = last[w].count(rec.key)    ? last[w][rec.key]
                                   : base[w].count(rec.key) ? base[w][rec.key]
                                                            : 0;
        violations += seen != rec.version;
      }
    }
  }
  check(violations == 0, std::to_string(violations) + " ordering/gap violations");
  return "50 runs x 3 watchers x 100 puts, " + std::to_string(notifications) + " notifications";
}

// ---- AC9 ----

std::string Ac9(Check& check) {
  std::size_t n = 0;
  for (const char* name : {"flat100_synflood.json", "flat100_synflood_nosdfw.json",
                           "tree_d2_f8_synflood.json", "tree_d2_f8_synflood_nosdfw.json",
                           "flat_case_study.json"}) {
    const Scenario s = LoadScenario(name);
    const std::string a = EncodeReport(RunScenario(s)).dump(2);
    const std::string b = EncodeReport(RunScenario(s)).dump(2);
    check(a == b, std::string(name) + " reports differ");
    ++n;
  }
  return std::to_string(n) + " bundled scenarios, byte-identical reports";
}

}  // namespace
}  // namespace sdfw

int main() {
  using Fn = std::string (*)(sdfw::Check&);
  const std::vector<std::pair<const char*, Fn>> criteria{
      {"AC1 flood case study", sdfw::Ac1},      {"AC2 detector predicate", sdfw::Ac2},
      {"AC3 degradation ordering", sdfw::Ac3},  {"AC4 conntrack oracle", sdfw::Ac4},
      {"AC5 flow table oracle", sdfw::Ac5},     {"AC6 compilation soundness", sdfw::Ac6},
      {"AC7 packet_in guard bound", sdfw::Ac7}, {"AC8 NIB ordering", sdfw::Ac8},
      {"AC9 determinism", sdfw::Ac9},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    sdfw::Check check;
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    try {
      detail = fn(check);
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s (%.2fs): %s\n", check.ok() ? "PASS" : "FAIL", name, secs,
                check.ok() ? detail.c_str() : check.summary().c_str());
    failed += !check.ok();
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
