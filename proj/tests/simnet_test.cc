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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.h"
#include "sdfw/errors.h"
#include "sdfw/scenario_io.h"
#include "sdfw/simnet.h"

namespace sdfw {
namespace {

Policy AllowTcp(Ipv4 s, Ipv4 d) {
  Policy p;
  p.id = s.ToString() + ">" + d.ToString();
  p.src = {s};
  p.dst = {d};
  p.proto = Protocol::kTcp;
  p.priority = 50;
  return p;
}

// Flat(6): two benign pairs plus h1 flooding h6.
Scenario SmallFlood(bool sdfw) {
  Scenario s;
  s.topology.kind = TopologySpec::Kind::kFlat;
  s.topology.hosts = 6;
  for (auto [a, b] : {std::pair{2, 3}, std::pair{4, 5}, std::pair{1, 6}}) {
    s.policies.push_back(AllowTcp(HostAddress(a), HostAddress(b)));
    s.policies.push_back(AllowTcp(HostAddress(b), HostAddress(a)));
    if (a == 1) continue;
    BenignTcp f;
    f.src = HostAddress(a);
    f.dst = HostAddress(b);
    f.flows = 2;
    f.bytes_per_flow = 200'000;
    f.start = Seconds(0.1 * a);
    s.traffic.push_back(f);
  }
  SynFlood fl;
  fl.src = HostAddress(1);
  fl.dst = HostAddress(6);
  fl.count = 400;
  fl.rate_pps = 200;
  s.traffic.push_back(fl);
  s.sdfw_enabled = sdfw;
  s.duration_s = 3.0;
  s.detection.window = Seconds(1);
  return s;
}

Scenario BenignOnly(bool sdfw) {
  Scenario s = SmallFlood(sdfw);
  s.traffic.pop_back();
  return s;
}

// ---- Builders ----

TEST(Builders, Flat) {
  const Topology t100 = BuildFlat(100);
  EXPECT_EQ(t100.switches().size(), 1u);
  EXPECT_EQ(t100.hosts().size(), 100u);
  const Topology t2 = BuildFlat(2);
  EXPECT_EQ(t2.hosts().size(), 2u);
  EXPECT_EQ(t2.Path(HostAddress(1), HostAddress(2)).size(), 1u);
}

TEST(Builders, Tree) {
  const Topology t = BuildTree(2, 8);
  EXPECT_EQ(t.hosts().size(), 64u);
  EXPECT_EQ(t.switches().size(), 9u);
  const Topology small = BuildTree(1, 2);
  EXPECT_EQ(small.switches().size(), 1u);
  EXPECT_EQ(small.hosts().size(), 2u);
}

TEST(Builders, UniqueAddressesAndPortsProperty) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 40; ++trial) {
    const bool flat = rng.Percent(50);
    std::size_t depth = 1 + rng.Below(3), fanout = 2 + rng.Below(3);
    const std::size_t n = 2 + rng.Below(200);
    const Topology t = flat ? BuildFlat(n) : BuildTree(depth, fanout);
    std::size_t want = flat ? n : 1;
    if (!flat) {
      for (std::size_t i = 0; i < depth; ++i) want *= fanout;
    }
    ASSERT_EQ(t.hosts().size(), want);
    std::set<Ipv4> ips;
    std::set<MacAddr> macs;
    std::set<std::pair<SwitchId, PortId>> ports;
    for (const Host& h : t.hosts()) {
      EXPECT_TRUE(ips.insert(h.ip).second);
      EXPECT_TRUE(macs.insert(h.mac).second);
    }
    for (const Link& l : t.links()) {
      for (const Endpoint& e : {l.a, l.b}) {
        if (e.kind == Endpoint::Kind::kSwitch) {
          EXPECT_TRUE(ports.insert({e.id, e.port}).second);
        }
      }
    }
    // Every pair of hosts is connected.
    const Host& a = t.hosts().front();
    const Host& b = t.hosts().back();
    if (a.attached_switch != b.attached_switch) {
      EXPECT_FALSE(oracle::AllShortestPaths(t, a.attached_switch, b.attached_switch).empty());
    }
  }
}

// ---- Generators ----

TEST(Generators, SynFloodLoop) {
  SynFlood f;
  f.src = HostAddress(102);
  f.dst = HostAddress(103);
  f.count = 199;
  f.rate_pps = 1000;
  const auto pkts = GenSynFlood(f);
  ASSERT_EQ(pkts.size(), 199u);
  for (std::size_t i = 0; i < pkts.size(); ++i) {
    const Packet& p = pkts[i].pkt;
    EXPECT_EQ(p.seq, 100 + i);
    EXPECT_EQ(p.tcp_flags.bits, tcp::kSyn);
    EXPECT_EQ(*p.header.tp_src, 1024);
    EXPECT_EQ(*p.header.tp_dst, 80);
    EXPECT_EQ(pkts[i].ts, Seconds(i * 0.001));
  }
  EXPECT_EQ(pkts.back().pkt.seq, 298u);
  f.count = 1;
  ASSERT_EQ(GenSynFlood(f).size(), 1u);
}

TEST(Generators, TableMissFloodDeterministicAndAllMiss) {
  TableMissFlood f;
  f.src = HostAddress(1);
  f.rate_pps = 500;
  f.duration = Seconds(2);
  const auto a = GenTableMissFlood(f, 7);
  const auto b = GenTableMissFlood(f, 7);
  ASSERT_EQ(a.size(), 1000u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].pkt, b[i].pkt);
  EXPECT_NE(GenTableMissFlood(f, 8)[0].pkt, a[0].pkt);

  // Against the compiled rules of a real policy set, every one misses.
  const Topology t = BuildFlat(4);
  const auto rules = CompileToFlowRules(
      BuildPolicyGraph({AllowTcp(HostAddress(1), HostAddress(2))}, t), t);
  FlowTable table;
  for (const FlowMod& m : rules.per_switch.at(1)) table.Apply(m);
  for (const auto& tp : a) {
    Packet p = tp.pkt;
    p.header.in_port = 1;
    ASSERT_TRUE(std::holds_alternative<TableMiss>(table.Lookup(p, std::nullopt)));
  }
}

// ---- Simulation invariants ----

TEST(Simulation, ConservationAndCausality) {
  Simulation sim(SmallFlood(true));
  const MetricsReport r = sim.Run();
  EXPECT_EQ(r.fates.injected, sim.packets().size());
  EXPECT_EQ(r.fates.sum(), r.fates.injected);
  const Duration lat = sim.scenario().topology.link.latency;
  for (const PacketRecord& p : sim.packets()) {
    if (p.fate == Fate::kInFlight) continue;
    ASSERT_GE(p.fate_time, p.injected);
    if (p.fate == Fate::kDelivered) {
      // hops switches means hops + 1 links.
      ASSERT_GE(p.fate_time - p.injected, lat * (p.hops + 1));
    }
  }
}

TEST(Simulation, BottlenecksRespected) {
  Simulation sim(BenignOnly(false));
  const MetricsReport r = sim.Run();
  const double bw = sim.scenario().topology.link.bandwidth_bps;
  std::map<Ipv4, std::pair<std::uint64_t, SimTime>> per_dst;  // bytes, last delivery
  SimTime first{SimTime::max()};
  std::uint64_t switch_work = 0;
  SimTime last{0};
  for (const PacketRecord& p : sim.packets()) {
    first = std::min(first, p.injected);
    switch_work += p.hops;
    if (p.fate == Fate::kInFlight) continue;
    last = std::max(last, p.fate_time);
    if (p.fate != Fate::kDelivered) continue;
    auto& [bytes, t] = per_dst[p.pkt.header.ip_dst];
    bytes += PacketBytes(p.pkt);
    t = std::max(t, p.fate_time);
  }
  for (const auto& [dst, v] : per_dst) {
    EXPECT_LE(static_cast<double>(v.first) * 8, bw * ToSeconds(v.second - first) + 1500 * 8)
        << dst;
  }
  EXPECT_LE(static_cast<double>(switch_work),
            sim.scenario().switch_params.proc_rate_pps * ToSeconds(last - first) + 1);
  EXPECT_GT(r.aggregate_goodput_bps, 0);
}

TEST(Simulation, BenignDeliveriesSameWithAndWithoutSdfw) {
  auto delivered = [](bool sdfw, double& goodput) {
    Simulation sim(BenignOnly(sdfw));
    goodput = sim.Run().aggregate_goodput_bps;
    std::multiset<std::tuple<Ipv4, Ipv4, std::uint32_t, std::uint8_t, std::uint32_t>> out;
    for (const PacketRecord& p : sim.packets()) {
      if (p.fate != Fate::kDelivered) continue;
      out.insert({p.pkt.header.ip_src, p.pkt.header.ip_dst, p.pkt.seq, p.pkt.tcp_flags.bits,
                  p.pkt.payload_len});
    }
    return out;
  };
  double off = 0, on = 0;
  const auto a = delivered(false, off);
  const auto b = delivered(true, on);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  EXPECT_LE(on, off);
}

TEST(Simulation, FloodMitigatedInTime) {
  const Scenario s = SmallFlood(true);
  Simulation sim(s);
  const MetricsReport r = sim.Run();
  ASSERT_FALSE(r.mitigations.empty());
  EXPECT_EQ(r.mitigations[0].src, HostAddress(1));
  EXPECT_EQ(r.mitigations[0].dst, HostAddress(6));
  ASSERT_TRUE(r.detection_time_s.has_value());
  EXPECT_LE(*r.detection_time_s,
            ToSeconds(s.detection.eval_interval) + ToSeconds(s.detection.window));
  // After installation every attacker packet the switch sees is dropped.
  const SimTime installed = Seconds(r.mitigations[0].installed_at_s);
  std::size_t after = 0;
  for (const PacketRecord& p : sim.packets()) {
    if (p.kind != PacketKind::kSynFlood || p.pkt.header.ip_src != HostAddress(1)) continue;
    if (p.injected <= installed || p.fate == Fate::kInFlight) continue;
    ++after;
    EXPECT_EQ(p.fate, Fate::kDroppedByMitigation);
  }
  EXPECT_GT(after, 0u);
  EXPECT_GT(r.fates.dropped_by_mitigation, 0u);
}

TEST(Simulation, NoMitigationWithoutSdfw) {
  const MetricsReport r = RunScenario(SmallFlood(false));
  EXPECT_TRUE(r.mitigations.empty());
  EXPECT_FALSE(r.detection_time_s.has_value());
  EXPECT_EQ(r.fates.dropped_by_mitigation, 0u);
}

TEST(Simulation, SameSeedSameReport) {
  const Json a = EncodeReport(RunScenario(SmallFlood(true)));
  const Json b = EncodeReport(RunScenario(SmallFlood(true)));
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Simulation, ProbeFollowsCompiledRules) {
  Scenario s;
  s.topology.kind = TopologySpec::Kind::kTree;
  s.topology.depth = 2;
  s.topology.fanout = 2;
  const Topology t = s.topology.Build();
  const Host& a = t.hosts()[0];
  const Host& b = t.hosts()[3];
  s.policies = {AllowTcp(a.ip, b.ip)};
  s.duration_s = 0.1;
  Simulation sim(s);
  const auto ok = sim.Inject(
      oracle::MakePacket(0, a.mac, b.mac, a.ip, b.ip, 1000, 80, Protocol::kTcp), Seconds(0.01));
  const auto back = sim.Inject(
      oracle::MakePacket(0, b.mac, a.mac, b.ip, a.ip, 80, 1000, Protocol::kUdp), Seconds(0.01));
  sim.Run();
  EXPECT_EQ(sim.packets()[ok].fate, Fate::kDelivered);
  EXPECT_EQ(sim.packets()[ok].hops, 3u);
  EXPECT_EQ(sim.packets()[back].fate, Fate::kPacketIn);
  EXPECT_EQ(sim.packets()[back].fate_switch, b.attached_switch);
}

TEST(Simulation, InvalidScenarioRejected) {
  Scenario s = SmallFlood(true);
  s.duration_s = 0;
  EXPECT_THROW(Simulation{s}, ValidationError);
  s = SmallFlood(true);
  s.detection.delta_threshold = -1;
  EXPECT_THROW(Simulation{s}, ValidationError);
}

TEST(ScenarioIo, RoundTrip) {
  const Scenario s = SmallFlood(true);
  const Json j = EncodeScenario(s);
  EXPECT_EQ(EncodeScenario(DecodeScenario(j)).dump(), j.dump());
}

TEST(ScenarioIo, BundledScenariosLoad) {
  for (const char* name :
       {"flat100_synflood.json", "tree_d2_f8_synflood.json", "flat_case_study.json"}) {
    const Scenario s =
        DecodeScenario(ReadJsonFile(std::string(SDFW_SOURCE_DIR) + "/scenarios/" + name));
    EXPECT_TRUE(s.sdfw_enabled) << name;
    EXPECT_FALSE(s.policies.empty()) << name;
  }
  EXPECT_THROW(ReadJsonFile("/nonexistent/x.json"), NotFoundError);
}

TEST(ScenarioIo, BundledFloodsGetMitigated) {
  const Scenario flat =
      DecodeScenario(ReadJsonFile(std::string(SDFW_SOURCE_DIR) + "/scenarios/flat100_synflood.json"));
  EXPECT_GE(RunScenario(flat).mitigations.size(), 1u);
  const Scenario tree = DecodeScenario(
      ReadJsonFile(std::string(SDFW_SOURCE_DIR) + "/scenarios/tree_d2_f8_synflood.json"));
  const MetricsReport r = RunScenario(tree);
  // The attacker's ingress leaf detects it.
  const Topology t = tree.topology.Build();
  const SwitchId leaf = t.FindHost(HostAddress(1))->attached_switch;
  EXPECT_TRUE(std::any_of(r.mitigations.begin(), r.mitigations.end(),
                          [&](const MitigationRecord& m) { return m.switch_id == leaf; }));
  // Per-switch mitigation counts agree with the mitigation log.
  std::map<SwitchId, std::size_t> from_log;
  for (const MitigationRecord& m : r.mitigations) ++from_log[m.switch_id];
  for (const auto& [sw, summary] : r.switches) {
    EXPECT_EQ(summary.active_mitigations, from_log[sw]) << sw;
  }
}

}  // namespace
}  // namespace sdfw
