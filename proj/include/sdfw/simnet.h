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

// Deterministic discrete-event network simulator.
//
// Every switch is a single FIFO server: packets wait in a bounded queue
// (tail drop) and take 1/proc_rate_pps to process, plus ct_cost when the
// pipeline passes through conntrack. Links serialize per direction at their
// bandwidth and add their latency. The clock is integer nanoseconds and
// simultaneous events run in scheduling order.

#ifndef SDFW_SIMNET_H_
#define SDFW_SIMNET_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "sdfw/conntrack.h"
#include "sdfw/controller.h"
#include "sdfw/dfw_agent.h"
#include "sdfw/flow_table.h"
#include "sdfw/nib.h"
#include "sdfw/policy.h"
#include "sdfw/topology.h"

namespace sdfw {

struct TopologySpec {
  enum class Kind : std::uint8_t { kFlat, kTree };
  Kind kind = Kind::kFlat;
  std::size_t hosts = 2;   // flat
  std::size_t depth = 1;   // tree
  std::size_t fanout = 2;  // tree
  LinkParams link;

  Topology Build() const;
};

// Client/server TCP transfers: handshake, `bytes_per_flow` of payload in
// MSS-sized segments at line rate, then FIN. No retransmission.
struct BenignTcp {
  Ipv4 src;
  Ipv4 dst;
  std::uint32_t flows = 1;
  std::uint64_t bytes_per_flow = 0;
  std::uint16_t dst_port = 80;
  SimTime start{0};
};

// `count` SYNs, seq = 100 + i, one every 1/rate_pps.
struct SynFlood {
  Ipv4 src;
  Ipv4 dst;
  std::uint16_t dst_port = 80;
  std::uint16_t src_port = 1024;
  std::uint64_t count = 1;
  double rate_pps = 1.0;
  SimTime start{0};
  bool vary_src_port = false;  // src_port + i instead of a fixed tuple
};

// Packets with random destinations in 172.16.0.0/12 and random ports, so
// that no installed rule matches them.
struct TableMissFlood {
  Ipv4 src;
  double rate_pps = 1.0;
  SimTime start{0};
  Duration duration{0};
};

using TrafficSpec = std::variant<BenignTcp, SynFlood, TableMissFlood>;

struct SwitchParams {
  double proc_rate_pps = 1e6;
  Duration ct_cost = std::chrono::nanoseconds(200);
  std::size_t queue_capacity = 10000;
};

struct Scenario {
  TopologySpec topology;
  std::vector<Policy> policies;
  std::vector<TrafficSpec> traffic;
  bool sdfw_enabled = true;
  std::uint64_t seed = 1;
  double duration_s = 1.0;
  SwitchParams switch_params;
  DetectionConfig detection;

  // Throws ValidationError.
  void Validate() const;
};

struct TimedPacket {
  SimTime ts{0};
  Packet pkt;
};

std::vector<TimedPacket> GenSynFlood(const SynFlood& spec);
std::vector<TimedPacket> GenTableMissFlood(const TableMissFlood& spec,
                                           std::uint64_t seed);

inline constexpr std::uint32_t kMss = 1446;

enum class Fate : std::uint8_t {
  kInFlight,
  kDelivered,
  kDroppedByRule,
  kDroppedByMitigation,
  kThrottledMiss,
  kPacketIn,
  kLostQueue,
};

std::string_view FateName(Fate f);

enum class PacketKind : std::uint8_t { kBenign, kSynFlood, kMissFlood, kProbe };

struct PacketRecord {
  Packet pkt;
  PacketKind kind = PacketKind::kBenign;
  std::int32_t pair = -1;  // index into MetricsReport::pairs for benign data
  bool data = false;       // carries payload
  SimTime injected{0};     // first bit leaves the sending host
  Fate fate = Fate::kInFlight;
  SimTime fate_time{0};
  SwitchId fate_switch = 0;  // where it was dropped/punted; 0 otherwise
  std::uint32_t hops = 0;    // switches it was processed by
};

struct FateCounts {
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_by_rule = 0;
  std::uint64_t dropped_by_mitigation = 0;
  std::uint64_t throttled_miss = 0;
  std::uint64_t packet_in = 0;
  std::uint64_t lost_queue = 0;
  std::uint64_t in_flight = 0;

  std::uint64_t sum() const {
    return delivered + dropped_by_rule + dropped_by_mitigation +
           throttled_miss + packet_in + lost_queue + in_flight;
  }
};

struct PairMetrics {
  Ipv4 src;
  Ipv4 dst;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t delivered_packets = 0;
  double goodput_bps = 0.0;
  double mean_latency_s = 0.0;
};

struct MitigationRecord {
  SwitchId switch_id = 0;
  Ipv4 src;
  Ipv4 dst;
  double installed_at_s = 0.0;
  std::string rule;
};

struct MetricsReport {
  bool sdfw_enabled = true;
  std::uint64_t seed = 0;
  double duration_s = 0.0;
  std::vector<PairMetrics> pairs;
  double mean_goodput_bps = 0.0;  // over pairs
  // All benign payload over [first benign send, last benign delivery].
  double aggregate_goodput_bps = 0.0;
  double mean_latency_s = 0.0;    // over delivered benign data packets
  std::optional<double> detection_time_s;
  std::vector<MitigationRecord> mitigations;
  std::vector<std::string> decisions;
  std::uint64_t packet_in_count = 0;
  std::map<Ipv4, std::uint64_t> packet_in_by_source;
  FateCounts fates;
  std::map<SwitchId, SwitchSummary> switches;
};

class Simulation {
 public:
  // Builds the topology, compiles the policies through the controller and
  // schedules the traffic. Throws ValidationError or CompileError.
  explicit Simulation(Scenario scenario);
  ~Simulation();

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  // Sends one extra packet from the host owning pkt.header.ip_src. Returns
  // its index in packets(). Must be called before Run().
  std::size_t Inject(const Packet& pkt, SimTime at);

  // Runs the event loop until the scenario duration. Call once.
  MetricsReport Run();

  const Scenario& scenario() const { return scenario_; }
  const Topology& topology() const;
  const FlowTable& table(SwitchId sw) const;
  const CtTable& conntrack(SwitchId sw) const;
  // nullptr when SDFW is disabled.
  const DfwAgent* agent(SwitchId sw) const;
  const std::vector<PacketRecord>& packets() const { return packets_; }
  Nib& nib() { return nib_; }
  const Controller& controller() const { return *controller_; }

 private:
  struct SwitchState;
  struct HostState;
  struct Event;
  struct EventLater {
    bool operator()(const Event& a, const Event& b) const;
  };
  struct FlowState;
  struct PairTrack {
    std::optional<SimTime> first_send;
    SimTime last_delivery{0};
    double latency_sum_s = 0.0;
  };
  using FlowKey = std::tuple<Ipv4, std::uint16_t, Ipv4, std::uint16_t>;

  void Schedule(SimTime t, std::uint8_t type, std::uint32_t a, std::uint64_t b,
                std::uint32_t c = 0);
  std::size_t NewPacket(const Packet& pkt, PacketKind kind, std::int32_t pair,
                        bool data);
  void SendFromHost(std::size_t host, std::size_t pkt_id, SimTime now);
  void SendOnLink(std::size_t link, const Endpoint& from, std::size_t pkt_id,
                  SimTime now);
  void ArriveAtSwitch(SwitchId sw, PortId port, std::size_t pkt_id, SimTime now);
  void StartService(SwitchState& s, SimTime now);
  void RunPipeline(SwitchState& s, std::size_t pkt_id);
  void FinishService(SwitchId sw, SimTime now);
  void ArriveAtHost(std::size_t host, std::size_t pkt_id, SimTime now);
  void Tick(SimTime now);
  void SetFate(std::size_t pkt_id, Fate f, SimTime now, SwitchId sw);
  void StartFlow(std::size_t flow, SimTime now);
  MetricsReport BuildReport() const;

  Scenario scenario_;
  Nib nib_;
  std::unique_ptr<Controller> controller_;
  std::map<SwitchId, std::unique_ptr<SwitchState>> switches_;
  std::vector<HostState> hosts_;
  std::vector<std::vector<SimTime>> link_busy_;  // [link][direction]
  std::vector<PacketRecord> packets_;
  std::vector<FlowState> flows_;
  std::vector<PairMetrics> pairs_;
  std::vector<PairTrack> pair_track_;
  std::map<FlowKey, std::size_t> flow_index_;  // (client, sport, server, dport)
  std::vector<Event> heap_;
  std::uint64_t next_seq_ = 0;
  SimTime now_{0};
  SimTime end_{0};
  bool ran_ = false;
  std::map<Ipv4, std::uint64_t> packet_in_by_source_;
};

MetricsReport RunScenario(const Scenario& scenario);

}  // namespace sdfw

#endif  // SDFW_SIMNET_H_
