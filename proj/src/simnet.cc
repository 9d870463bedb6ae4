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

#include "sdfw/simnet.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <tuple>

#include "sdfw/codec.h"
#include "sdfw/errors.h"

namespace sdfw {
namespace {

enum EventType : std::uint8_t {
  kInject,
  kArriveSwitch,
  kServiceDone,
  kArriveHost,
  kTick,
  kFlowStart,
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Duration TransmitTime(const Packet& pkt, double bandwidth_bps) {
  const double ns = static_cast<double>(PacketBytes(pkt)) * 8.0 * 1e9 / bandwidth_bps;
  return Duration(static_cast<std::int64_t>(std::ceil(ns)));
}

Duration ServiceTime(double rate_pps) {
  return Duration(static_cast<std::int64_t>(std::llround(1e9 / rate_pps)));
}

Packet TcpPacket(Ipv4 src, Ipv4 dst, std::uint16_t sport, std::uint16_t dport,
                 std::uint8_t flags) {
  Packet p;
  p.protocol = Protocol::kTcp;
  p.header.ip_src = src;
  p.header.ip_dst = dst;
  p.header.tp_src = sport;
  p.header.tp_dst = dport;
  p.tcp_flags = TcpFlags{flags};
  return p;
}

}  // namespace

Topology TopologySpec::Build() const {
  return kind == Kind::kFlat ? BuildFlat(hosts, link) : BuildTree(depth, fanout, link);
}

void Scenario::Validate() const {
  if (!(duration_s > 0)) throw ValidationError("duration_s must be > 0");
  if (!(switch_params.proc_rate_pps > 0)) {
    throw ValidationError("proc_rate_pps must be > 0");
  }
  if (switch_params.ct_cost.count() < 0) throw ValidationError("ct_cost must be >= 0");
  if (switch_params.queue_capacity == 0) {
    throw ValidationError("queue_capacity must be >= 1");
  }
  if (!(topology.link.bandwidth_bps > 0)) {
    throw ValidationError("link bandwidth must be > 0");
  }
  if (topology.link.latency.count() < 0) {
    throw ValidationError("link latency must be >= 0");
  }
  detection.Validate();
  for (const TrafficSpec& t : traffic) {
    std::visit(Overloaded{
                   [](const BenignTcp& b) {
                     if (b.flows == 0) throw ValidationError("benign_tcp: flows must be >= 1");
                   },
                   [](const SynFlood& f) {
                     if (f.count == 0) throw ValidationError("syn_flood: count must be >= 1");
                     if (!(f.rate_pps > 0)) {
                       throw ValidationError("syn_flood: rate_pps must be > 0");
                     }
                   },
                   [](const TableMissFlood& f) {
                     if (!(f.rate_pps > 0)) {
                       throw ValidationError("table_miss_flood: rate_pps must be > 0");
                     }
                     if (f.duration.count() <= 0) {
                       throw ValidationError("table_miss_flood: duration must be > 0");
                     }
                   },
               },
               t);
  }
}

std::vector<TimedPacket> GenSynFlood(const SynFlood& spec) {
  std::vector<TimedPacket> out;
  out.reserve(spec.count);
  for (std::uint64_t i = 0; i < spec.count; ++i) {
    const auto sport = static_cast<std::uint16_t>(
        spec.vary_src_port ? spec.src_port + i : spec.src_port);
    Packet p = TcpPacket(spec.src, spec.dst, sport, spec.dst_port, tcp::kSyn);
    p.seq = static_cast<std::uint32_t>(100 + i);
    const auto offset = static_cast<std::int64_t>(
        std::llround(static_cast<double>(i) * 1e9 / spec.rate_pps));
    p.ts = spec.start + Duration(offset);
    out.push_back({p.ts, p});
  }
  return out;
}

std::vector<TimedPacket> GenTableMissFlood(const TableMissFlood& spec,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ (std::uint64_t{spec.src.value()} * 0x9E3779B97F4A7C15ULL));
  std::vector<TimedPacket> out;
  for (std::uint64_t i = 0;; ++i) {
    const auto offset = static_cast<std::int64_t>(
        std::llround(static_cast<double>(i) * 1e9 / spec.rate_pps));
    if (offset >= spec.duration.count()) break;
    Packet p;
    p.protocol = Protocol::kUdp;
    p.header.ip_src = spec.src;
    p.header.ip_dst = Ipv4(0xAC100000u | static_cast<std::uint32_t>(rng() & 0xFFFFF));
    p.header.tp_src = static_cast<std::uint16_t>(rng() & 0xFFFF);
    p.header.tp_dst = static_cast<std::uint16_t>(rng() & 0xFFFF);
    p.ts = spec.start + Duration(offset);
    out.push_back({p.ts, p});
  }
  return out;
}

std::string_view FateName(Fate f) {
  switch (f) {
    case Fate::kInFlight:
      return "in_flight";
    case Fate::kDelivered:
      return "delivered";
    case Fate::kDroppedByRule:
      return "dropped_by_rule";
    case Fate::kDroppedByMitigation:
      return "dropped_by_mitigation";
    case Fate::kThrottledMiss:
      return "throttled_miss";
    case Fate::kPacketIn:
      return "packet_in";
    case Fate::kLostQueue:
      return "lost_queue";
  }
  return "?";
}

struct Simulation::SwitchState {
  SwitchId id = 0;
  FlowTable table{0, MissPolicy::kPacketIn};
  CtTable ct;
  std::unique_ptr<DfwAgent> agent;
  std::deque<std::size_t> queue;
  bool busy = false;
  std::size_t in_service = 0;
  std::optional<PortId> out_port;
  Fate pending_fate = Fate::kInFlight;
  bool used_ct = false;
  std::vector<FlowMod> installed;
  std::size_t decisions_published = 0;
  Subscription rules_watch;
};

struct Simulation::HostState {
  Ipv4 ip;
  MacAddr mac;
  SwitchId sw = 0;
  PortId port = 0;
  std::size_t link = 0;
};

struct Simulation::Event {
  SimTime t{0};
  std::uint64_t seq = 0;
  std::uint8_t type = 0;
  std::uint32_t a = 0;
  std::uint32_t c = 0;
  std::uint64_t b = 0;
};

bool Simulation::EventLater::operator()(const Event& x, const Event& y) const {
  return std::tie(x.t, x.seq) > std::tie(y.t, y.seq);
}

struct Simulation::FlowState {
  std::size_t client = 0;  // host indices
  std::size_t server = 0;
  std::uint16_t sport = 0;
  std::uint16_t dport = 0;
  std::uint64_t bytes = 0;
  std::int32_t pair = -1;
  bool answered = false;
};

Simulation::Simulation(Scenario scenario) : scenario_(std::move(scenario)) {
  scenario_.Validate();
  end_ = Seconds(scenario_.duration_s);
  Topology topo = scenario_.topology.Build();

  for (const Host& h : topo.hosts()) {
    HostState hs;
    hs.ip = h.ip;
    hs.mac = h.mac;
    hs.sw = h.attached_switch;
    hs.port = h.port;
    hs.link = *topo.LinkIndexAt(h.attached_switch, h.port);
    hosts_.push_back(hs);
  }
  link_busy_.assign(topo.links().size(), std::vector<SimTime>(2, SimTime{0}));

  CompileOptions opts;
  opts.stateful_enabled = scenario_.sdfw_enabled;
  controller_ = std::make_unique<Controller>(nib_, topo, scenario_.policies, opts);

  for (SwitchId id : topo.switches()) {
    auto s = std::make_unique<SwitchState>();
    s->id = id;
    if (scenario_.sdfw_enabled) {
      s->agent = std::make_unique<DfwAgent>(id, s->table, s->ct, scenario_.detection);
    }
    SwitchState* raw = s.get();
    s->rules_watch = nib_.Watch(Controller::RulesKey(id), [this, raw](const NibRecord& r) {
      std::vector<FlowMod> desired = DecodeFlowMods(Json::parse(r.value));
      for (const FlowMod& m : DiffRuleSets(raw->installed, desired)) {
        raw->table.Apply(m, now_);
      }
      raw->installed = std::move(desired);
    });
    switches_.emplace(id, std::move(s));
  }
  controller_->Start();
  nib_.Dispatch();

  const Topology& t = controller_->topology();
  auto host_index = [&](Ipv4 ip, const char* what) {
    auto idx = t.HostIndex(ip);
    if (!idx) {
      throw ValidationError(std::string(what) + ": unknown host " + ip.ToString());
    }
    return *idx;
  };

  for (const TrafficSpec& spec : scenario_.traffic) {
    std::visit(
        Overloaded{
            [&](const BenignTcp& b) {
              const std::size_t client = host_index(b.src, "benign_tcp src");
              const std::size_t server = host_index(b.dst, "benign_tcp dst");
              pairs_.push_back(PairMetrics{b.src, b.dst});
              for (std::uint32_t k = 0; k < b.flows; ++k) {
                FlowState f;
                f.client = client;
                f.server = server;
                f.sport = static_cast<std::uint16_t>(10000 + k);
                f.dport = b.dst_port;
                f.bytes = b.bytes_per_flow;
                f.pair = static_cast<std::int32_t>(pairs_.size() - 1);
                flows_.push_back(f);
                Schedule(b.start, kFlowStart, 0, flows_.size() - 1);
              }
            },
            [&](const SynFlood& f) {
              const std::size_t host = host_index(f.src, "syn_flood src");
              host_index(f.dst, "syn_flood dst");
              for (const TimedPacket& tp : GenSynFlood(f)) {
                if (tp.ts > end_) break;
                const std::size_t id = NewPacket(tp.pkt, PacketKind::kSynFlood, -1, false);
                Schedule(tp.ts, kInject, static_cast<std::uint32_t>(host), id);
              }
            },
            [&](const TableMissFlood& f) {
              const std::size_t host = host_index(f.src, "table_miss_flood src");
              for (const TimedPacket& tp : GenTableMissFlood(f, scenario_.seed)) {
                if (tp.ts > end_) break;
                const std::size_t id = NewPacket(tp.pkt, PacketKind::kMissFlood, -1, false);
                Schedule(tp.ts, kInject, static_cast<std::uint32_t>(host), id);
              }
            },
        },
        spec);
  }
  if (scenario_.sdfw_enabled) {
    Schedule(scenario_.detection.eval_interval, kTick, 0, 0);
  }
}

Simulation::~Simulation() = default;

const Topology& Simulation::topology() const { return controller_->topology(); }

const FlowTable& Simulation::table(SwitchId sw) const {
  auto it = switches_.find(sw);
  if (it == switches_.end()) throw NotFoundError("unknown switch " + std::to_string(sw));
  return it->second->table;
}

const CtTable& Simulation::conntrack(SwitchId sw) const {
  auto it = switches_.find(sw);
  if (it == switches_.end()) throw NotFoundError("unknown switch " + std::to_string(sw));
  return it->second->ct;
}

const DfwAgent* Simulation::agent(SwitchId sw) const {
  auto it = switches_.find(sw);
  if (it == switches_.end()) throw NotFoundError("unknown switch " + std::to_string(sw));
  return it->second->agent.get();
}

std::size_t Simulation::Inject(const Packet& pkt, SimTime at) {
  if (ran_) throw ValidationError("Inject after Run");
  auto host = topology().HostIndex(pkt.header.ip_src);
  if (!host) throw ValidationError("inject: unknown host " + pkt.header.ip_src.ToString());
  if (!IsWellFormed(pkt)) throw ValidationError("inject: malformed packet");
  const std::size_t id = NewPacket(pkt, PacketKind::kProbe, -1, pkt.payload_len > 0);
  Schedule(at, kInject, static_cast<std::uint32_t>(*host), id);
  return id;
}

void Simulation::Schedule(SimTime t, std::uint8_t type, std::uint32_t a,
                          std::uint64_t b, std::uint32_t c) {
  heap_.push_back(Event{t, next_seq_++, type, a, c, b});
  std::push_heap(heap_.begin(), heap_.end(), EventLater{});
}

std::size_t Simulation::NewPacket(const Packet& pkt, PacketKind kind,
                                  std::int32_t pair, bool data) {
  PacketRecord r;
  r.pkt = pkt;
  r.kind = kind;
  r.pair = pair;
  r.data = data;
  packets_.push_back(r);
  return packets_.size() - 1;
}

void Simulation::SendFromHost(std::size_t host, std::size_t pkt_id, SimTime now) {
  const HostState& h = hosts_[host];
  PacketRecord& r = packets_[pkt_id];
  r.pkt.header.eth_src = h.mac;
  if (const Host* dst = topology().FindHost(r.pkt.header.ip_dst)) {
    r.pkt.header.eth_dst = dst->mac;
  }
  const Link& link = topology().links()[h.link];
  SimTime& busy = link_busy_[h.link][0];  // host side is always endpoint a
  const SimTime depart = std::max(now, busy);
  busy = depart + TransmitTime(r.pkt, link.params.bandwidth_bps);
  r.injected = depart;
  Schedule(busy + link.params.latency, kArriveSwitch, h.sw, pkt_id, h.port);
}

void Simulation::SendOnLink(std::size_t link_idx, const Endpoint& from,
                            std::size_t pkt_id, SimTime now) {
  const Link& link = topology().links()[link_idx];
  const bool forward = link.a == from;
  if (!link.up) {
    SetFate(pkt_id, Fate::kDroppedByRule, now, from.id);
    return;
  }
  SimTime& busy = link_busy_[link_idx][forward ? 0 : 1];
  const SimTime depart = std::max(now, busy);
  busy = depart + TransmitTime(packets_[pkt_id].pkt, link.params.bandwidth_bps);
  const SimTime arrive = busy + link.params.latency;
  const Endpoint& to = forward ? link.b : link.a;
  if (to.kind == Endpoint::Kind::kHost) {
    Schedule(arrive, kArriveHost, to.id, pkt_id);
  } else {
    Schedule(arrive, kArriveSwitch, to.id, pkt_id, to.port);
  }
}

void Simulation::ArriveAtSwitch(SwitchId sw, PortId port, std::size_t pkt_id,
                                SimTime now) {
  SwitchState& s = *switches_.at(sw);
  packets_[pkt_id].pkt.header.in_port = port;
  if (s.queue.size() >= scenario_.switch_params.queue_capacity) {
    SetFate(pkt_id, Fate::kLostQueue, now, sw);
    return;
  }
  s.queue.push_back(pkt_id);
  if (!s.busy) StartService(s, now);
}

void Simulation::RunPipeline(SwitchState& s, std::size_t pkt_id) {
  Packet& pkt = packets_[pkt_id].pkt;
  s.out_port.reset();
  s.pending_fate = Fate::kDroppedByRule;
  s.used_ct = false;

  std::optional<ConnKey> tracked;
  LookupResult result = s.table.Lookup(pkt, std::nullopt);
  for (int pass = 0; pass < 2; ++pass) {
    if (std::holds_alternative<TableMiss>(result)) {
      if (s.table.miss_policy() == MissPolicy::kDrop) return;
      const Ipv4 src = pkt.header.ip_src;
      if (s.agent && s.agent->PacketInGuard(src, pkt.ts) == GuardVerdict::kThrottle) {
        s.pending_fate = Fate::kThrottledMiss;
        return;
      }
      ++packet_in_by_source_[src];
      s.pending_fate = Fate::kPacketIn;
      return;
    }
    const Matched& m = std::get<Matched>(result);
    if (m.actions.empty()) return;
    bool recirculate = false;
    for (const Action& a : m.actions) {
      CheckExecutable(a);
      if (const auto* ctl = std::get_if<action::SendToConntrack>(&a)) {
        if (tracked) return;  // a second trip through conntrack
        Classification c;
        s.used_ct = true;
        try {
          c = s.ct.Classify(pkt, CtZone{ctl->zone});
        } catch (const ClassificationError&) {
          return;
        }
        tracked = c.key;
        result = s.table.Lookup(pkt, c.state);
        recirculate = true;
        break;
      }
      if (const auto* out = std::get_if<action::Output>(&a)) {
        s.out_port = out->port;
        return;
      }
      if (const auto* out = std::get_if<action::CommitAndOutput>(&a)) {
        if (!tracked) return;
        s.ct.Commit(*tracked, pkt.ts);
        s.out_port = out->port;
        return;
      }
      if (std::holds_alternative<action::Drop>(a)) {
        if (s.agent && s.agent->IsMitigationRule(m.rule_id)) {
          s.pending_fate = Fate::kDroppedByMitigation;
        }
        return;
      }
      if (std::holds_alternative<action::PacketIn>(a)) {
        ++packet_in_by_source_[pkt.header.ip_src];
        s.pending_fate = Fate::kPacketIn;
        return;
      }
    }
    if (!recirculate) return;
  }
}

void Simulation::StartService(SwitchState& s, SimTime now) {
  const std::size_t id = s.queue.front();
  s.queue.pop_front();
  s.busy = true;
  s.in_service = id;
  PacketRecord& r = packets_[id];
  r.pkt.ts = now;
  ++r.hops;

  RunPipeline(s, id);
  s.ct.EndPass();
  Duration service = ServiceTime(scenario_.switch_params.proc_rate_pps);
  if (s.used_ct) service += scenario_.switch_params.ct_cost;
  Schedule(now + service, kServiceDone, s.id, id);
}

void Simulation::FinishService(SwitchId sw, SimTime now) {
  SwitchState& s = *switches_.at(sw);
  const std::size_t id = s.in_service;
  if (s.out_port) {
    auto link = topology().LinkIndexAt(sw, *s.out_port);
    if (link) {
      SendOnLink(*link, Endpoint{Endpoint::Kind::kSwitch, sw, *s.out_port}, id, now);
    } else {
      SetFate(id, Fate::kDroppedByRule, now, sw);
    }
  } else {
    SetFate(id, s.pending_fate, now, sw);
  }
  s.busy = false;
  if (!s.queue.empty()) StartService(s, now);
}

void Simulation::ArriveAtHost(std::size_t host, std::size_t pkt_id, SimTime now) {
  const HostState& h = hosts_[host];
  const PacketRecord r = packets_[pkt_id];
  if (r.pkt.header.ip_dst != h.ip) {
    SetFate(pkt_id, Fate::kDroppedByRule, now, 0);
    return;
  }
  SetFate(pkt_id, Fate::kDelivered, now, 0);
  if (r.data && r.pair >= 0) {
    PairMetrics& pm = pairs_[static_cast<std::size_t>(r.pair)];
    PairTrack& pt = pair_track_[static_cast<std::size_t>(r.pair)];
    pm.delivered_bytes += r.pkt.payload_len;
    ++pm.delivered_packets;
    pt.latency_sum_s += ToSeconds(now - r.injected);
    pt.last_delivery = std::max(pt.last_delivery, now);
  }
  if (r.pkt.protocol != Protocol::kTcp) return;

  const Ipv4 peer = r.pkt.header.ip_src;
  const std::uint16_t my_port = *r.pkt.header.tp_dst;
  const std::uint16_t peer_port = *r.pkt.header.tp_src;
  const TcpFlags flags = r.pkt.tcp_flags;
  if (flags.bits == tcp::kSyn) {
    // Every listener answers every opener.
    Packet reply = TcpPacket(h.ip, peer, my_port, peer_port, tcp::kSyn | tcp::kAck);
    reply.ack = r.pkt.seq + 1;
    const std::size_t id = NewPacket(reply, r.kind, -1, false);
    SendFromHost(host, id, now);
    return;
  }
  if (flags.bits != (tcp::kSyn | tcp::kAck)) return;
  auto it = flow_index_.find(FlowKey{h.ip, my_port, peer, peer_port});
  if (it == flow_index_.end()) return;  // not ours, e.g. a flooder's victim
  FlowState& f = flows_[it->second];
  if (f.answered) return;
  f.answered = true;

  Packet ack = TcpPacket(h.ip, peer, my_port, peer_port, tcp::kAck);
  ack.seq = 1;
  ack.ack = r.pkt.seq + 1;
  SendFromHost(host, NewPacket(ack, PacketKind::kBenign, f.pair, false), now);
  std::uint64_t offset = 0;
  while (offset < f.bytes) {
    Packet data = ack;
    data.payload_len = static_cast<std::uint32_t>(std::min<std::uint64_t>(kMss, f.bytes - offset));
    data.seq = static_cast<std::uint32_t>(1 + offset);
    offset += data.payload_len;
    SendFromHost(host, NewPacket(data, PacketKind::kBenign, f.pair, true), now);
  }
  Packet fin = TcpPacket(h.ip, peer, my_port, peer_port, tcp::kFin | tcp::kAck);
  fin.seq = static_cast<std::uint32_t>(1 + offset);
  fin.ack = ack.ack;
  SendFromHost(host, NewPacket(fin, PacketKind::kBenign, f.pair, false), now);
}

void Simulation::StartFlow(std::size_t flow, SimTime now) {
  const FlowState& f = flows_[flow];
  const HostState& c = hosts_[f.client];
  const HostState& srv = hosts_[f.server];
  flow_index_[FlowKey{c.ip, f.sport, srv.ip, f.dport}] = flow;
  const Packet syn = TcpPacket(c.ip, srv.ip, f.sport, f.dport, tcp::kSyn);
  const std::size_t id = NewPacket(syn, PacketKind::kBenign, f.pair, false);
  SendFromHost(f.client, id, now);
  PairTrack& pt = pair_track_[static_cast<std::size_t>(f.pair)];
  const SimTime sent = packets_[id].injected;
  if (!pt.first_send || sent < *pt.first_send) pt.first_send = sent;
}

void Simulation::Tick(SimTime now) {
  for (auto& [id, s] : switches_) {
    if (!s->agent) continue;
    s->agent->OnTick(now);
    s->agent->WithdrawIdle(now);
    const auto& decisions = s->agent->decisions();
    for (; s->decisions_published < decisions.size(); ++s->decisions_published) {
      controller_->PublishDecision(decisions[s->decisions_published]);
    }
    s->ct.Expire(now);
  }
  nib_.Dispatch();
  const SimTime next = now + scenario_.detection.eval_interval;
  if (next <= end_) Schedule(next, kTick, 0, 0);
}

void Simulation::SetFate(std::size_t pkt_id, Fate f, SimTime now, SwitchId sw) {
  PacketRecord& r = packets_[pkt_id];
  r.fate = f;
  r.fate_time = now;
  r.fate_switch = sw;
}

MetricsReport Simulation::Run() {
  if (ran_) throw ValidationError("simulation already ran");
  ran_ = true;
  pair_track_.resize(pairs_.size());
  while (!heap_.empty() && heap_.front().t <= end_) {
    std::pop_heap(heap_.begin(), heap_.end(), EventLater{});
    const Event e = heap_.back();
    heap_.pop_back();
    now_ = e.t;
    switch (e.type) {
      case kInject:
        SendFromHost(e.a, e.b, now_);
        break;
      case kArriveSwitch:
        ArriveAtSwitch(e.a, e.c, e.b, now_);
        break;
      case kServiceDone:
        FinishService(e.a, now_);
        break;
      case kArriveHost:
        ArriveAtHost(e.a, e.b, now_);
        break;
      case kTick:
        Tick(now_);
        break;
      case kFlowStart:
        StartFlow(e.b, now_);
        break;
    }
  }
  now_ = end_;
  return BuildReport();
}

MetricsReport Simulation::BuildReport() const {
  MetricsReport rep;
  rep.sdfw_enabled = scenario_.sdfw_enabled;
  rep.seed = scenario_.seed;
  rep.duration_s = scenario_.duration_s;

  rep.pairs = pairs_;
  double latency_sum = 0.0;
  std::uint64_t latency_n = 0;
  std::uint64_t total_bytes = 0;
  std::optional<SimTime> first_send;
  SimTime last_delivery{0};
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    PairMetrics& pm = rep.pairs[i];
    const PairTrack& pt = pair_track_[i];
    if (pm.delivered_packets > 0 && pt.first_send && pt.last_delivery > *pt.first_send) {
      pm.goodput_bps = static_cast<double>(pm.delivered_bytes) * 8.0 /
                       ToSeconds(pt.last_delivery - *pt.first_send);
      pm.mean_latency_s = pt.latency_sum_s / static_cast<double>(pm.delivered_packets);
    }
    rep.mean_goodput_bps += pm.goodput_bps;
    if (pm.delivered_packets > 0 && pt.first_send) {
      total_bytes += pm.delivered_bytes;
      if (!first_send || *pt.first_send < *first_send) first_send = pt.first_send;
      last_delivery = std::max(last_delivery, pt.last_delivery);
    }
    latency_sum += pt.latency_sum_s;
    latency_n += pm.delivered_packets;
  }
  if (!rep.pairs.empty()) rep.mean_goodput_bps /= static_cast<double>(rep.pairs.size());
  if (first_send && last_delivery > *first_send) {
    rep.aggregate_goodput_bps = static_cast<double>(total_bytes) * 8.0 /
                                ToSeconds(last_delivery - *first_send);
  }
  if (latency_n > 0) rep.mean_latency_s = latency_sum / static_cast<double>(latency_n);

  std::vector<SwitchReport> reports;
  std::vector<Mitigation> mitigations;
  for (const auto& [id, s] : switches_) {
    reports.push_back(MakeReport(id, s->table, s->agent.get(), end_));
    if (s->agent) {
      const auto& h = s->agent->history();
      mitigations.insert(mitigations.end(), h.begin(), h.end());
    }
  }
  std::stable_sort(mitigations.begin(), mitigations.end(),
                   [](const Mitigation& a, const Mitigation& b) {
                     return std::tie(a.installed_at, a.switch_id) <
                            std::tie(b.installed_at, b.switch_id);
                   });
  std::optional<SimTime> flood_start;
  for (const TrafficSpec& t : scenario_.traffic) {
    if (const auto* f = std::get_if<SynFlood>(&t)) {
      if (!flood_start || f->start < *flood_start) flood_start = f->start;
    }
  }
  for (const Mitigation& m : mitigations) {
    FlowRule rule;
    rule.rule_id = m.rule_id;
    rule.priority = m.flow_mod.priority;
    rule.match = m.flow_mod.match;
    rule.actions = m.flow_mod.actions;
    rep.mitigations.push_back(
        {m.switch_id, m.src, m.dst, ToSeconds(m.installed_at), RenderRule(rule)});
  }
  if (flood_start && !mitigations.empty()) {
    rep.detection_time_s = ToSeconds(mitigations.front().installed_at - *flood_start);
  }

  const FabricSnapshot snap = AggregateStats(reports);
  for (const Decision& d : snap.decisions) rep.decisions.push_back(RenderDecision(d));
  rep.switches = snap.per_switch;

  rep.packet_in_by_source = packet_in_by_source_;
  for (const auto& [src, n] : packet_in_by_source_) rep.packet_in_count += n;

  for (const PacketRecord& r : packets_) {
    ++rep.fates.injected;
    switch (r.fate) {
      case Fate::kInFlight:
        ++rep.fates.in_flight;
        break;
      case Fate::kDelivered:
        ++rep.fates.delivered;
        break;
      case Fate::kDroppedByRule:
        ++rep.fates.dropped_by_rule;
        break;
      case Fate::kDroppedByMitigation:
        ++rep.fates.dropped_by_mitigation;
        break;
      case Fate::kThrottledMiss:
        ++rep.fates.throttled_miss;
        break;
      case Fate::kPacketIn:
        ++rep.fates.packet_in;
        break;
      case Fate::kLostQueue:
        ++rep.fates.lost_queue;
        break;
    }
  }
  return rep;
}

MetricsReport RunScenario(const Scenario& scenario) {
  Simulation sim(scenario);
  return sim.Run();
}

}  // namespace sdfw
