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

// Test-side reference implementations. None of these call into the code they
// check: matching, lookup, FlowMod replay, the TCP transition table, shortest
// paths and compiled-table walks are all re-derived here from the rules the
// library is supposed to follow.

#ifndef SDFW_TESTS_ORACLES_H_
#define SDFW_TESTS_ORACLES_H_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "sdfw/conntrack.h"
#include "sdfw/core_model.h"
#include "sdfw/flow_table.h"
#include "sdfw/topology.h"

namespace sdfw::oracle {

// Deterministic generator with explicit modulo mapping (std distributions
// differ between standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t Below(std::uint64_t n) { return g_() % n; }
  bool Percent(unsigned p) { return Below(100) < p; }
  template <class T>
  const T& Pick(const std::vector<T>& v) {
    return v[Below(v.size())];
  }

 private:
  std::mt19937_64 g_;
};

// ---- Mini header space: four values per field. ----

inline const std::vector<PortId>& MiniPorts() {
  static const std::vector<PortId> v{1, 2, 3, 4};
  return v;
}
inline const std::vector<MacAddr>& MiniMacs() {
  static const std::vector<MacAddr> v{MacAddr(1), MacAddr(2), MacAddr(3), MacAddr(4)};
  return v;
}
inline const std::vector<Ipv4>& MiniIps() {
  static const std::vector<Ipv4> v{Ipv4(10, 0, 0, 1), Ipv4(10, 0, 0, 2),
                                   Ipv4(10, 0, 0, 3), Ipv4(10, 0, 0, 4)};
  return v;
}
inline const std::vector<std::uint16_t>& MiniTp() {
  static const std::vector<std::uint16_t> v{22, 80, 443, 1024};
  return v;
}
inline const std::vector<Protocol>& MiniProtocols() {
  static const std::vector<Protocol> v{Protocol::kTcp, Protocol::kUdp, Protocol::kOther};
  return v;
}
// The ct_state values a real pipeline can produce (0 = untracked).
inline const std::vector<std::uint8_t>& MiniCtBits() {
  static const std::vector<std::uint8_t> v{
      0,
      ct::kTrk,
      ct::kTrk | ct::kNew,
      ct::kTrk | ct::kEst,
      ct::kTrk | ct::kRel,
      ct::kTrk | ct::kNew | ct::kRel,
      ct::kTrk | ct::kEst | ct::kRel};
  return v;
}

inline MatchSpec RandomSpec(Rng& rng, unsigned wildcard_pct = 60) {
  MatchSpec m;
  auto field = [&] { return !rng.Percent(wildcard_pct); };
  if (field()) m.in_port = rng.Pick(MiniPorts());
  if (field()) m.eth_src = rng.Pick(MiniMacs());
  if (field()) m.eth_dst = rng.Pick(MiniMacs());
  if (field()) m.ip_src = rng.Pick(MiniIps());
  if (field()) m.ip_dst = rng.Pick(MiniIps());
  if (field()) m.tp_src = rng.Pick(MiniTp());
  if (field()) m.tp_dst = rng.Pick(MiniTp());
  if (field()) m.protocol = rng.Pick(MiniProtocols());
  if (field()) {
    const auto set = static_cast<std::uint8_t>(rng.Below(16));
    const auto unset = static_cast<std::uint8_t>(rng.Below(16) & ~(rng.Percent(80) ? set : 0));
    m.ct = CtMatch{set, unset};
  }
  return m;
}

inline Packet MakePacket(PortId in_port, MacAddr es, MacAddr ed, Ipv4 s, Ipv4 d,
                         std::uint16_t sp, std::uint16_t dp, Protocol proto) {
  Packet p;
  p.header.in_port = in_port;
  p.header.eth_src = es;
  p.header.eth_dst = ed;
  p.header.ip_src = s;
  p.header.ip_dst = d;
  p.protocol = proto;
  if (proto != Protocol::kOther) {
    p.header.tp_src = sp;
    p.header.tp_dst = dp;
  }
  if (proto == Protocol::kTcp) p.tcp_flags = TcpFlags{tcp::kSyn};
  p.payload_len = static_cast<std::uint32_t>((sp * 7 + dp) % 200);
  return p;
}

inline Packet RandomPacket(Rng& rng) {
  return MakePacket(rng.Pick(MiniPorts()), rng.Pick(MiniMacs()), rng.Pick(MiniMacs()),
                    rng.Pick(MiniIps()), rng.Pick(MiniIps()), rng.Pick(MiniTp()),
                    rng.Pick(MiniTp()), rng.Pick(MiniProtocols()));
}

inline std::optional<CtState> RandomCt(Rng& rng) {
  const std::uint8_t bits = rng.Pick(MiniCtBits());
  if (bits == 0 && rng.Percent(50)) return std::nullopt;
  return CtState{bits};
}

// Set membership of one packet, written out field by field.
inline bool Matches(const MatchSpec& m, const Packet& p, std::optional<CtState> ct) {
  const Protocol proto = p.protocol;
  const bool has_ports = proto == Protocol::kTcp || proto == Protocol::kUdp;
  if (m.in_port && *m.in_port != p.header.in_port) return false;
  if (m.eth_src && *m.eth_src != p.header.eth_src) return false;
  if (m.eth_dst && *m.eth_dst != p.header.eth_dst) return false;
  if (m.ip_src && *m.ip_src != p.header.ip_src) return false;
  if (m.ip_dst && *m.ip_dst != p.header.ip_dst) return false;
  if (m.protocol && *m.protocol != proto) return false;
  if (m.tp_src && (!has_ports || *m.tp_src != *p.header.tp_src)) return false;
  if (m.tp_dst && (!has_ports || *m.tp_dst != *p.header.tp_dst)) return false;
  if (m.ct) {
    const std::uint8_t bits = ct ? ct->bits : 0;
    for (int b = 0; b < 4; ++b) {
      const std::uint8_t f = static_cast<std::uint8_t>(1 << b);
      if ((m.ct->set & f) && !(bits & f)) return false;
      if ((m.ct->unset & f) && (bits & f)) return false;
    }
  }
  return true;
}

// Calls fn(packet, ct) for every packet of the mini space that can tell the
// given specs apart. A field no spec constrains takes one value only, which
// loses nothing since no spec can distinguish its values.
template <class Fn>
bool ForEachRelevant(const std::vector<const MatchSpec*>& specs, Fn fn) {
  auto used = [&](auto member) {
    return std::any_of(specs.begin(), specs.end(),
                       [&](const MatchSpec* s) { return (s->*member).has_value(); });
  };
  auto values = [&](auto member, const auto& all) {
    using V = std::decay_t<decltype(all[0])>;
    return used(member) ? all : std::vector<V>{all[0]};
  };
  const auto ports = values(&MatchSpec::in_port, MiniPorts());
  const auto es = values(&MatchSpec::eth_src, MiniMacs());
  const auto ed = values(&MatchSpec::eth_dst, MiniMacs());
  const auto is = values(&MatchSpec::ip_src, MiniIps());
  const auto id = values(&MatchSpec::ip_dst, MiniIps());
  const auto ts = values(&MatchSpec::tp_src, MiniTp());
  const auto td = values(&MatchSpec::tp_dst, MiniTp());
  for (PortId a : ports)
    for (MacAddr b : es)
      for (MacAddr c : ed)
        for (Ipv4 d : is)
          for (Ipv4 e : id)
            for (std::uint16_t f : ts)
              for (std::uint16_t g : td)
                for (Protocol h : MiniProtocols())
                  for (std::uint8_t bits : MiniCtBits()) {
                    const Packet p = MakePacket(a, b, c, d, e, f, g, h);
                    if (fn(p, CtState{bits})) return true;
                  }
  return false;
}

// Is there a packet matched by both?
inline bool Overlap(const MatchSpec& a, const MatchSpec& b) {
  return ForEachRelevant({&a, &b}, [&](const Packet& p, std::optional<CtState> ct) {
    return Matches(a, p, ct) && Matches(b, p, ct);
  });
}

// Does every packet matched by inner also match outer?
inline bool Contains(const MatchSpec& outer, const MatchSpec& inner) {
  const bool counterexample =
      ForEachRelevant({&outer, &inner}, [&](const Packet& p, std::optional<CtState> ct) {
        return Matches(inner, p, ct) && !Matches(outer, p, ct);
      });
  return !counterexample;
}

// ---- Flow table reference ----

struct RefRule {
  std::uint64_t seq = 0;  // install order
  std::uint16_t priority = 0;
  MatchSpec match;
  std::vector<Action> actions;
  std::uint64_t n_packets = 0;
  std::uint64_t n_bytes = 0;
};

// Rules kept in install order; every lookup scans all of them.
class RefTable {
 public:
  // Index into rules() of the winner, or nullopt on a miss.
  std::optional<std::size_t> Lookup(const Packet& p, std::optional<CtState> ct) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (!Matches(rules_[i].match, p, ct)) continue;
      if (!best || rules_[i].priority > rules_[*best].priority) best = i;
    }
    if (best) {
      rules_[*best].n_packets += 1;
      rules_[*best].n_bytes += 54 + p.payload_len;
    }
    return best;
  }

  void Apply(const FlowMod& m) {
    switch (m.op) {
      case FlowModOp::kAdd:
        std::erase_if(rules_, [&](const RefRule& r) {
          return r.priority == m.priority && r.match == m.match;
        });
        rules_.push_back(RefRule{next_seq_++, m.priority, m.match, m.actions});
        break;
      case FlowModOp::kModify:
        for (RefRule& r : rules_) {
          if (r.priority == m.priority && r.match == m.match) r.actions = m.actions;
        }
        break;
      case FlowModOp::kDelete:
        std::erase_if(rules_, [&](const RefRule& r) {
          return r.match == m.match && (!m.strict || r.priority == m.priority);
        });
        break;
    }
  }

  // (priority, match, actions, n_packets, n_bytes) in lookup order.
  std::vector<std::tuple<std::uint16_t, MatchSpec, std::vector<Action>, std::uint64_t,
                         std::uint64_t>>
  Canonical() const {
    std::vector<const RefRule*> order;
    for (const RefRule& r : rules_) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(), [](const RefRule* a, const RefRule* b) {
      return a->priority > b->priority;
    });
    std::vector<std::tuple<std::uint16_t, MatchSpec, std::vector<Action>, std::uint64_t,
                           std::uint64_t>>
        out;
    for (const RefRule* r : order) {
      out.emplace_back(r->priority, r->match, r->actions, r->n_packets, r->n_bytes);
    }
    return out;
  }

  const std::vector<RefRule>& rules() const { return rules_; }

 private:
  std::vector<RefRule> rules_;
  std::uint64_t next_seq_ = 0;
};

inline std::vector<std::tuple<std::uint16_t, MatchSpec, std::vector<Action>, std::uint64_t,
                              std::uint64_t>>
Canonical(const FlowTable& t) {
  std::vector<std::tuple<std::uint16_t, MatchSpec, std::vector<Action>, std::uint64_t,
                         std::uint64_t>>
      out;
  for (const FlowRule& r : t.rules()) {
    out.emplace_back(r.priority, r.match, r.actions, r.stats.n_packets, r.stats.n_bytes);
  }
  return out;
}

// ---- TCP transition table ----
//
// Rows: CLOSED, SYN_SENT, SYN_RECV, ESTABLISHED, CLOSING.
// Columns: the five segments in the original direction, then the same five
// in the reply direction.

enum Seg { kSegSyn, kSegSynAck, kSegAck, kSegFin, kSegRst, kSegCount };

inline TcpFlags SegFlags(int seg) {
  switch (seg) {
    case kSegSyn:
      return TcpFlags{tcp::kSyn};
    case kSegSynAck:
      return TcpFlags{tcp::kSyn | tcp::kAck};
    case kSegAck:
      return TcpFlags{tcp::kAck};
    case kSegFin:
      return TcpFlags{tcp::kFin};
    default:
      return TcpFlags{tcp::kRst};
  }
}

inline TcpState RefNextState(TcpState s, int symbol) {
  using T = TcpState;
  static const std::map<T, int> row{{T::kClosed, 0},      {T::kSynSent, 1},
                                    {T::kSynRecv, 2},     {T::kEstablished, 3},
                                    {T::kClosing, 4}};
  constexpr T C = T::kClosed, SS = T::kSynSent, SR = T::kSynRecv,
              E = T::kEstablished, CL = T::kClosing;
  //                    orig: SYN SYNACK ACK FIN RST | reply: SYN SYNACK ACK FIN RST
  static const T table[5][10] = {
      /* CLOSED   */ {SS, C, C, C, C, /**/ C, C, C, C, C},
      /* SYN_SENT */ {SS, SS, SS, SS, C, /**/ SS, SR, SS, SS, C},
      /* SYN_RECV */ {SR, SR, E, SR, C, /**/ SR, SR, SR, SR, C},
      /* EST      */ {E, E, E, CL, C, /**/ E, E, E, CL, C},
      /* CLOSING  */ {CL, CL, CL, CL, C, /**/ CL, CL, CL, CL, C},
  };
  return table[row.at(s)][symbol];
}

// ---- Topology references ----

// Switch adjacency over up switch-switch links: sw -> (neighbor, out port).
inline std::map<SwitchId, std::vector<std::pair<SwitchId, PortId>>> Adjacency(
    const Topology& t) {
  std::map<SwitchId, std::vector<std::pair<SwitchId, PortId>>> adj;
  for (const Link& l : t.links()) {
    if (!l.up || l.a.kind != Endpoint::Kind::kSwitch || l.b.kind != Endpoint::Kind::kSwitch) {
      continue;
    }
    adj[l.a.id].push_back({l.b.id, l.a.port});
    adj[l.b.id].push_back({l.a.id, l.b.port});
  }
  return adj;
}

// All shortest switch sequences between two switches, by exhaustive BFS over
// (path) states. Fine for the small topologies the tests use.
inline std::vector<std::vector<SwitchId>> AllShortestPaths(const Topology& t, SwitchId from,
                                                           SwitchId to) {
  const auto adj = Adjacency(t);
  std::vector<std::vector<SwitchId>> done;
  std::deque<std::vector<SwitchId>> q{{from}};
  std::size_t best = SIZE_MAX;
  while (!q.empty()) {
    std::vector<SwitchId> path = q.front();
    q.pop_front();
    if (path.size() > best) break;
    if (path.back() == to) {
      best = path.size();
      done.push_back(path);
      continue;
    }
    auto it = adj.find(path.back());
    if (it == adj.end()) continue;
    for (const auto& [next, port] : it->second) {
      if (std::find(path.begin(), path.end(), next) != path.end()) continue;
      std::vector<SwitchId> longer = path;
      longer.push_back(next);
      q.push_back(std::move(longer));
    }
  }
  std::sort(done.begin(), done.end());
  return done;
}

// Outcome of pushing one packet through per-switch tables, following output
// ports over the topology. Conntrack is emulated with a trivially fresh
// connection: the first pass is untracked, after ct() the packet is +trk+new.
struct Walk {
  enum class End { kDelivered, kDropped, kMiss, kLoop } end = End::kDropped;
  SwitchId last_switch = 0;
  std::vector<SwitchId> switches;
};

inline Walk WalkPacket(const Topology& t, const std::map<SwitchId, std::vector<FlowMod>>& rules,
                       Packet p) {
  Walk w;
  const Host* src = t.FindHost(p.header.ip_src);
  if (src == nullptr) return w;
  SwitchId sw = src->attached_switch;
  PortId in = src->port;
  for (int hop = 0; hop < 64; ++hop) {
    w.switches.push_back(sw);
    w.last_switch = sw;
    p.header.in_port = in;
    auto it = rules.find(sw);
    std::optional<CtState> ct;
    std::optional<PortId> out;
    bool finished = false;
    for (int pass = 0; pass < 2 && !finished; ++pass) {
      const FlowMod* best = nullptr;
      if (it != rules.end()) {
        for (const FlowMod& m : it->second) {
          if (!Matches(m.match, p, ct)) continue;
          if (best == nullptr || m.priority > best->priority) best = &m;
        }
      }
      if (best == nullptr) {
        w.end = Walk::End::kMiss;
        return w;
      }
      if (best->actions.empty()) {
        w.end = Walk::End::kDropped;
        return w;
      }
      const Action& a = best->actions.front();
      if (std::holds_alternative<action::SendToConntrack>(a) && !ct) {
        ct = CtState{ct::kTrk | ct::kNew};
        continue;
      }
      if (const auto* o = std::get_if<action::Output>(&a)) out = o->port;
      if (const auto* o = std::get_if<action::CommitAndOutput>(&a)) out = o->port;
      finished = true;
    }
    if (!out) {
      w.end = Walk::End::kDropped;
      return w;
    }
    const Link* l = t.LinkAt(sw, *out);
    if (l == nullptr || !l->up) {
      w.end = Walk::End::kDropped;
      return w;
    }
    const bool from_a = l->a.kind == Endpoint::Kind::kSwitch && l->a.id == sw && l->a.port == *out;
    const Endpoint& far = from_a ? l->b : l->a;
    if (far.kind == Endpoint::Kind::kHost) {
      w.end = t.hosts()[far.id].ip == p.header.ip_dst ? Walk::End::kDelivered
                                                     : Walk::End::kDropped;
      return w;
    }
    sw = far.id;
    in = far.port;
  }
  w.end = Walk::End::kLoop;
  return w;
}

}  // namespace sdfw::oracle

#endif  // SDFW_TESTS_ORACLES_H_
