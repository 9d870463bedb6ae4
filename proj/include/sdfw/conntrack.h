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

// Per-switch connection tracking.
//
// A packet handed to conntrack is looked up by its 5-tuple within a zone,
// first in its own orientation and then reversed; a hit on the reversed key
// makes it a reply-direction packet of that connection. Unknown connections
// get a tentative entry that lives until the end of the current pipeline pass
// unless committed.
//
// Classification is computed after the packet has advanced the TCP state
// machine:
//   - no committed entry                               -> +trk+new
//   - committed, original direction, ESTABLISHED/CLOSING -> +trk+est
//   - committed, reply direction, past SYN_SENT         -> +trk+est
//   - otherwise (half-open, closed)                     -> +trk+new
// Retransmitted SYNs on a committed half-open connection therefore keep
// matching ct_state=+new rules, which is what lets a flood pile up on the
// +new counter while the +est counter stays at zero.

#ifndef SDFW_CONNTRACK_H_
#define SDFW_CONNTRACK_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdfw/core_model.h"

namespace sdfw {

struct CtZone {
  std::uint16_t id = 0;
  friend constexpr auto operator<=>(CtZone, CtZone) = default;
};

// Stored in originator orientation.
struct ConnKey {
  CtZone zone;
  Protocol proto = Protocol::kTcp;
  Ipv4 ip_src;
  Ipv4 ip_dst;
  std::uint16_t tp_src = 0;
  std::uint16_t tp_dst = 0;

  ConnKey Reversed() const;
  friend auto operator<=>(const ConnKey&, const ConnKey&) = default;
};

enum class Direction : std::uint8_t { kOriginal, kReply };

enum class TcpState : std::uint8_t {
  kSynSent,
  kSynRecv,
  kEstablished,
  kClosing,
  kClosed,
};

std::string_view TcpStateName(TcpState s);

struct ConnEntry {
  ConnKey key;
  TcpState tcp_state = TcpState::kClosed;
  // UDP only: a reply has been seen (NEW -> ESTABLISHED).
  bool reply_seen = false;
  bool committed = false;
  SimTime created_at{0};
  SimTime last_seen{0};
  std::uint64_t orig_packets = 0;
  std::uint64_t reply_packets = 0;
  std::uint32_t last_seq_seen = 0;
};

enum class CtEventKind : std::uint8_t { kNewConn, kStateChange, kExpired, kCommitted };

std::string_view CtEventKindName(CtEventKind k);

struct CtEvent {
  CtEventKind kind = CtEventKind::kNewConn;
  ConnKey key;
  TcpState old_state = TcpState::kClosed;
  TcpState new_state = TcpState::kClosed;
  SimTime ts{0};
};

// Pure transition function of the TCP machine. Flags are reduced to one
// segment kind in the order RST, FIN, SYN+ACK, SYN, ACK:
//   RST (either)                   -> CLOSED
//   FIN (either) from ESTABLISHED  -> CLOSING
//   SYN+ACK (reply) from SYN_SENT  -> SYN_RECV
//   SYN (orig) from CLOSED         -> SYN_SENT
//   ACK (orig) from SYN_RECV       -> ESTABLISHED
// Everything else leaves the state unchanged.
TcpState NextTcpState(TcpState current, TcpFlags flags, Direction dir);

struct StateAdvance {
  TcpState new_state;
  std::optional<CtEvent> event;  // StateChange iff the state moved
};

// Applies `pkt` to `entry`: counters, last_seen, last_seq_seen and (for TCP)
// the state machine.
StateAdvance AdvanceState(ConnEntry& entry, const Packet& pkt, Direction dir);

struct CtTimeouts {
  Duration syn = std::chrono::seconds(30);
  Duration established = std::chrono::seconds(600);
  Duration closing = std::chrono::seconds(10);
  Duration udp = std::chrono::seconds(60);
};

struct Classification {
  CtState state;
  ConnKey key;  // originator orientation
  Direction direction = Direction::kOriginal;
};

struct HalfOpenStats {
  std::uint64_t half_open = 0;
  std::uint64_t established = 0;
  friend bool operator==(const HalfOpenStats&, const HalfOpenStats&) = default;
};

class CtTable {
 public:
  using Listener = std::function<void(const CtEvent&)>;

  explicit CtTable(CtTimeouts timeouts = {});

  // Throws ClassificationError for non-TCP/UDP packets.
  Classification Classify(const Packet& pkt, CtZone zone);

  // Returns the Committed event on the first commit, nullopt afterwards.
  // Throws NotFoundError for unknown keys.
  std::optional<CtEvent> Commit(const ConnKey& key, SimTime now);

  // Drops tentative (uncommitted) entries; call at the end of every pass.
  void EndPass();

  // Removes entries idle longer than their per-state timeout.
  std::vector<CtEvent> Expire(SimTime now);

  // Committed entries towards `dst` created in [now - window, now]: half-open
  // (SYN_SENT/SYN_RECV) versus ESTABLISHED.
  HalfOpenStats HalfOpen(Ipv4 dst, SimTime now, Duration window) const;

  const ConnEntry* Find(const ConnKey& key) const;
  std::size_t size() const { return entries_.size(); }
  std::vector<ConnEntry> Entries() const;

  // `zone=Z proto=tcp src=a:p dst=b:q state=SYN_SENT committed=1 age=1.000s`
  std::string Dump(SimTime now) const;

  void set_listener(Listener l) { listener_ = std::move(l); }
  const CtTimeouts& timeouts() const { return timeouts_; }

 private:
  void Emit(const CtEvent& e);
  Duration TimeoutFor(const ConnEntry& e) const;

  CtTimeouts timeouts_;
  std::map<ConnKey, ConnEntry> entries_;
  std::vector<ConnKey> tentative_;
  Listener listener_;
};

// Key of `pkt` in its own orientation. Throws ClassificationError for
// non-TCP/UDP packets.
ConnKey KeyOf(const Packet& pkt, CtZone zone);

}  // namespace sdfw

#endif  // SDFW_CONNTRACK_H_
