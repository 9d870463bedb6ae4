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

#include "sdfw/conntrack.h"

#include <algorithm>
#include <cstdio>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

enum class Segment { kRst, kFin, kSynAck, kSyn, kAck, kNone };

Segment SegmentOf(TcpFlags f) {
  if (f.has(tcp::kRst)) return Segment::kRst;
  if (f.has(tcp::kFin)) return Segment::kFin;
  if (f.has(tcp::kSyn) && f.has(tcp::kAck)) return Segment::kSynAck;
  if (f.has(tcp::kSyn)) return Segment::kSyn;
  if (f.has(tcp::kAck)) return Segment::kAck;
  return Segment::kNone;
}

bool IsEstablishedFor(const ConnEntry& e, Direction dir) {
  if (e.key.proto == Protocol::kUdp) return e.reply_seen;
  if (dir == Direction::kReply) return e.tcp_state != TcpState::kSynSent;
  return e.tcp_state == TcpState::kEstablished ||
         e.tcp_state == TcpState::kClosing;
}

}  // namespace

ConnKey ConnKey::Reversed() const {
  return ConnKey{zone, proto, ip_dst, ip_src, tp_dst, tp_src};
}

std::string_view TcpStateName(TcpState s) {
  switch (s) {
    case TcpState::kSynSent:
      return "SYN_SENT";
    case TcpState::kSynRecv:
      return "SYN_RECV";
    case TcpState::kEstablished:
      return "ESTABLISHED";
    case TcpState::kClosing:
      return "CLOSING";
    case TcpState::kClosed:
      return "CLOSED";
  }
  return "?";
}

std::string_view CtEventKindName(CtEventKind k) {
  switch (k) {
    case CtEventKind::kNewConn:
      return "NEW_CONN";
    case CtEventKind::kStateChange:
      return "STATE_CHANGE";
    case CtEventKind::kExpired:
      return "EXPIRED";
    case CtEventKind::kCommitted:
      return "COMMITTED";
  }
  return "?";
}

TcpState NextTcpState(TcpState current, TcpFlags flags, Direction dir) {
  const bool orig = dir == Direction::kOriginal;
  switch (SegmentOf(flags)) {
    case Segment::kRst:
      return TcpState::kClosed;
    case Segment::kFin:
      return current == TcpState::kEstablished ? TcpState::kClosing : current;
    case Segment::kSynAck:
      return (!orig && current == TcpState::kSynSent) ? TcpState::kSynRecv
                                                      : current;
    case Segment::kSyn:
      return (orig && current == TcpState::kClosed) ? TcpState::kSynSent
                                                    : current;
    case Segment::kAck:
      return (orig && current == TcpState::kSynRecv) ? TcpState::kEstablished
                                                     : current;
    case Segment::kNone:
      return current;
  }
  return current;
}

StateAdvance AdvanceState(ConnEntry& entry, const Packet& pkt, Direction dir) {
  entry.last_seen = std::max(entry.last_seen, pkt.ts);
  if (dir == Direction::kOriginal) {
    ++entry.orig_packets;
    entry.last_seq_seen = pkt.seq;
  } else {
    ++entry.reply_packets;
  }
  if (entry.key.proto != Protocol::kTcp) {
    if (dir == Direction::kReply) entry.reply_seen = true;
    return StateAdvance{entry.tcp_state, std::nullopt};
  }
  const TcpState old_state = entry.tcp_state;
  entry.tcp_state = NextTcpState(old_state, pkt.tcp_flags, dir);
  if (entry.tcp_state == old_state) return StateAdvance{old_state, std::nullopt};
  return StateAdvance{
      entry.tcp_state,
      CtEvent{CtEventKind::kStateChange, entry.key, old_state, entry.tcp_state,
              entry.last_seen}};
}

ConnKey KeyOf(const Packet& pkt, CtZone zone) {
  if (pkt.protocol != Protocol::kTcp && pkt.protocol != Protocol::kUdp) {
    throw ClassificationError("conntrack handles TCP/UDP only, got " +
                              std::string(ProtocolName(pkt.protocol)));
  }
  if (!pkt.header.tp_src || !pkt.header.tp_dst) {
    throw ClassificationError("TCP/UDP packet without transport ports");
  }
  return ConnKey{zone,
                 pkt.protocol,
                 pkt.header.ip_src,
                 pkt.header.ip_dst,
                 *pkt.header.tp_src,
                 *pkt.header.tp_dst};
}

CtTable::CtTable(CtTimeouts timeouts) : timeouts_(timeouts) {}

void CtTable::Emit(const CtEvent& e) {
  if (listener_) listener_(e);
}

Classification CtTable::Classify(const Packet& pkt, CtZone zone) {
  const ConnKey key = KeyOf(pkt, zone);
  auto it = entries_.find(key);
  Direction dir = Direction::kOriginal;
  if (it == entries_.end()) {
    auto rev = entries_.find(key.Reversed());
    if (rev != entries_.end()) {
      it = rev;
      dir = Direction::kReply;
    }
  }

  if (it == entries_.end()) {
    ConnEntry entry;
    entry.key = key;
    entry.created_at = pkt.ts;
    entry.last_seen = pkt.ts;
    it = entries_.emplace(key, entry).first;
    tentative_.push_back(key);
    AdvanceState(it->second, pkt, dir);
    Emit(CtEvent{CtEventKind::kNewConn, key, TcpState::kClosed,
                 it->second.tcp_state, pkt.ts});
    return Classification{CtState{ct::kTrk | ct::kNew}, key, dir};
  }

  ConnEntry& entry = it->second;
  const StateAdvance adv = AdvanceState(entry, pkt, dir);
  if (adv.event && entry.committed) Emit(*adv.event);
  const bool est = entry.committed && IsEstablishedFor(entry, dir);
  return Classification{CtState{static_cast<std::uint8_t>(
                            ct::kTrk | (est ? ct::kEst : ct::kNew))},
                        entry.key, dir};
}

std::optional<CtEvent> CtTable::Commit(const ConnKey& key, SimTime now) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw NotFoundError("commit of unknown connection");
  }
  ConnEntry& entry = it->second;
  if (entry.committed) return std::nullopt;
  entry.committed = true;
  std::erase(tentative_, key);
  CtEvent e{CtEventKind::kCommitted, key, entry.tcp_state, entry.tcp_state,
            std::max(now, entry.last_seen)};
  Emit(e);
  return e;
}

void CtTable::EndPass() {
  for (const ConnKey& k : tentative_) {
    auto it = entries_.find(k);
    if (it != entries_.end() && !it->second.committed) entries_.erase(it);
  }
  tentative_.clear();
}

Duration CtTable::TimeoutFor(const ConnEntry& e) const {
  if (e.key.proto == Protocol::kUdp) return timeouts_.udp;
  switch (e.tcp_state) {
    case TcpState::kSynSent:
    case TcpState::kSynRecv:
      return timeouts_.syn;
    case TcpState::kEstablished:
      return timeouts_.established;
    case TcpState::kClosing:
    case TcpState::kClosed:
      return timeouts_.closing;
  }
  return timeouts_.closing;
}

std::vector<CtEvent> CtTable::Expire(SimTime now) {
  std::vector<CtEvent> out;
  for (auto it = entries_.begin(); it != entries_.end();) {
    const ConnEntry& e = it->second;
    if (now - e.last_seen > TimeoutFor(e)) {
      out.push_back(CtEvent{CtEventKind::kExpired, e.key, e.tcp_state,
                            TcpState::kClosed, now});
      it = entries_.erase(it);
    } else {
      ++it;
    }
  }
  for (const CtEvent& e : out) Emit(e);
  return out;
}

HalfOpenStats CtTable::HalfOpen(Ipv4 dst, SimTime now, Duration window) const {
  HalfOpenStats stats;
  for (const auto& [key, e] : entries_) {
    if (!e.committed || key.proto != Protocol::kTcp || key.ip_dst != dst) {
      continue;
    }
    if (e.created_at < now - window || e.created_at > now) continue;
    if (e.tcp_state == TcpState::kSynSent || e.tcp_state == TcpState::kSynRecv) {
      ++stats.half_open;
    } else if (e.tcp_state == TcpState::kEstablished) {
      ++stats.established;
    }
  }
  return stats;
}

const ConnEntry* CtTable::Find(const ConnKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<ConnEntry> CtTable::Entries() const {
  std::vector<ConnEntry> out;
  out.reserve(entries_.size());
  for (const auto& [key, e] : entries_) out.push_back(e);
  return out;
}

std::string CtTable::Dump(SimTime now) const {
  std::string out;
  char line[256];
  for (const auto& [key, e] : entries_) {
    const std::string_view state =
        key.proto == Protocol::kUdp
            ? (e.reply_seen ? std::string_view("ESTABLISHED")
                            : std::string_view("NEW"))
            : TcpStateName(e.tcp_state);
    std::snprintf(line, sizeof(line),
                  "zone=%u proto=%s src=%s:%u dst=%s:%u state=%.*s "
                  "committed=%d age=%.3fs\n",
                  key.zone.id, std::string(ProtocolName(key.proto)).c_str(),
                  key.ip_src.ToString().c_str(), key.tp_src,
                  key.ip_dst.ToString().c_str(), key.tp_dst,
                  static_cast<int>(state.size()), state.data(),
                  e.committed ? 1 : 0, ToSeconds(now - e.created_at));
    out += line;
  }
  return out;
}

}  // namespace sdfw
