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

// Packet, match and flow-rule vocabulary. A flow rule is the tuple
// (priority, protocol, header, actions, stats); protocol and header together
// form the MatchSpec.

#ifndef SDFW_CORE_MODEL_H_
#define SDFW_CORE_MODEL_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sdfw/net.h"

namespace sdfw {

// kOther stands for any non-TCP/UDP packet (ARP, ICMP...). It carries no
// transport ports and cannot be classified by conntrack.
enum class Protocol : std::uint8_t { kTcp, kUdp, kOther };

std::string_view ProtocolName(Protocol p);

namespace tcp {
inline constexpr std::uint8_t kSyn = 1 << 0;
inline constexpr std::uint8_t kAck = 1 << 1;
inline constexpr std::uint8_t kFin = 1 << 2;
inline constexpr std::uint8_t kRst = 1 << 3;
}  // namespace tcp

// TCP flag set. Empty for UDP.
struct TcpFlags {
  std::uint8_t bits = 0;

  constexpr bool has(std::uint8_t f) const { return (bits & f) == f; }
  std::string ToString() const;
  friend constexpr auto operator<=>(TcpFlags, TcpFlags) = default;
};

// Connection-tracking state flags with the +/- (set/unset) convention.
namespace ct {
inline constexpr std::uint8_t kTrk = 1 << 0;
inline constexpr std::uint8_t kNew = 1 << 1;
inline constexpr std::uint8_t kEst = 1 << 2;
inline constexpr std::uint8_t kRel = 1 << 3;  // reserved, never produced
inline constexpr std::uint8_t kAll = kTrk | kNew | kEst | kRel;
}  // namespace ct

struct CtState {
  std::uint8_t bits = 0;

  constexpr bool has(std::uint8_t f) const { return (bits & f) == f; }
  // "+trk+new" style.
  std::string ToString() const;
  friend constexpr auto operator<=>(CtState, CtState) = default;
};

struct PacketHeader {
  PortId in_port = 0;
  MacAddr eth_src;
  MacAddr eth_dst;
  Ipv4 ip_src;
  Ipv4 ip_dst;
  // Present iff the packet is TCP or UDP.
  std::optional<std::uint16_t> tp_src;
  std::optional<std::uint16_t> tp_dst;

  friend auto operator<=>(const PacketHeader&, const PacketHeader&) = default;
};

struct Packet {
  PacketHeader header;
  Protocol protocol = Protocol::kTcp;
  TcpFlags tcp_flags;
  std::uint32_t seq = 0;
  std::uint32_t ack = 0;
  std::uint32_t payload_len = 0;
  SimTime ts{0};

  friend bool operator==(const Packet&, const Packet&) = default;
};

// Transport ports present iff TCP/UDP; TCP flags only on TCP.
bool IsWellFormed(const Packet& pkt);

// Wire-size accounting: 54 header bytes plus payload. 1400 bare SYNs come out
// at 75600 bytes.
inline constexpr std::uint32_t kHeaderBytes = 54;
inline std::uint64_t PacketBytes(const Packet& pkt) {
  return kHeaderBytes + std::uint64_t{pkt.payload_len};
}

// Requirement on ct_state: flags in `set` must be set, flags in `unset` must
// be clear.
struct CtMatch {
  std::uint8_t set = 0;
  std::uint8_t unset = 0;

  static std::optional<CtMatch> Parse(std::string_view text);
  std::string ToString() const;
  friend constexpr auto operator<=>(CtMatch, CtMatch) = default;
};

// Each field is either an exact value or a wildcard (nullopt).
struct MatchSpec {
  std::optional<PortId> in_port;
  std::optional<MacAddr> eth_src;
  std::optional<MacAddr> eth_dst;
  std::optional<Ipv4> ip_src;
  std::optional<Ipv4> ip_dst;
  std::optional<std::uint16_t> tp_src;
  std::optional<std::uint16_t> tp_dst;
  std::optional<Protocol> protocol;
  std::optional<CtMatch> ct;

  friend auto operator<=>(const MatchSpec&, const MatchSpec&) = default;
};

namespace action {
struct Output {
  PortId port = 0;
  friend auto operator<=>(const Output&, const Output&) = default;
};
struct Drop {
  friend auto operator<=>(const Drop&, const Drop&) = default;
};
// ct(zone=Z,table=T): classify, then re-run the lookup in table T.
struct SendToConntrack {
  std::uint16_t zone = 0;
  std::uint8_t recirculate_table = 0;
  friend auto operator<=>(const SendToConntrack&,
                          const SendToConntrack&) = default;
};
// ct(commit),output:P
struct CommitAndOutput {
  PortId port = 0;
  friend auto operator<=>(const CommitAndOutput&,
                          const CommitAndOutput&) = default;
};
struct PacketIn {
  friend auto operator<=>(const PacketIn&, const PacketIn&) = default;
};
// Reserved countermeasures: constructible, not executable.
struct RateLimit {
  std::uint32_t pps = 0;
  friend auto operator<=>(const RateLimit&, const RateLimit&) = default;
};
struct RedirectHoneypot {
  friend auto operator<=>(const RedirectHoneypot&,
                          const RedirectHoneypot&) = default;
};
}  // namespace action

using Action = std::variant<action::Output, action::Drop,
                            action::SendToConntrack, action::CommitAndOutput,
                            action::PacketIn, action::RateLimit,
                            action::RedirectHoneypot>;

bool IsReserved(const Action& a);

// Throws UnimplementedError for reserved variants; otherwise a no-op. Used by
// executors before dispatching on the variant.
void CheckExecutable(const Action& a);

std::string ToString(const Action& a);
std::string ToString(const std::vector<Action>& actions);

struct RuleStats {
  Duration duration{0};
  std::uint64_t n_packets = 0;
  std::uint64_t n_bytes = 0;

  friend bool operator==(const RuleStats&, const RuleStats&) = default;
};

using RuleId = std::uint64_t;

struct FlowRule {
  RuleId rule_id = 0;
  std::uint16_t priority = 0;
  MatchSpec match;
  std::vector<Action> actions;
  RuleStats stats;

  friend bool operator==(const FlowRule&, const FlowRule&) = default;
};

// True iff every exact field of `spec` equals the packet's field and the ct
// requirement holds. `ct` == nullopt means the packet is untracked, which
// behaves as an all-clear flag set: only requirements with nothing in `set`
// (e.g. "-trk") or no requirement at all are satisfied.
bool HeaderMatches(const MatchSpec& spec, const Packet& pkt,
                   std::optional<CtState> ct);

// True iff some concrete packet (and reachable ct state) satisfies both.
bool SpecsOverlap(const MatchSpec& a, const MatchSpec& b);

// True iff every packet matched by `inner` is matched by `outer`.
bool SpecContains(const MatchSpec& outer, const MatchSpec& inner);

// Field-wise intersection; nullopt when the specs do not overlap.
std::optional<MatchSpec> Intersect(const MatchSpec& a, const MatchSpec& b);

// ct states a packet can actually carry: untracked (all clear), or +trk with
// at most one of new/est, rel optional.
const std::vector<CtState>& ReachableCtStates();

// True iff no packet can satisfy the spec (ports on a non-TCP/UDP protocol,
// or an unsatisfiable ct requirement).
bool IsEmpty(const MatchSpec& spec);

// "priority=50,ct_state=+new,tcp,nw_src=..,nw_dst=..,in_port=1"
std::string RenderMatch(std::uint16_t priority, const MatchSpec& match);
// Match fields only, "*" when fully wildcarded.
std::string RenderMatchFields(const MatchSpec& match);
// Rule body: "<match> actions=<actions>".
std::string RenderRule(const FlowRule& rule);
// Dump line with the stats prefix, as printed by a switch.
std::string RenderDumpLine(const FlowRule& rule, std::uint8_t table_id);
// ovs-ofctl add-flow argument form, e.g.
// "table=0, priority=51, nw_src=10.0.3.102,nw_dst=10.0.3.103,tcp actions=drop"
std::string RenderAddFlow(const FlowRule& rule, std::uint8_t table_id);

}  // namespace sdfw

#endif  // SDFW_CORE_MODEL_H_
