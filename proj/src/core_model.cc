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

#include "sdfw/core_model.h"

#include <cstdio>
#include <type_traits>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

template <typename T>
bool FieldMatches(const std::optional<T>& want, const T& have) {
  return !want.has_value() || *want == have;
}

template <typename T>
bool FieldMatches(const std::optional<T>& want, const std::optional<T>& have) {
  return !want.has_value() || (have.has_value() && *want == *have);
}

bool CtSatisfies(const CtMatch& m, CtState s) {
  return (s.bits & m.set) == m.set && (s.bits & m.unset) == 0;
}

template <typename T>
bool FieldsCompatible(const std::optional<T>& a, const std::optional<T>& b) {
  return !a.has_value() || !b.has_value() || *a == *b;
}

template <typename T>
bool FieldContains(const std::optional<T>& outer, const std::optional<T>& inner) {
  return !outer.has_value() || (inner.has_value() && *outer == *inner);
}

template <typename T>
std::optional<T> FieldIntersect(const std::optional<T>& a,
                                const std::optional<T>& b) {
  return a.has_value() ? a : b;
}

bool CtRequirementSatisfiable(const std::optional<CtMatch>& m) {
  if (!m.has_value()) return true;
  for (CtState s : ReachableCtStates()) {
    if (CtSatisfies(*m, s)) return true;
  }
  return false;
}

bool HasPorts(const MatchSpec& s) {
  return s.tp_src.has_value() || s.tp_dst.has_value();
}

void AppendField(std::string& out, std::string_view text) {
  if (!out.empty()) out += ',';
  out += text;
}

// Header fields in dump order (everything but priority, ct and protocol).
void AppendHeaderFields(std::string& out, const MatchSpec& m) {
  if (m.eth_src) AppendField(out, "dl_src=" + m.eth_src->ToString());
  if (m.eth_dst) AppendField(out, "dl_dst=" + m.eth_dst->ToString());
  if (m.ip_src) AppendField(out, "nw_src=" + m.ip_src->ToString());
  if (m.ip_dst) AppendField(out, "nw_dst=" + m.ip_dst->ToString());
  if (m.tp_src) AppendField(out, "tp_src=" + std::to_string(*m.tp_src));
  if (m.tp_dst) AppendField(out, "tp_dst=" + std::to_string(*m.tp_dst));
  if (m.in_port) AppendField(out, "in_port=" + std::to_string(*m.in_port));
}

std::string ProtocolToken(Protocol p) {
  return p == Protocol::kOther ? "proto=other" : std::string(ProtocolName(p));
}

std::string FormatSeconds(Duration d) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3fs", ToSeconds(d));
  return buf;
}

constexpr struct {
  std::uint8_t flag;
  std::string_view name;
} kCtNames[] = {{ct::kTrk, "trk"}, {ct::kNew, "new"}, {ct::kEst, "est"},
                {ct::kRel, "rel"}};

}  // namespace

std::string_view ProtocolName(Protocol p) {
  switch (p) {
    case Protocol::kTcp:
      return "tcp";
    case Protocol::kUdp:
      return "udp";
    case Protocol::kOther:
      return "other";
  }
  return "?";
}

std::string TcpFlags::ToString() const {
  std::string out;
  if (has(tcp::kSyn)) out += "S";
  if (has(tcp::kAck)) out += "A";
  if (has(tcp::kFin)) out += "F";
  if (has(tcp::kRst)) out += "R";
  return out.empty() ? "." : out;
}

std::string CtState::ToString() const {
  std::string out;
  for (const auto& [flag, name] : kCtNames) {
    if (has(flag)) {
      out += '+';
      out += name;
    }
  }
  return out.empty() ? "-trk" : out;
}

std::optional<CtMatch> CtMatch::Parse(std::string_view text) {
  CtMatch m;
  std::size_t i = 0;
  if (text.empty()) return std::nullopt;
  while (i < text.size()) {
    const char sign = text[i];
    if (sign != '+' && sign != '-') return std::nullopt;
    ++i;
    bool found = false;
    for (const auto& [flag, name] : kCtNames) {
      if (text.substr(i, name.size()) == name) {
        if (((m.set | m.unset) & flag) != 0) return std::nullopt;
        (sign == '+' ? m.set : m.unset) |= flag;
        i += name.size();
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
  }
  return m;
}

std::string CtMatch::ToString() const {
  std::string out;
  for (const auto& [flag, name] : kCtNames) {
    if (set & flag) {
      out += '+';
      out += name;
    } else if (unset & flag) {
      out += '-';
      out += name;
    }
  }
  return out;
}

bool IsWellFormed(const Packet& pkt) {
  const bool l4 =
      pkt.protocol == Protocol::kTcp || pkt.protocol == Protocol::kUdp;
  if (l4 != pkt.header.tp_src.has_value()) return false;
  if (l4 != pkt.header.tp_dst.has_value()) return false;
  if (pkt.protocol != Protocol::kTcp && pkt.tcp_flags.bits != 0) return false;
  return true;
}

bool IsReserved(const Action& a) {
  return std::holds_alternative<action::RateLimit>(a) ||
         std::holds_alternative<action::RedirectHoneypot>(a);
}

void CheckExecutable(const Action& a) {
  if (IsReserved(a)) {
    throw UnimplementedError("action '" + ToString(a) +
                             "' is reserved and has no behavior");
  }
}

std::string ToString(const Action& a) {
  return std::visit(
      [](const auto& act) -> std::string {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, action::Output>) {
          return "output:" + std::to_string(act.port);
        } else if constexpr (std::is_same_v<T, action::Drop>) {
          return "drop";
        } else if constexpr (std::is_same_v<T, action::SendToConntrack>) {
          std::string s = "ct(";
          if (act.zone != 0) s += "zone=" + std::to_string(act.zone) + ",";
          return s + "table=" + std::to_string(act.recirculate_table) + ")";
        } else if constexpr (std::is_same_v<T, action::CommitAndOutput>) {
          return "ct(commit),output:" + std::to_string(act.port);
        } else if constexpr (std::is_same_v<T, action::PacketIn>) {
          return "CONTROLLER";
        } else if constexpr (std::is_same_v<T, action::RateLimit>) {
          return "rate_limit(" + std::to_string(act.pps) + ")";
        } else {
          return "honeypot";
        }
      },
      a);
}

std::string ToString(const std::vector<Action>& actions) {
  if (actions.empty()) return "drop";
  std::string out;
  for (const Action& a : actions) AppendField(out, ToString(a));
  return out;
}

bool HeaderMatches(const MatchSpec& spec, const Packet& pkt,
                   std::optional<CtState> ct) {
  const PacketHeader& h = pkt.header;
  if (!FieldMatches(spec.in_port, h.in_port)) return false;
  if (!FieldMatches(spec.eth_src, h.eth_src)) return false;
  if (!FieldMatches(spec.eth_dst, h.eth_dst)) return false;
  if (!FieldMatches(spec.ip_src, h.ip_src)) return false;
  if (!FieldMatches(spec.ip_dst, h.ip_dst)) return false;
  if (!FieldMatches(spec.tp_src, h.tp_src)) return false;
  if (!FieldMatches(spec.tp_dst, h.tp_dst)) return false;
  if (!FieldMatches(spec.protocol, pkt.protocol)) return false;
  if (spec.ct.has_value() && !CtSatisfies(*spec.ct, ct.value_or(CtState{}))) {
    return false;
  }
  return true;
}

const std::vector<CtState>& ReachableCtStates() {
  static const std::vector<CtState> kStates = [] {
    std::vector<CtState> states{CtState{}};
    for (std::uint8_t extra : {std::uint8_t{0}, ct::kNew, ct::kEst}) {
      for (std::uint8_t rel : {std::uint8_t{0}, ct::kRel}) {
        states.push_back(CtState{static_cast<std::uint8_t>(ct::kTrk | extra | rel)});
      }
    }
    return states;
  }();
  return kStates;
}

bool IsEmpty(const MatchSpec& spec) {
  if (spec.protocol == Protocol::kOther && HasPorts(spec)) return true;
  return !CtRequirementSatisfiable(spec.ct);
}

std::optional<MatchSpec> Intersect(const MatchSpec& a, const MatchSpec& b) {
  if (!FieldsCompatible(a.in_port, b.in_port) ||
      !FieldsCompatible(a.eth_src, b.eth_src) ||
      !FieldsCompatible(a.eth_dst, b.eth_dst) ||
      !FieldsCompatible(a.ip_src, b.ip_src) ||
      !FieldsCompatible(a.ip_dst, b.ip_dst) ||
      !FieldsCompatible(a.tp_src, b.tp_src) ||
      !FieldsCompatible(a.tp_dst, b.tp_dst) ||
      !FieldsCompatible(a.protocol, b.protocol)) {
    return std::nullopt;
  }
  MatchSpec out;
  out.in_port = FieldIntersect(a.in_port, b.in_port);
  out.eth_src = FieldIntersect(a.eth_src, b.eth_src);
  out.eth_dst = FieldIntersect(a.eth_dst, b.eth_dst);
  out.ip_src = FieldIntersect(a.ip_src, b.ip_src);
  out.ip_dst = FieldIntersect(a.ip_dst, b.ip_dst);
  out.tp_src = FieldIntersect(a.tp_src, b.tp_src);
  out.tp_dst = FieldIntersect(a.tp_dst, b.tp_dst);
  out.protocol = FieldIntersect(a.protocol, b.protocol);
  if (a.ct || b.ct) {
    const CtMatch ca = a.ct.value_or(CtMatch{});
    const CtMatch cb = b.ct.value_or(CtMatch{});
    out.ct = CtMatch{static_cast<std::uint8_t>(ca.set | cb.set),
                     static_cast<std::uint8_t>(ca.unset | cb.unset)};
  }
  if (IsEmpty(out)) return std::nullopt;
  return out;
}

bool SpecsOverlap(const MatchSpec& a, const MatchSpec& b) {
  return Intersect(a, b).has_value();
}

bool SpecContains(const MatchSpec& outer, const MatchSpec& inner) {
  if (IsEmpty(inner)) return true;
  if (!FieldContains(outer.in_port, inner.in_port) ||
      !FieldContains(outer.eth_src, inner.eth_src) ||
      !FieldContains(outer.eth_dst, inner.eth_dst) ||
      !FieldContains(outer.ip_src, inner.ip_src) ||
      !FieldContains(outer.ip_dst, inner.ip_dst) ||
      !FieldContains(outer.tp_src, inner.tp_src) ||
      !FieldContains(outer.tp_dst, inner.tp_dst) ||
      !FieldContains(outer.protocol, inner.protocol)) {
    return false;
  }
  if (!outer.ct.has_value()) return true;
  for (CtState s : ReachableCtStates()) {
    const bool in_inner = !inner.ct.has_value() || CtSatisfies(*inner.ct, s);
    if (in_inner && !CtSatisfies(*outer.ct, s)) return false;
  }
  return true;
}

std::string RenderMatch(std::uint16_t priority, const MatchSpec& match) {
  std::string out = "priority=" + std::to_string(priority);
  const std::string fields = RenderMatchFields(match);
  if (fields != "*") AppendField(out, fields);
  return out;
}

std::string RenderMatchFields(const MatchSpec& match) {
  std::string out;
  if (match.ct) AppendField(out, "ct_state=" + match.ct->ToString());
  if (match.protocol) AppendField(out, ProtocolToken(*match.protocol));
  AppendHeaderFields(out, match);
  return out.empty() ? "*" : out;
}

std::string RenderRule(const FlowRule& rule) {
  return RenderMatch(rule.priority, rule.match) +
         " actions=" + ToString(rule.actions);
}

std::string RenderDumpLine(const FlowRule& rule, std::uint8_t table_id) {
  return "duration=" + FormatSeconds(rule.stats.duration) +
         ", table=" + std::to_string(table_id) +
         ", n_packets=" + std::to_string(rule.stats.n_packets) +
         ", n_bytes=" + std::to_string(rule.stats.n_bytes) + ", " +
         RenderRule(rule);
}

std::string RenderAddFlow(const FlowRule& rule, std::uint8_t table_id) {
  std::string fields;
  if (rule.match.ct) AppendField(fields, "ct_state=" + rule.match.ct->ToString());
  AppendHeaderFields(fields, rule.match);
  if (rule.match.protocol) AppendField(fields, ProtocolToken(*rule.match.protocol));
  std::string out = "table=" + std::to_string(table_id) +
                    ", priority=" + std::to_string(rule.priority);
  if (!fields.empty()) out += ", " + fields;
  return out + " actions=" + ToString(rule.actions);
}

}  // namespace sdfw
