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

#include "sdfw/codec.h"

#include <cmath>
#include <limits>
#include <variant>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

template <class T>
T Unsigned(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0 ||
      j.get<std::uint64_t>() > std::numeric_limits<T>::max()) {
    throw ValidationError(std::string("bad ") + what + ": " + j.dump());
  }
  return static_cast<T>(j.get<std::uint64_t>());
}

std::string Text(const Json& j, const char* what) {
  if (!j.is_string()) {
    throw ValidationError(std::string("bad ") + what + ": " + j.dump());
  }
  return j.get<std::string>();
}

std::vector<Ipv4> ResolveGroup(const Json& j, const HostGroups& groups,
                               const std::string& policy_id) {
  if (j.is_string()) return ResolveGroup(Json::array({j}), groups, policy_id);
  if (!j.is_array()) {
    throw ValidationError("policy " + policy_id +
                          ": host group must be a name or a list");
  }
  std::vector<Ipv4> out;
  for (const Json& e : j) {
    const std::string name = Text(e, "host");
    if (auto ip = Ipv4::Parse(name)) {
      out.push_back(*ip);
      continue;
    }
    auto it = groups.find(name);
    if (it == groups.end()) {
      throw ValidationError("policy " + policy_id + ": unknown group '" +
                            name + "'");
    }
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

}  // namespace

Ipv4 DecodeIpv4(const Json& j) {
  const std::string s = Text(j, "address");
  auto ip = Ipv4::Parse(s);
  if (!ip) throw ValidationError("bad address: " + s);
  return *ip;
}

Protocol DecodeProtocol(std::string_view name) {
  if (name == "tcp") return Protocol::kTcp;
  if (name == "udp") return Protocol::kUdp;
  if (name == "other") return Protocol::kOther;
  throw ValidationError("bad protocol: " + std::string(name));
}

Json EncodeMatch(const MatchSpec& m) {
  Json j = Json::object();
  if (m.in_port) j["in_port"] = *m.in_port;
  if (m.eth_src) j["eth_src"] = m.eth_src->ToString();
  if (m.eth_dst) j["eth_dst"] = m.eth_dst->ToString();
  if (m.ip_src) j["ip_src"] = m.ip_src->ToString();
  if (m.ip_dst) j["ip_dst"] = m.ip_dst->ToString();
  if (m.tp_src) j["tp_src"] = *m.tp_src;
  if (m.tp_dst) j["tp_dst"] = *m.tp_dst;
  if (m.protocol) j["proto"] = std::string(ProtocolName(*m.protocol));
  if (m.ct) j["ct_state"] = m.ct->ToString();
  return j;
}

MatchSpec DecodeMatch(const Json& j) {
  if (!j.is_object()) throw ValidationError("match must be an object");
  MatchSpec m;
  for (const auto& [key, v] : j.items()) {
    if (key == "in_port") {
      m.in_port = Unsigned<PortId>(v, "in_port");
    } else if (key == "eth_src" || key == "eth_dst") {
      auto mac = MacAddr::Parse(Text(v, "mac"));
      if (!mac) throw ValidationError("bad mac: " + v.dump());
      (key == "eth_src" ? m.eth_src : m.eth_dst) = *mac;
    } else if (key == "ip_src") {
      m.ip_src = DecodeIpv4(v);
    } else if (key == "ip_dst") {
      m.ip_dst = DecodeIpv4(v);
    } else if (key == "tp_src") {
      m.tp_src = Unsigned<std::uint16_t>(v, "tp_src");
    } else if (key == "tp_dst") {
      m.tp_dst = Unsigned<std::uint16_t>(v, "tp_dst");
    } else if (key == "proto") {
      m.protocol = DecodeProtocol(Text(v, "proto"));
    } else if (key == "ct_state") {
      auto ct = CtMatch::Parse(Text(v, "ct_state"));
      if (!ct) throw ValidationError("bad ct_state: " + v.dump());
      m.ct = *ct;
    } else {
      throw ValidationError("unknown match field '" + key + "'");
    }
  }
  return m;
}

Json EncodeAction(const Action& a) {
  return std::visit(
      Overloaded{
          [](const action::Output& o) -> Json {
            return {{"type", "output"}, {"port", o.port}};
          },
          [](const action::Drop&) -> Json { return {{"type", "drop"}}; },
          [](const action::SendToConntrack& c) -> Json {
            return {{"type", "ct"},
                    {"zone", c.zone},
                    {"table", c.recirculate_table}};
          },
          [](const action::CommitAndOutput& c) -> Json {
            return {{"type", "commit_output"}, {"port", c.port}};
          },
          [](const action::PacketIn&) -> Json {
            return {{"type", "packet_in"}};
          },
          [](const action::RateLimit& r) -> Json {
            return {{"type", "rate_limit"}, {"pps", r.pps}};
          },
          [](const action::RedirectHoneypot&) -> Json {
            return {{"type", "honeypot"}};
          },
      },
      a);
}

Action DecodeAction(const Json& j) {
  const std::string type = Text(Field(j, "type"), "action type");
  if (type == "output") {
    return action::Output{Unsigned<PortId>(Field(j, "port"), "port")};
  }
  if (type == "drop") return action::Drop{};
  if (type == "ct") {
    action::SendToConntrack c;
    if (j.contains("zone")) c.zone = Unsigned<std::uint16_t>(j["zone"], "zone");
    if (j.contains("table")) {
      c.recirculate_table = Unsigned<std::uint8_t>(j["table"], "table");
    }
    return c;
  }
  if (type == "commit_output") {
    return action::CommitAndOutput{Unsigned<PortId>(Field(j, "port"), "port")};
  }
  if (type == "packet_in") return action::PacketIn{};
  if (type == "rate_limit") {
    return action::RateLimit{Unsigned<std::uint32_t>(Field(j, "pps"), "pps")};
  }
  if (type == "honeypot") return action::RedirectHoneypot{};
  throw ValidationError("unknown action type '" + type + "'");
}

Json EncodeFlowMod(const FlowMod& m) {
  Json actions = Json::array();
  for (const Action& a : m.actions) actions.push_back(EncodeAction(a));
  return {{"op", std::string(FlowModOpName(m.op))},
          {"priority", m.priority},
          {"match", EncodeMatch(m.match)},
          {"actions", actions},
          {"strict", m.strict}};
}

FlowMod DecodeFlowMod(const Json& j) {
  FlowMod m;
  const std::string op = Text(Field(j, "op"), "op");
  if (op == FlowModOpName(FlowModOp::kAdd)) {
    m.op = FlowModOp::kAdd;
  } else if (op == FlowModOpName(FlowModOp::kModify)) {
    m.op = FlowModOp::kModify;
  } else if (op == FlowModOpName(FlowModOp::kDelete)) {
    m.op = FlowModOp::kDelete;
  } else {
    throw ValidationError("unknown op '" + op + "'");
  }
  m.priority = Unsigned<std::uint16_t>(Field(j, "priority"), "priority");
  m.match = DecodeMatch(Field(j, "match"));
  if (j.contains("actions")) {
    if (!j["actions"].is_array()) throw ValidationError("actions must be a list");
    for (const Json& a : j["actions"]) m.actions.push_back(DecodeAction(a));
  }
  if (j.contains("strict")) {
    if (!j["strict"].is_boolean()) throw ValidationError("strict must be a bool");
    m.strict = j["strict"].get<bool>();
  }
  return m;
}

Json EncodeFlowMods(const std::vector<FlowMod>& mods) {
  Json out = Json::array();
  for (const FlowMod& m : mods) out.push_back(EncodeFlowMod(m));
  return out;
}

std::vector<FlowMod> DecodeFlowMods(const Json& j) {
  if (!j.is_array()) throw ValidationError("flow mods must be a list");
  std::vector<FlowMod> out;
  for (const Json& e : j) out.push_back(DecodeFlowMod(e));
  return out;
}

Json EncodePolicy(const Policy& p) {
  Json src = Json::array();
  Json dst = Json::array();
  for (Ipv4 ip : p.src) src.push_back(ip.ToString());
  for (Ipv4 ip : p.dst) dst.push_back(ip.ToString());
  Json j = {{"id", p.id},
            {"src", src},
            {"dst", dst},
            {"proto", p.proto ? std::string(ProtocolName(*p.proto)) : "any"},
            {"action", std::string(PolicyActionName(p.action))},
            {"priority", p.priority},
            {"stateful", p.stateful}};
  if (p.dst_port) j["dst_port"] = *p.dst_port;
  return j;
}

Policy DecodePolicy(const Json& j, const HostGroups& groups) {
  if (!j.is_object()) throw ValidationError("policy must be an object");
  Policy p;
  p.id = Text(Field(j, "id"), "policy id");
  p.src = ResolveGroup(Field(j, "src"), groups, p.id);
  p.dst = ResolveGroup(Field(j, "dst"), groups, p.id);
  if (j.contains("proto")) {
    const std::string proto = Text(j["proto"], "proto");
    if (proto != "any") p.proto = DecodeProtocol(proto);
  }
  if (j.contains("dst_port") && !j["dst_port"].is_null()) {
    p.dst_port = Unsigned<std::uint16_t>(j["dst_port"], "dst_port");
  }
  const std::string action = Text(Field(j, "action"), "action");
  if (action == "allow") {
    p.action = PolicyAction::kAllow;
  } else if (action == "deny") {
    p.action = PolicyAction::kDeny;
  } else {
    throw ValidationError("policy " + p.id + ": bad action '" + action + "'");
  }
  p.priority = Unsigned<std::uint16_t>(Field(j, "priority"), "priority");
  if (j.contains("stateful")) {
    if (!j["stateful"].is_boolean()) {
      throw ValidationError("policy " + p.id + ": stateful must be a bool");
    }
    p.stateful = j["stateful"].get<bool>();
  }
  p.Validate();
  return p;
}

std::vector<Policy> DecodePolicies(const Json& doc) {
  HostGroups groups;
  const Json* list = &doc;
  if (doc.is_object()) {
    if (doc.contains("groups")) {
      const Json& g = doc["groups"];
      if (!g.is_object()) throw ValidationError("groups must be an object");
      for (const auto& [name, members] : g.items()) {
        groups[name] = ResolveGroup(members, {}, "group " + name);
      }
    }
    list = &Field(doc, "policies");
  }
  if (!list->is_array()) throw ValidationError("policies must be a list");
  std::vector<Policy> out;
  for (const Json& j : *list) {
    Policy p = DecodePolicy(j, groups);
    for (const Policy& q : out) {
      if (q.id == p.id) throw ValidationError("duplicate policy id " + p.id);
    }
    out.push_back(std::move(p));
  }
  return out;
}

Json EncodeDecision(const Decision& d) {
  Json ratio = std::isinf(d.evidence.ratio) ? Json("inf") : Json(d.evidence.ratio);
  return {{"ts", ToSeconds(d.ts)},
          {"switch", d.switch_id},
          {"verdict", std::string(VerdictName(d.verdict))},
          {"src", d.src.ToString()},
          {"dst", d.dst.ToString()},
          {"new", d.evidence.new_packets},
          {"est", d.evidence.est_packets},
          {"ratio", ratio}};
}

}  // namespace sdfw
