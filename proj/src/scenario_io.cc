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

#include "sdfw/scenario_io.h"

#include <cmath>
#include <fstream>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const Json& Need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double Number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError(where + ": expected a number");
  return j.get<double>();
}

std::uint64_t Count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) {
    throw ValidationError(where + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::uint16_t Port(const Json& j, const std::string& where) {
  const std::uint64_t v = Count(j, where);
  if (v > 65535) throw ValidationError(where + ": port out of range");
  return static_cast<std::uint16_t>(v);
}

double NumberOr(const Json& j, const char* key, double fallback,
                const std::string& where) {
  return j.contains(key) ? Number(j[key], where + "." + key) : fallback;
}

std::uint64_t CountOr(const Json& j, const char* key, std::uint64_t fallback,
                      const std::string& where) {
  return j.contains(key) ? Count(j[key], where + "." + key) : fallback;
}

Ipv4 Address(const Json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError(where + ": expected an address");
  auto ip = Ipv4::Parse(j.get<std::string>());
  if (!ip) throw ValidationError(where + ": bad address " + j.dump());
  return *ip;
}

TopologySpec DecodeTopology(const Json& j) {
  const std::string where = "topology";
  TopologySpec t;
  const Json& kind = Need(j, "kind", where);
  const Json params = j.contains("params") ? j["params"] : Json::object();
  if (!params.is_object()) throw ValidationError("topology.params: expected an object");
  if (kind == "flat") {
    t.kind = TopologySpec::Kind::kFlat;
    t.hosts = Count(Need(params, "hosts", "topology.params"), "topology.params.hosts");
  } else if (kind == "tree") {
    t.kind = TopologySpec::Kind::kTree;
    t.depth = Count(Need(params, "depth", "topology.params"), "topology.params.depth");
    t.fanout = Count(Need(params, "fanout", "topology.params"), "topology.params.fanout");
  } else {
    throw ValidationError("topology.kind: expected flat or tree");
  }
  t.link.bandwidth_bps = NumberOr(params, "bandwidth_bps", t.link.bandwidth_bps,
                                  "topology.params");
  t.link.latency = Seconds(NumberOr(params, "latency_s", ToSeconds(t.link.latency),
                                    "topology.params"));
  return t;
}

TrafficSpec DecodeTraffic(const Json& j, std::size_t index) {
  const std::string where = "traffic[" + std::to_string(index) + "]";
  const Json& kind = Need(j, "kind", where);
  const SimTime start = Seconds(NumberOr(j, "start_s", 0.0, where));
  if (kind == "benign_tcp") {
    BenignTcp b;
    b.src = Address(Need(j, "src", where), where + ".src");
    b.dst = Address(Need(j, "dst", where), where + ".dst");
    b.flows = static_cast<std::uint32_t>(CountOr(j, "flows", 1, where));
    b.bytes_per_flow = Count(Need(j, "bytes_per_flow", where), where + ".bytes_per_flow");
    if (j.contains("dst_port")) b.dst_port = Port(j["dst_port"], where + ".dst_port");
    b.start = start;
    return b;
  }
  if (kind == "syn_flood") {
    SynFlood f;
    f.src = Address(Need(j, "src", where), where + ".src");
    f.dst = Address(Need(j, "dst", where), where + ".dst");
    if (j.contains("dst_port")) f.dst_port = Port(j["dst_port"], where + ".dst_port");
    if (j.contains("src_port")) f.src_port = Port(j["src_port"], where + ".src_port");
    f.count = Count(Need(j, "count", where), where + ".count");
    f.rate_pps = Number(Need(j, "rate_pps", where), where + ".rate_pps");
    if (j.contains("vary_src_port")) {
      if (!j["vary_src_port"].is_boolean()) {
        throw ValidationError(where + ".vary_src_port: expected a bool");
      }
      f.vary_src_port = j["vary_src_port"].get<bool>();
    }
    f.start = start;
    return f;
  }
  if (kind == "table_miss_flood") {
    TableMissFlood f;
    f.src = Address(Need(j, "src", where), where + ".src");
    f.rate_pps = Number(Need(j, "rate_pps", where), where + ".rate_pps");
    f.duration = Seconds(Number(Need(j, "duration_s", where), where + ".duration_s"));
    f.start = start;
    return f;
  }
  throw ValidationError(where + ".kind: unknown traffic kind " + kind.dump());
}

Json EncodeTraffic(const TrafficSpec& t) {
  return std::visit(
      Overloaded{
          [](const BenignTcp& b) -> Json {
            return {{"kind", "benign_tcp"},       {"src", b.src.ToString()},
                    {"dst", b.dst.ToString()},    {"flows", b.flows},
                    {"bytes_per_flow", b.bytes_per_flow},
                    {"dst_port", b.dst_port},     {"start_s", ToSeconds(b.start)}};
          },
          [](const SynFlood& f) -> Json {
            return {{"kind", "syn_flood"},        {"src", f.src.ToString()},
                    {"dst", f.dst.ToString()},    {"dst_port", f.dst_port},
                    {"src_port", f.src_port},     {"count", f.count},
                    {"rate_pps", f.rate_pps},     {"start_s", ToSeconds(f.start)},
                    {"vary_src_port", f.vary_src_port}};
          },
          [](const TableMissFlood& f) -> Json {
            return {{"kind", "table_miss_flood"}, {"src", f.src.ToString()},
                    {"rate_pps", f.rate_pps},     {"start_s", ToSeconds(f.start)},
                    {"duration_s", ToSeconds(f.duration)}};
          },
      },
      t);
}

Json Summary(const SwitchSummary& s) {
  return {{"rules", s.rules},
          {"packets", s.packets},
          {"bytes", s.bytes},
          {"table_misses", s.table_misses},
          {"syn_flood_decisions", s.syn_flood_decisions},
          {"saturation_decisions", s.saturation_decisions},
          {"active_mitigations", s.active_mitigations}};
}

}  // namespace

Scenario DecodeScenario(const Json& j) {
  if (!j.is_object()) throw ValidationError("scenario: expected an object");
  Scenario s;
  s.topology = DecodeTopology(Need(j, "topology", "scenario"));
  if (j.contains("policies")) s.policies = DecodePolicies(j["policies"]);
  if (j.contains("traffic")) {
    if (!j["traffic"].is_array()) throw ValidationError("traffic: expected a list");
    for (std::size_t i = 0; i < j["traffic"].size(); ++i) {
      s.traffic.push_back(DecodeTraffic(j["traffic"][i], i));
    }
  }
  if (j.contains("sdfw_enabled")) {
    if (!j["sdfw_enabled"].is_boolean()) {
      throw ValidationError("sdfw_enabled: expected a bool");
    }
    s.sdfw_enabled = j["sdfw_enabled"].get<bool>();
  }
  s.seed = CountOr(j, "seed", s.seed, "scenario");
  s.duration_s = Number(Need(j, "duration_s", "scenario"), "duration_s");
  if (j.contains("switch")) {
    const Json& w = j["switch"];
    SwitchParams& p = s.switch_params;
    p.proc_rate_pps = NumberOr(w, "proc_rate_pps", p.proc_rate_pps, "switch");
    p.ct_cost = Seconds(NumberOr(w, "ct_cost_s", ToSeconds(p.ct_cost), "switch"));
    p.queue_capacity = CountOr(w, "queue_capacity", p.queue_capacity, "switch");
  }
  if (j.contains("detection")) {
    const Json& d = j["detection"];
    DetectionConfig& c = s.detection;
    c.delta_threshold = NumberOr(d, "delta_threshold", c.delta_threshold, "detection");
    c.min_new_packets = CountOr(d, "min_new_packets", c.min_new_packets, "detection");
    c.eval_interval = Seconds(
        NumberOr(d, "eval_interval_s", ToSeconds(c.eval_interval), "detection"));
    c.window = Seconds(NumberOr(d, "window_s", ToSeconds(c.window), "detection"));
    c.packet_in_rate_limit = static_cast<std::uint32_t>(
        CountOr(d, "packet_in_rate_limit", c.packet_in_rate_limit, "detection"));
    c.packet_in_burst = static_cast<std::uint32_t>(
        CountOr(d, "packet_in_burst", c.packet_in_burst, "detection"));
    c.cool_down = Seconds(NumberOr(d, "cool_down_s", ToSeconds(c.cool_down), "detection"));
  }
  s.Validate();
  return s;
}

Json EncodeScenario(const Scenario& s) {
  Json topo;
  if (s.topology.kind == TopologySpec::Kind::kFlat) {
    topo = {{"kind", "flat"}, {"params", {{"hosts", s.topology.hosts}}}};
  } else {
    topo = {{"kind", "tree"},
            {"params", {{"depth", s.topology.depth}, {"fanout", s.topology.fanout}}}};
  }
  topo["params"]["bandwidth_bps"] = s.topology.link.bandwidth_bps;
  topo["params"]["latency_s"] = ToSeconds(s.topology.link.latency);
  Json policies = Json::array();
  for (const Policy& p : s.policies) policies.push_back(EncodePolicy(p));
  Json traffic = Json::array();
  for (const TrafficSpec& t : s.traffic) traffic.push_back(EncodeTraffic(t));
  const DetectionConfig& c = s.detection;
  return {{"topology", topo},
          {"policies", policies},
          {"traffic", traffic},
          {"sdfw_enabled", s.sdfw_enabled},
          {"seed", s.seed},
          {"duration_s", s.duration_s},
          {"switch",
           {{"proc_rate_pps", s.switch_params.proc_rate_pps},
            {"ct_cost_s", ToSeconds(s.switch_params.ct_cost)},
            {"queue_capacity", s.switch_params.queue_capacity}}},
          {"detection",
           {{"delta_threshold", c.delta_threshold},
            {"min_new_packets", c.min_new_packets},
            {"eval_interval_s", ToSeconds(c.eval_interval)},
            {"window_s", ToSeconds(c.window)},
            {"packet_in_rate_limit", c.packet_in_rate_limit},
            {"packet_in_burst", c.packet_in_burst},
            {"cool_down_s", ToSeconds(c.cool_down)}}}};
}

Json EncodeReport(const MetricsReport& r) {
  Json pairs = Json::array();
  for (const PairMetrics& p : r.pairs) {
    pairs.push_back({{"src", p.src.ToString()},
                     {"dst", p.dst.ToString()},
                     {"delivered_bytes", p.delivered_bytes},
                     {"delivered_packets", p.delivered_packets},
                     {"goodput_bps", p.goodput_bps},
                     {"mean_latency_s", p.mean_latency_s}});
  }
  Json mitigations = Json::array();
  for (const MitigationRecord& m : r.mitigations) {
    mitigations.push_back({{"switch", m.switch_id},
                           {"src", m.src.ToString()},
                           {"dst", m.dst.ToString()},
                           {"installed_at_s", m.installed_at_s},
                           {"rule", m.rule}});
  }
  Json by_source = Json::object();
  for (const auto& [ip, n] : r.packet_in_by_source) by_source[ip.ToString()] = n;
  Json switches = Json::object();
  for (const auto& [id, s] : r.switches) switches[std::to_string(id)] = Summary(s);
  const FateCounts& f = r.fates;
  return {{"sdfw_enabled", r.sdfw_enabled},
          {"seed", r.seed},
          {"duration_s", r.duration_s},
          {"pairs", pairs},
          {"mean_goodput_bps", r.mean_goodput_bps},
          {"aggregate_goodput_bps", r.aggregate_goodput_bps},
          {"mean_latency_s", r.mean_latency_s},
          {"detection_time_s",
           r.detection_time_s ? Json(*r.detection_time_s) : Json(nullptr)},
          {"mitigations", mitigations},
          {"decisions", r.decisions},
          {"packet_in_count", r.packet_in_count},
          {"packet_in_by_source", by_source},
          {"dropped_by_mitigation", f.dropped_by_mitigation},
          {"fates",
           {{"injected", f.injected},
            {"delivered", f.delivered},
            {"dropped_by_rule", f.dropped_by_rule},
            {"dropped_by_mitigation", f.dropped_by_mitigation},
            {"throttled_miss", f.throttled_miss},
            {"packet_in", f.packet_in},
            {"lost_queue", f.lost_queue},
            {"in_flight", f.in_flight}}},
          {"switches", switches}};
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace sdfw
