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

#ifndef SDFW_TOPOLOGY_H_
#define SDFW_TOPOLOGY_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sdfw/net.h"

namespace sdfw {

struct LinkParams {
  double bandwidth_bps = 1e9;
  Duration latency = std::chrono::microseconds(100);
};

struct Host {
  std::string name;
  Ipv4 ip;
  MacAddr mac;
  SwitchId attached_switch = 0;
  PortId port = 0;
};

// One side of a link: a switch port, or a host (port unused).
struct Endpoint {
  enum class Kind : std::uint8_t { kSwitch, kHost };
  Kind kind = Kind::kSwitch;
  std::uint32_t id = 0;  // switch id, or index into Topology::hosts
  PortId port = 0;

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Link {
  Endpoint a;
  Endpoint b;
  LinkParams params;
  bool up = true;
};

// One switch on a path, with the ports the packet enters and leaves by.
struct Hop {
  SwitchId switch_id = 0;
  PortId in_port = 0;
  PortId out_port = 0;

  friend auto operator<=>(const Hop&, const Hop&) = default;
};

class Topology {
 public:
  SwitchId AddSwitch(SwitchId id);
  void RemoveSwitch(SwitchId id);
  // Next unused port number on `sw` (ports start at 1).
  PortId NextPort(SwitchId sw) const;
  std::size_t AddHost(std::string name, Ipv4 ip, MacAddr mac, SwitchId sw,
                      PortId port, LinkParams params = {});
  std::size_t AddSwitchLink(SwitchId a, PortId pa, SwitchId b, PortId pb,
                            LinkParams params = {});

  bool HasSwitch(SwitchId id) const;
  bool HasPort(SwitchId sw, PortId port) const;
  // Marks the link attached to (sw, port) up/down. Throws TopologyError if no
  // link uses that port.
  void SetPortState(SwitchId sw, PortId port, bool up);

  const std::vector<SwitchId>& switches() const { return switches_; }
  const std::vector<Host>& hosts() const { return hosts_; }
  const std::vector<Link>& links() const { return links_; }

  const Host* FindHost(Ipv4 ip) const;
  std::optional<std::size_t> HostIndex(Ipv4 ip) const;
  // Link attached to (sw, port), if any.
  const Link* LinkAt(SwitchId sw, PortId port) const;
  // Index into links() of the link attached to (sw, port).
  std::optional<std::size_t> LinkIndexAt(SwitchId sw, PortId port) const;

  // Shortest switch path between the switches of two hosts over up links,
  // ties broken towards the lexicographically smallest switch-id sequence.
  // Empty if unreachable.
  std::vector<Hop> Path(Ipv4 src, Ipv4 dst) const;

 private:
  std::vector<SwitchId> switches_;
  std::vector<Host> hosts_;
  std::vector<Link> links_;
};

// One switch, hosts 10.0.3.1 .. 10.0.3.n on ports 1..n.
Topology BuildFlat(std::size_t n_hosts, LinkParams params = {});

// Complete fanout-ary switch tree of the given depth with fanout hosts per
// leaf. Switches are numbered level by level from the root (1); on every
// switch ports 1..fanout face children and port fanout+1 faces the parent.
Topology BuildTree(std::size_t depth, std::size_t fanout, LinkParams params = {});

// 10.0.3.0 + i, i.e. 10.0.3.i for small i.
Ipv4 HostAddress(std::size_t i);

}  // namespace sdfw

#endif  // SDFW_TOPOLOGY_H_
