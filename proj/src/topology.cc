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

#include "sdfw/topology.h"

#include <algorithm>
#include <deque>
#include <limits>
#include <tuple>

#include "sdfw/errors.h"

namespace sdfw {
namespace {

struct Adjacent {
  SwitchId neighbor;
  PortId local_port;
  PortId remote_port;
};

bool Attached(const Endpoint& e, SwitchId sw, PortId port) {
  return e.kind == Endpoint::Kind::kSwitch && e.id == sw && e.port == port;
}

}  // namespace

SwitchId Topology::AddSwitch(SwitchId id) {
  if (HasSwitch(id)) throw TopologyError("duplicate switch " + std::to_string(id));
  switches_.insert(std::upper_bound(switches_.begin(), switches_.end(), id), id);
  return id;
}

void Topology::RemoveSwitch(SwitchId id) {
  if (!HasSwitch(id)) throw TopologyError("unknown switch " + std::to_string(id));
  std::erase(switches_, id);
  std::erase_if(links_, [id](const Link& l) {
    return (l.a.kind == Endpoint::Kind::kSwitch && l.a.id == id) ||
           (l.b.kind == Endpoint::Kind::kSwitch && l.b.id == id);
  });
}

bool Topology::HasSwitch(SwitchId id) const {
  return std::binary_search(switches_.begin(), switches_.end(), id);
}

bool Topology::HasPort(SwitchId sw, PortId port) const {
  return LinkAt(sw, port) != nullptr;
}

PortId Topology::NextPort(SwitchId sw) const {
  PortId max_port = 0;
  for (const Link& l : links_) {
    for (const Endpoint* e : {&l.a, &l.b}) {
      if (e->kind == Endpoint::Kind::kSwitch && e->id == sw) {
        max_port = std::max(max_port, e->port);
      }
    }
  }
  return max_port + 1;
}

std::size_t Topology::AddHost(std::string name, Ipv4 ip, MacAddr mac,
                              SwitchId sw, PortId port, LinkParams params) {
  if (!HasSwitch(sw)) throw TopologyError("unknown switch " + std::to_string(sw));
  if (FindHost(ip) != nullptr) throw TopologyError("duplicate host " + ip.ToString());
  if (HasPort(sw, port)) {
    throw TopologyError("port " + std::to_string(port) + " on switch " +
                        std::to_string(sw) + " already in use");
  }
  hosts_.push_back(Host{std::move(name), ip, mac, sw, port});
  const auto index = static_cast<std::uint32_t>(hosts_.size() - 1);
  links_.push_back(Link{Endpoint{Endpoint::Kind::kHost, index, 0},
                        Endpoint{Endpoint::Kind::kSwitch, sw, port}, params, true});
  return index;
}

std::size_t Topology::AddSwitchLink(SwitchId a, PortId pa, SwitchId b, PortId pb,
                                    LinkParams params) {
  if (!HasSwitch(a) || !HasSwitch(b)) throw TopologyError("link to unknown switch");
  if (HasPort(a, pa) || HasPort(b, pb)) throw TopologyError("link port already in use");
  links_.push_back(Link{Endpoint{Endpoint::Kind::kSwitch, a, pa},
                        Endpoint{Endpoint::Kind::kSwitch, b, pb}, params, true});
  return links_.size() - 1;
}

void Topology::SetPortState(SwitchId sw, PortId port, bool up) {
  auto idx = LinkIndexAt(sw, port);
  if (!idx) {
    throw TopologyError("no link on switch " + std::to_string(sw) + " port " +
                        std::to_string(port));
  }
  links_[*idx].up = up;
}

const Host* Topology::FindHost(Ipv4 ip) const {
  auto idx = HostIndex(ip);
  return idx ? &hosts_[*idx] : nullptr;
}

std::optional<std::size_t> Topology::HostIndex(Ipv4 ip) const {
  for (std::size_t i = 0; i < hosts_.size(); ++i) {
    if (hosts_[i].ip == ip) return i;
  }
  return std::nullopt;
}

const Link* Topology::LinkAt(SwitchId sw, PortId port) const {
  auto idx = LinkIndexAt(sw, port);
  return idx ? &links_[*idx] : nullptr;
}

std::optional<std::size_t> Topology::LinkIndexAt(SwitchId sw, PortId port) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (Attached(links_[i].a, sw, port) || Attached(links_[i].b, sw, port)) return i;
  }
  return std::nullopt;
}

std::vector<Hop> Topology::Path(Ipv4 src, Ipv4 dst) const {
  const Host* hs = FindHost(src);
  const Host* hd = FindHost(dst);
  if (hs == nullptr || hd == nullptr) return {};
  if (!HasSwitch(hs->attached_switch) || !HasSwitch(hd->attached_switch)) return {};
  const Link* ls = LinkAt(hs->attached_switch, hs->port);
  const Link* ld = LinkAt(hd->attached_switch, hd->port);
  if (ls == nullptr || ld == nullptr || !ls->up || !ld->up) return {};

  std::map<SwitchId, std::vector<Adjacent>> adj;
  for (const Link& l : links_) {
    if (!l.up || l.a.kind != Endpoint::Kind::kSwitch ||
        l.b.kind != Endpoint::Kind::kSwitch) {
      continue;
    }
    adj[l.a.id].push_back({l.b.id, l.a.port, l.b.port});
    adj[l.b.id].push_back({l.a.id, l.b.port, l.a.port});
  }
  for (auto& [sw, list] : adj) {
    std::sort(list.begin(), list.end(), [](const Adjacent& x, const Adjacent& y) {
      return std::tie(x.neighbor, x.local_port) < std::tie(y.neighbor, y.local_port);
    });
  }

  // Distances to the destination switch.
  constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max();
  std::map<SwitchId, std::size_t> dist;
  std::deque<SwitchId> queue{hd->attached_switch};
  dist[hd->attached_switch] = 0;
  while (!queue.empty()) {
    const SwitchId cur = queue.front();
    queue.pop_front();
    for (const Adjacent& a : adj[cur]) {
      if (!dist.contains(a.neighbor)) {
        dist[a.neighbor] = dist[cur] + 1;
        queue.push_back(a.neighbor);
      }
    }
  }
  if (!dist.contains(hs->attached_switch)) return {};

  std::vector<Hop> path;
  SwitchId cur = hs->attached_switch;
  PortId in_port = hs->port;
  while (cur != hd->attached_switch) {
    const std::size_t d = dist[cur];
    const Adjacent* next = nullptr;
    for (const Adjacent& a : adj[cur]) {
      auto it = dist.find(a.neighbor);
      if (it != dist.end() && it->second + 1 == d) {
        next = &a;
        break;
      }
    }
    if (next == nullptr || d == kInf) return {};
    path.push_back(Hop{cur, in_port, next->local_port});
    in_port = next->remote_port;
    cur = next->neighbor;
  }
  path.push_back(Hop{cur, in_port, hd->port});
  return path;
}

Ipv4 HostAddress(std::size_t i) {
  return Ipv4(Ipv4(10, 0, 3, 0).value() + static_cast<std::uint32_t>(i));
}

Topology BuildFlat(std::size_t n_hosts, LinkParams params) {
  if (n_hosts < 2) throw TopologyError("flat topology needs at least 2 hosts");
  Topology t;
  t.AddSwitch(1);
  for (std::size_t i = 1; i <= n_hosts; ++i) {
    t.AddHost("h" + std::to_string(i), HostAddress(i), MacAddr(i), 1,
              static_cast<PortId>(i), params);
  }
  return t;
}

Topology BuildTree(std::size_t depth, std::size_t fanout, LinkParams params) {
  if (depth < 1) throw TopologyError("tree depth must be >= 1");
  if (fanout < 2) throw TopologyError("tree fanout must be >= 2");
  Topology t;
  const auto up_port = static_cast<PortId>(fanout + 1);
  std::vector<SwitchId> level{1};
  t.AddSwitch(1);
  SwitchId next_id = 2;
  for (std::size_t d = 1; d < depth; ++d) {
    std::vector<SwitchId> children;
    for (SwitchId parent : level) {
      for (std::size_t k = 1; k <= fanout; ++k) {
        const SwitchId child = t.AddSwitch(next_id++);
        t.AddSwitchLink(parent, static_cast<PortId>(k), child, up_port, params);
        children.push_back(child);
      }
    }
    level = std::move(children);
  }
  std::size_t host = 1;
  for (SwitchId leaf : level) {
    for (std::size_t k = 1; k <= fanout; ++k, ++host) {
      t.AddHost("h" + std::to_string(host), HostAddress(host), MacAddr(host), leaf,
                static_cast<PortId>(k), params);
    }
  }
  return t;
}

}  // namespace sdfw
