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

#include "sdfw/conflict.h"

#include <algorithm>
#include <numeric>

namespace sdfw {
namespace {

std::vector<Ipv4> SortedUnique(std::vector<Ipv4> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

bool Includes(const std::vector<Ipv4>& outer, const std::vector<Ipv4>& inner) {
  return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

std::optional<Ipv4> FirstCommon(const std::vector<Ipv4>& a,
                                const std::vector<Ipv4>& b) {
  std::vector<Ipv4> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  if (common.empty()) return std::nullopt;
  return common.front();
}

// Protocol/port part of a policy as a match.
MatchSpec ClassOf(const Policy& p) {
  MatchSpec m;
  m.protocol = p.proto;
  m.tp_dst = p.dst_port;
  return m;
}

std::optional<ConflictKind> Classify(bool same_action, bool first_covers,
                                     bool second_covers) {
  if (same_action) {
    if (first_covers || second_covers) return ConflictKind::kRedundancy;
    return std::nullopt;
  }
  if (first_covers) return ConflictKind::kShadowing;
  if (second_covers) return ConflictKind::kGeneralization;
  return ConflictKind::kCorrelation;
}

}  // namespace

std::string_view ConflictKindName(ConflictKind k) {
  switch (k) {
    case ConflictKind::kShadowing:
      return "shadowing";
    case ConflictKind::kCorrelation:
      return "correlation";
    case ConflictKind::kGeneralization:
      return "generalization";
    case ConflictKind::kRedundancy:
      return "redundancy";
  }
  return "?";
}

std::string RenderConflict(const Conflict& c) {
  return std::string(ConflictKindName(c.kind)) + " " + c.first + " " +
         c.second + " witness=" + RenderMatchFields(c.witness);
}

std::vector<Conflict> DetectConflicts(const std::vector<Policy>& policies) {
  std::vector<std::size_t> order(policies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Policy& x = policies[a];
    const Policy& y = policies[b];
    if (x.priority != y.priority) return x.priority > y.priority;
    return x.action == PolicyAction::kDeny && y.action == PolicyAction::kAllow;
  });

  std::vector<std::vector<Ipv4>> src(policies.size()), dst(policies.size());
  for (std::size_t i = 0; i < policies.size(); ++i) {
    src[i] = SortedUnique(policies[i].src);
    dst[i] = SortedUnique(policies[i].dst);
  }

  std::vector<Conflict> out;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t i = order[oi];
      const std::size_t j = order[oj];
      const auto s = FirstCommon(src[i], src[j]);
      const auto d = FirstCommon(dst[i], dst[j]);
      if (!s || !d) continue;
      const MatchSpec ci = ClassOf(policies[i]);
      const MatchSpec cj = ClassOf(policies[j]);
      const auto cls = Intersect(ci, cj);
      if (!cls) continue;

      const bool i_covers = Includes(src[i], src[j]) &&
                            Includes(dst[i], dst[j]) && SpecContains(ci, cj);
      const bool j_covers = Includes(src[j], src[i]) &&
                            Includes(dst[j], dst[i]) && SpecContains(cj, ci);
      const auto kind = Classify(policies[i].action == policies[j].action,
                                 i_covers, j_covers);
      if (!kind) continue;
      MatchSpec witness = *cls;
      witness.ip_src = *s;
      witness.ip_dst = *d;
      out.push_back({*kind, policies[i].id, policies[j].id, witness});
    }
  }
  return out;
}

std::vector<Conflict> DetectConflicts(const std::vector<FlowRule>& rules) {
  std::vector<std::size_t> order(rules.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rules[a].priority > rules[b].priority;
  });

  std::vector<Conflict> out;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const FlowRule& a = rules[order[oi]];
      const FlowRule& b = rules[order[oj]];
      const auto witness = Intersect(a.match, b.match);
      if (!witness) continue;
      const auto kind = Classify(a.actions == b.actions,
                                 SpecContains(a.match, b.match),
                                 SpecContains(b.match, a.match));
      if (!kind) continue;
      out.push_back({*kind, std::to_string(a.rule_id),
                     std::to_string(b.rule_id), *witness});
    }
  }
  return out;
}

}  // namespace sdfw
