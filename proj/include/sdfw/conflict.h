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

// Pairwise conflict analysis over policies or flow rules.
//
// Each overlapping pair is ordered so that `first` takes precedence (higher
// priority; for policies Deny before Allow at equal priority; then input
// order). With differing actions:
//   Shadowing       first contains second
//   Generalization  second contains first
//   Correlation     partial overlap
// With equal actions and containment either way: Redundancy.

#ifndef SDFW_CONFLICT_H_
#define SDFW_CONFLICT_H_

#include <string>
#include <vector>

#include "sdfw/core_model.h"
#include "sdfw/policy.h"

namespace sdfw {

enum class ConflictKind : std::uint8_t {
  kShadowing,
  kCorrelation,
  kGeneralization,
  kRedundancy,
};

std::string_view ConflictKindName(ConflictKind k);

struct Conflict {
  ConflictKind kind = ConflictKind::kShadowing;
  std::string first;   // policy id, or rule id in decimal
  std::string second;
  MatchSpec witness;   // lies in the overlap of both parties
};

// `kind first second witness=<match>`
std::string RenderConflict(const Conflict& c);

std::vector<Conflict> DetectConflicts(const std::vector<Policy>& policies);
std::vector<Conflict> DetectConflicts(const std::vector<FlowRule>& rules);

}  // namespace sdfw

#endif  // SDFW_CONFLICT_H_
