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

// JSON encodings of rules, policies and agent decisions. Decoders throw
// ValidationError on malformed input.

#ifndef SDFW_CODEC_H_
#define SDFW_CODEC_H_

#include <string>
#include <vector>

#include "json.hpp"
#include "sdfw/core_model.h"
#include "sdfw/dfw_agent.h"
#include "sdfw/flow_table.h"
#include "sdfw/policy.h"

namespace sdfw {

using Json = nlohmann::json;

Json EncodeMatch(const MatchSpec& m);
MatchSpec DecodeMatch(const Json& j);

Json EncodeAction(const Action& a);
Action DecodeAction(const Json& j);

Json EncodeFlowMod(const FlowMod& m);
FlowMod DecodeFlowMod(const Json& j);

Json EncodeFlowMods(const std::vector<FlowMod>& mods);
std::vector<FlowMod> DecodeFlowMods(const Json& j);

Json EncodePolicy(const Policy& p);
// Entries of "src"/"dst" are dotted quads or names from `groups`.
Policy DecodePolicy(const Json& j, const HostGroups& groups = {});

// Either a bare array of policies or {"groups": {...}, "policies": [...]}.
std::vector<Policy> DecodePolicies(const Json& doc);

Json EncodeDecision(const Decision& d);

Ipv4 DecodeIpv4(const Json& j);
Protocol DecodeProtocol(std::string_view name);

}  // namespace sdfw

#endif  // SDFW_CODEC_H_
