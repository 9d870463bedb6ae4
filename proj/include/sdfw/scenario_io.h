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

// Scenario files in, metrics reports out.

#ifndef SDFW_SCENARIO_IO_H_
#define SDFW_SCENARIO_IO_H_

#include <string>

#include "sdfw/codec.h"
#include "sdfw/simnet.h"

namespace sdfw {

// Throws ValidationError naming the offending field.
Scenario DecodeScenario(const Json& j);
Json EncodeScenario(const Scenario& s);

Json EncodeReport(const MetricsReport& r);

// Reads and parses a JSON file. Throws NotFoundError if it cannot be opened
// and ValidationError if it is not JSON.
Json ReadJsonFile(const std::string& path);

}  // namespace sdfw

#endif  // SDFW_SCENARIO_IO_H_
