// Copyright 2026 The ibrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IBR_SERIALIZATION_H_
#define IBR_SERIALIZATION_H_

// JSON and CSV forms of realizations, traces and diagnostics. Doubles are
// written with enough digits to round-trip exactly, so a realization read
// back from JSON rebuilds a bit-identical gain matrix.

#include <string>

#include "json.hpp"

#include "ibr/analysis.h"
#include "ibr/channel.h"
#include "ibr/dynamics.h"
#include "ibr/game.h"

namespace ibr {

using Json = nlohmann::json;

Json RadioToJson(const RadioParams& radio);
RadioParams RadioFromJson(const Json& j);

Json RegionToJson(const RegionSpec& region);
RegionSpec RegionFromJson(const Json& j);

// Geometric realizations store positions and rebuild gains on load;
// abstract ones (FromGains) store the gain matrix.
Json RealizationToJson(const NetworkRealization& net);
// Throws kConfig on a malformed document; invariant violations propagate
// from the realization factories.
NetworkRealization RealizationFromJson(const Json& j);

Json ProfileToJson(const StrategyProfile& profile);
StrategyProfile ProfileFromJson(const Json& j);

Json StepToJson(const StepRecord& step);
Json TraceToJson(const Trace& trace);
Trace TraceFromJson(const Json& j);

inline constexpr const char* kTraceCsvHeader =
    "t,actor,old,new,d1,d2,d3,x_after";
// Header line plus one row per step.
std::string TraceToCsv(const Trace& trace);

Json DiagnosticsToJson(const DiagnosticsReport& report);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace ibr

#endif  // IBR_SERIALIZATION_H_
