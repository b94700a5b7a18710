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

#include "ibr/serialization.h"

#include <charconv>
#include <sstream>

#include "ibr/errors.h"

namespace ibr {
namespace {

constexpr const char* kRealizationFormat = "ibr-realization/1";
constexpr const char* kTraceFormat = "ibr-trace/1";

template <typename T>
T Field(const Json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorKind::kConfig, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kConfig,
                std::string("bad field '") + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> OptionalField(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return Field<T>(j, key);
}

template <typename T>
Json OptionalJson(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

Json RadioToJson(const RadioParams& radio) {
  return Json{{"alpha", radio.alpha},
              {"wavelength", radio.wavelength},
              {"noise_n0", radio.noise_n0},
              {"theta_t", radio.theta_t},
              {"theta_r", radio.theta_r},
              {"snr_target_db", OptionalJson(radio.snr_target_db)},
              {"p0", OptionalJson(radio.p0)},
              {"power_cap_enabled", radio.power_cap_enabled}};
}

RadioParams RadioFromJson(const Json& j) {
  RadioParams r;
  r.alpha = Field<double>(j, "alpha");
  r.wavelength = Field<double>(j, "wavelength");
  r.noise_n0 = Field<double>(j, "noise_n0");
  r.theta_t = Field<double>(j, "theta_t");
  r.theta_r = Field<double>(j, "theta_r");
  r.snr_target_db = OptionalField<double>(j, "snr_target_db");
  r.p0 = OptionalField<double>(j, "p0");
  r.power_cap_enabled = Field<bool>(j, "power_cap_enabled");
  r.Validate();
  return r;
}

Json RegionToJson(const RegionSpec& region) {
  if (region.shape() == RegionSpec::Shape::kDisk) {
    return Json{{"shape", "disk"}, {"radius", region.radius()}};
  }
  return Json{{"shape", "rectangle"},
              {"width", region.width()},
              {"height", region.height()}};
}

RegionSpec RegionFromJson(const Json& j) {
  const std::string shape = Field<std::string>(j, "shape");
  if (shape == "disk") return RegionSpec::Disk(Field<double>(j, "radius"));
  if (shape == "rectangle") {
    return RegionSpec::Rectangle(Field<double>(j, "width"),
                                 Field<double>(j, "height"));
  }
  throw Error(ErrorKind::kConfig, "unknown region shape '" + shape + "'");
}

Json RealizationToJson(const NetworkRealization& net) {
  Json j{{"format", kRealizationFormat},
         {"seed", net.seed()},
         {"n_players", net.size()},
         {"num_channels", net.num_channels()},
         {"dest", net.dest()},
         {"power", net.power()}};
  if (net.has_geometry()) {
    j["region"] = RegionToJson(net.region());
    j["radio"] = RadioToJson(net.radio());
    j["orientation"] = OrientationModeName(net.orientation());
    Json pos = Json::array();
    for (const Point& p : net.positions()) pos.push_back({p.x, p.y});
    j["positions"] = std::move(pos);
    j["tx_heading"] = net.tx_heading();
    j["rx_heading"] = net.rx_heading();
  } else {
    j["noise_n0"] = net.noise();
    std::vector<double> gain;
    gain.reserve(static_cast<std::size_t>(net.size()) * net.size());
    for (PlayerId n = 0; n < net.size(); ++n) {
      for (PlayerId m = 0; m < net.size(); ++m) gain.push_back(net.gain(n, m));
    }
    j["gain"] = std::move(gain);
  }
  return j;
}

NetworkRealization RealizationFromJson(const Json& j) {
  if (!j.is_object() || j.value("format", "") != kRealizationFormat) {
    throw Error(ErrorKind::kConfig,
                std::string("not a realization document (expected format ") +
                    kRealizationFormat + ")");
  }
  const int k = Field<int>(j, "num_channels");
  auto dest = Field<std::vector<PlayerId>>(j, "dest");
  auto power = Field<std::vector<double>>(j, "power");
  if (j.contains("positions")) {
    std::vector<Point> positions;
    for (const Json& p : j.at("positions")) {
      if (!p.is_array() || p.size() != 2) {
        throw Error(ErrorKind::kConfig, "positions must be [x, y] pairs");
      }
      positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return NetworkRealization::FromGeometry(
        RegionFromJson(Field<Json>(j, "region")),
        RadioFromJson(Field<Json>(j, "radio")),
        ParseOrientationMode(Field<std::string>(j, "orientation")), k,
        std::move(positions), std::move(dest),
        Field<std::vector<double>>(j, "tx_heading"),
        Field<std::vector<double>>(j, "rx_heading"), std::move(power),
        Field<std::uint64_t>(j, "seed"));
  }
  return NetworkRealization::FromGains(
      std::move(dest), std::move(power), Field<std::vector<double>>(j, "gain"),
      k, Field<double>(j, "noise_n0"));
}

Json ProfileToJson(const StrategyProfile& profile) {
  return Json{{"num_channels", profile.num_channels()},
              {"channels", profile.channels()}};
}

StrategyProfile ProfileFromJson(const Json& j) {
  return StrategyProfile(Field<int>(j, "num_channels"),
                         Field<std::vector<ChannelId>>(j, "channels"));
}

Json StepToJson(const StepRecord& s) {
  return Json{{"t", s.t},
              {"actor", s.actor},
              {"old", s.old_channel},
              {"new", s.new_channel},
              {"d1", s.d1},
              {"d2", s.d2},
              {"d3", s.d3},
              {"x_before", s.x_before},
              {"x_after", s.x_after},
              {"min_rate_after", s.min_rate_after},
              {"deviator_count", s.deviator_count},
              {"candidate_count", s.candidate_count}};
}

Json TraceToJson(const Trace& trace) {
  Json steps = Json::array();
  for (const StepRecord& s : trace.steps) steps.push_back(StepToJson(s));
  return Json{{"format", kTraceFormat},
              {"eps", trace.eps},
              {"policy", PolicyKindName(trace.policy)},
              {"max_steps", trace.max_steps},
              {"run_seed", trace.run_seed},
              {"converged", trace.converged},
              {"t_con", OptionalJson(trace.t_con)},
              {"mean_rate", trace.MeanRate()},
              {"min_rate", trace.MinRate()},
              {"initial_profile", ProfileToJson(trace.initial_profile)},
              {"final_profile", ProfileToJson(trace.final_profile)},
              {"final_rates", trace.final_rates},
              {"steps", std::move(steps)}};
}

Trace TraceFromJson(const Json& j) {
  if (!j.is_object() || j.value("format", "") != kTraceFormat) {
    throw Error(ErrorKind::kConfig,
                std::string("not a trace document (expected format ") +
                    kTraceFormat + ")");
  }
  Trace t;
  t.eps = Field<double>(j, "eps");
  t.policy = ParsePolicyKind(Field<std::string>(j, "policy"));
  t.max_steps = Field<std::int64_t>(j, "max_steps");
  t.run_seed = Field<std::uint64_t>(j, "run_seed");
  t.converged = Field<bool>(j, "converged");
  t.t_con = OptionalField<std::int64_t>(j, "t_con");
  t.initial_profile = ProfileFromJson(Field<Json>(j, "initial_profile"));
  t.final_profile = ProfileFromJson(Field<Json>(j, "final_profile"));
  t.final_rates = Field<std::vector<double>>(j, "final_rates");
  for (const Json& s : Field<Json>(j, "steps")) {
    StepRecord r;
    r.t = Field<std::int64_t>(s, "t");
    r.actor = Field<PlayerId>(s, "actor");
    r.old_channel = Field<ChannelId>(s, "old");
    r.new_channel = Field<ChannelId>(s, "new");
    r.d1 = Field<double>(s, "d1");
    r.d2 = Field<double>(s, "d2");
    r.d3 = Field<double>(s, "d3");
    r.x_before = Field<double>(s, "x_before");
    r.x_after = Field<double>(s, "x_after");
    r.min_rate_after = Field<double>(s, "min_rate_after");
    r.deviator_count = Field<int>(s, "deviator_count");
    r.candidate_count = Field<int>(s, "candidate_count");
    t.steps.push_back(r);
  }
  return t;
}

std::string TraceToCsv(const Trace& trace) {
  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  for (const StepRecord& s : trace.steps) {
    out << s.t << ',' << s.actor << ',' << s.old_channel << ','
        << s.new_channel << ',' << FormatDouble(s.d1) << ','
        << FormatDouble(s.d2) << ',' << FormatDouble(s.d3) << ','
        << FormatDouble(s.x_after) << '\n';
  }
  return out.str();
}

Json DiagnosticsToJson(const DiagnosticsReport& r) {
  Json checks = Json::array();
  for (const DriftCheck& c : r.drift_checks) {
    checks.push_back({{"t", c.t},
                      {"actor", c.actor},
                      {"e1_plus_e2", c.e1_plus_e2},
                      {"e_total", c.e_total},
                      {"positive", c.positive}});
  }
  return Json{{"n_players", r.n_players},
              {"num_channels", r.num_channels},
              {"eps", r.eps},
              {"q", r.q},
              {"load", r.load},
              {"rho", r.rho},
              {"near_counts", r.near_counts},
              {"far_counts", r.far_counts},
              {"near_bound", r.near_bound},
              {"far_bound", r.far_bound},
              {"eps_set_min", r.eps_set_min},
              {"eps_set_bound", r.eps_set_bound},
              {"utility_gap_max", r.utility_gap_max},
              {"drift_checks", std::move(checks)},
              {"drift_violations", r.drift_violations},
              {"cbar", r.cbar},
              {"gamma", r.gamma},
              {"drift_lower_bound", r.drift_lower_bound},
              {"t_hat", r.t_hat},
              {"t_con", OptionalJson(r.t_con)}};
}

}  // namespace ibr
