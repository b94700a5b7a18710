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

#include "ibr/experiment.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "ibr/serialization.h"

namespace ibr {
namespace {

using Inputs = std::vector<std::string>;

[[noreturn]] void BadValue(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::kConfig, key + ": " + why);
}

const std::string& Single(const std::string& key, const Inputs& in) {
  if (in.size() != 1) BadValue(key, "expected a single value");
  return in.front();
}

double ToDouble(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end || !std::isfinite(v)) {
    BadValue(key, "'" + text + "' is not a number");
  }
  return v;
}

std::int64_t ToInt(const std::string& key, const std::string& text) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    BadValue(key, "'" + text + "' is not an integer");
  }
  return v;
}

std::uint64_t ToUint(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    BadValue(key, "'" + text + "' is not an unsigned integer");
  }
  return v;
}

bool ToBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") {
    return true;
  }
  if (text == "false" || text == "0" || text == "no" || text == "off") {
    return false;
  }
  BadValue(key, "'" + text + "' is not a boolean");
}

int ToIntIn(const std::string& key, const std::string& text) {
  const std::int64_t v = ToInt(key, text);
  if (v < INT32_MIN || v > INT32_MAX) BadValue(key, "out of range");
  return static_cast<int>(v);
}

bool IsNone(const std::string& text) { return text == "none" || text.empty(); }

using Setter = std::function<void(ExperimentConfig&, const std::string&,
                                  const Inputs&)>;

// Key -> (setter, printer). The printer feeds the canonical text.
struct KeySpec {
  Setter set;
  std::function<std::string(const ExperimentConfig&)> show;
};

template <typename T>
std::string JoinList(const std::vector<T>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) {
      out += FormatDouble(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out + "]";
}

std::string ShowOptional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : "none";
}

const std::map<std::string, KeySpec>& KeyTable() {
  static const auto* table = new std::map<std::string, KeySpec>{
      {"preset",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.preset = ParsePreset(Single(k, in));
        },
        [](const ExperimentConfig& c) { return std::string(PresetName(c.preset)); }}},
      {"seed",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.seed = ToUint(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); }}},
      {"realizations",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.realizations = ToIntIn(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.realizations); }}},
      {"threads",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.threads = ToIntIn(k, Single(k, in));
        },
        // Scheduling only; excluded from the hash.
        nullptr}},
      {"network.n_players",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.n_players.clear();
          for (const auto& s : in) c.n_players.push_back(ToIntIn(k, s));
        },
        [](const ExperimentConfig& c) { return JoinList(c.n_players); }}},
      {"network.channels",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.channels.clear();
          c.loads.clear();
          for (const auto& s : in) c.channels.push_back(ToIntIn(k, s));
        },
        [](const ExperimentConfig& c) { return JoinList(c.channels); }}},
      {"network.load",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.loads.clear();
          c.channels.clear();
          for (const auto& s : in) c.loads.push_back(ToDouble(k, s));
        },
        [](const ExperimentConfig& c) { return JoinList(c.loads); }}},
      {"network.neighbor_count",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.neighbor_count = ToIntIn(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.neighbor_count); }}},
      {"network.fanin_limit",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          const std::string& v = Single(k, in);
          c.fanin_limit = IsNone(v) ? std::nullopt
                                    : std::optional<int>(ToIntIn(k, v));
        },
        [](const ExperimentConfig& c) {
          return c.fanin_limit ? std::to_string(*c.fanin_limit)
                               : std::string("none");
        }}},
      {"network.max_link_distance",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          const std::string& v = Single(k, in);
          c.max_link_distance = IsNone(v)
                                    ? std::nullopt
                                    : std::optional<double>(ToDouble(k, v));
        },
        [](const ExperimentConfig& c) { return ShowOptional(c.max_link_distance); }}},
      {"network.orientation",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          try {
            c.orientation = ParseOrientationMode(Single(k, in));
          } catch (const Error& e) {
            BadValue(k, e.what());
          }
        },
        [](const ExperimentConfig& c) {
          return std::string(OrientationModeName(c.orientation));
        }}},
      {"network.region",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          const std::string& v = Single(k, in);
          if (v == "disk") {
            c.region_shape = RegionSpec::Shape::kDisk;
          } else if (v == "rectangle") {
            c.region_shape = RegionSpec::Shape::kRectangle;
          } else {
            BadValue(k, "expected disk or rectangle");
          }
        },
        [](const ExperimentConfig& c) {
          return std::string(c.region_shape == RegionSpec::Shape::kDisk
                                 ? "disk"
                                 : "rectangle");
        }}},
      {"network.radius",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.region_radius = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.region_radius); }}},
      {"network.width",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.region_width = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.region_width); }}},
      {"network.height",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.region_height = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.region_height); }}},
      {"radio.alpha",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.radio.alpha = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.radio.alpha); }}},
      {"radio.wavelength",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.radio.wavelength = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.radio.wavelength); }}},
      {"radio.noise_n0",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.radio.noise_n0 = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.radio.noise_n0); }}},
      {"radio.theta_t",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.radio.theta_t = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.radio.theta_t); }}},
      {"radio.theta_r",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.radio.theta_r = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.radio.theta_r); }}},
      {"radio.snr_target_db",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          const std::string& v = Single(k, in);
          c.radio.snr_target_db = IsNone(v)
                                      ? std::nullopt
                                      : std::optional<double>(ToDouble(k, v));
        },
        [](const ExperimentConfig& c) { return ShowOptional(c.radio.snr_target_db); }}},
      {"radio.p0",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          const std::string& v = Single(k, in);
          c.radio.p0 = IsNone(v) ? std::nullopt
                                 : std::optional<double>(ToDouble(k, v));
        },
        [](const ExperimentConfig& c) { return ShowOptional(c.radio.p0); }}},
      {"radio.power_cap",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.radio.power_cap_enabled = ToBool(k, Single(k, in));
        },
        [](const ExperimentConfig& c) {
          return std::string(c.radio.power_cap_enabled ? "true" : "false");
        }}},
      {"dynamics.eps",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.eps.clear();
          for (const auto& s : in) c.eps.push_back(ToDouble(k, s));
        },
        [](const ExperimentConfig& c) { return JoinList(c.eps); }}},
      {"dynamics.policy",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          try {
            c.policy = ParsePolicyKind(Single(k, in));
          } catch (const Error& e) {
            BadValue(k, e.what());
          }
        },
        [](const ExperimentConfig& c) { return std::string(PolicyKindName(c.policy)); }}},
      {"dynamics.max_steps",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.max_steps = ToInt(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.max_steps); }}},
      {"dynamics.initial",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          try {
            c.initial_mode = ParseInitialMode(Single(k, in));
          } catch (const Error& e) {
            BadValue(k, e.what());
          }
        },
        [](const ExperimentConfig& c) {
          return std::string(InitialModeName(c.initial_mode));
        }}},
      {"dynamics.paranoid",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.paranoid = ToBool(k, Single(k, in));
        },
        [](const ExperimentConfig& c) {
          return std::string(c.paranoid ? "true" : "false");
        }}},
      {"analysis.q",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.q = ToDouble(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return FormatDouble(c.q); }}},
      {"analysis.baseline_samples",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.baseline_samples = ToIntIn(k, Single(k, in));
        },
        [](const ExperimentConfig& c) { return std::to_string(c.baseline_samples); }}},
      {"output.dir",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.out_dir = Single(k, in);
        },
        nullptr}},
      {"output.keep_traces",
       {[](ExperimentConfig& c, const std::string& k, const Inputs& in) {
          c.keep_traces = ToBool(k, Single(k, in));
        },
        nullptr}},
  };
  return *table;
}

void SetKey(ExperimentConfig& c, const std::string& key, const Inputs& in) {
  const auto& table = KeyTable();
  const auto it = table.find(key);
  if (it == table.end()) {
    throw Error(ErrorKind::kConfig, key + ": unknown key");
  }
  if (in.empty()) BadValue(key, "missing value");
  it->second.set(c, key, in);
}

std::string JoinInputs(const Inputs& in) {
  if (in.size() == 1) return in.front();
  std::string out = "[";
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (i) out += ",";
    out += in[i];
  }
  return out + "]";
}

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double Quantile(std::vector<double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double pos = p * (sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

std::string Hex(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << v;
  return out.str();
}

}  // namespace

const char* PresetName(Preset preset) {
  switch (preset) {
    case Preset::kFig3: return "fig3";
    case Preset::kFig4: return "fig4";
    case Preset::kFig5: return "fig5";
    case Preset::kFig6: return "fig6";
    case Preset::kCustom: return "custom";
  }
  return "custom";
}

Preset ParsePreset(const std::string& name) {
  for (Preset p : {Preset::kFig3, Preset::kFig4, Preset::kFig5, Preset::kFig6,
                   Preset::kCustom}) {
    if (name == PresetName(p)) return p;
  }
  throw Error(ErrorKind::kConfig, "preset: unknown preset '" + name +
                                      "' (fig3, fig4, fig5, fig6, custom)");
}

const std::vector<std::string>& ConfigKeys() {
  static const auto* keys = [] {
    auto* v = new std::vector<std::string>;
    for (const auto& [k, spec] : KeyTable()) v->push_back(k);
    return v;
  }();
  return *keys;
}

RegionSpec ExperimentConfig::Region() const {
  return region_shape == RegionSpec::Shape::kDisk
             ? RegionSpec::Disk(region_radius)
             : RegionSpec::Rectangle(region_width, region_height);
}

std::string ExperimentConfig::CanonicalText() const {
  std::string out;
  for (const auto& [key, spec] : KeyTable()) {
    if (!spec.show) continue;
    out += key + " = " + spec.show(*this) + "\n";
  }
  return out;
}

std::uint64_t ExperimentConfig::Hash() const {
  // FNV-1a, 64-bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : CanonicalText()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ExperimentConfig::Validate() const {
  auto fail = [](const std::string& key, const std::string& why) {
    BadValue(key, why);
  };
  if (realizations < 1) fail("realizations", "must be >= 1");
  if (threads < 0) fail("threads", "must be >= 0");
  if (n_players.empty()) fail("network.n_players", "empty grid");
  for (int n : n_players) {
    if (n < 2) fail("network.n_players", "every N must be >= 2");
  }
  if (channels.empty() == loads.empty()) {
    fail("network.channels", "set exactly one of network.channels and "
                             "network.load");
  }
  for (int k : channels) {
    if (k < 1) fail("network.channels", "every K must be >= 1");
  }
  for (double l : loads) {
    if (!(l > 0.0)) fail("network.load", "every load must be positive");
  }
  if (eps.empty()) fail("dynamics.eps", "empty grid");
  for (double e : eps) {
    if (!(e > 0.0)) fail("dynamics.eps", "every eps must be positive");
  }
  if (neighbor_count < 1) fail("network.neighbor_count", "must be >= 1");
  if (fanin_limit && *fanin_limit < 1) {
    fail("network.fanin_limit", "must be >= 1");
  }
  if (max_link_distance && !(*max_link_distance > 0.0)) {
    fail("network.max_link_distance", "must be positive");
  }
  if (max_steps < 0) fail("dynamics.max_steps", "must be >= 0");
  if (!(q > 1.0)) fail("analysis.q", "must be > 1");
  if (baseline_samples < 0) fail("analysis.baseline_samples", "must be >= 0");
  try {
    Region();
  } catch (const Error& e) {
    fail("network.region", e.what());
  }
  try {
    radio.Validate();
  } catch (const Error& e) {
    fail("radio", e.what());
  }
}

ExperimentConfig PresetConfig(Preset preset) {
  ExperimentConfig c;
  c.preset = preset;
  switch (preset) {
    case Preset::kFig3:
      c.n_players = {50};
      c.channels = {5};
      c.eps = {0.1};
      c.realizations = 1;
      c.radio.theta_t = 2.0 * kPi / 3.0;
      c.radio.theta_r = 2.0 * kPi;
      c.orientation = OrientationMode::kAimed;
      c.keep_traces = true;
      break;
    case Preset::kFig4:
      c.n_players = {50, 100, 200, 300, 400};
      c.loads = {10.0};
      c.eps = {0.1};
      c.realizations = 100;
      break;
    case Preset::kFig5:
      c.n_players = {300};
      c.loads = {1, 2, 3, 4, 5, 6, 10, 15, 20};
      c.eps = {0.5};
      c.realizations = 100;
      break;
    case Preset::kFig6:
      c.n_players = {200};
      c.channels = {50};
      c.eps = {0.01, 0.1, 0.5, 1.0, 1.5, 2.0, 2.5};
      c.realizations = 200;
      break;
    case Preset::kCustom:
      break;
  }
  return c;
}

void ApplyOverride(ExperimentConfig& config, const std::string& key,
                   const std::string& value) {
  std::istringstream in(key + " = " + value + "\n");
  std::vector<CLI::ConfigItem> items = CLI::ConfigTOML().from_config(in);
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    const std::string full = item.fullname();
    if (full == "preset") {
      throw Error(ErrorKind::kConfig, "preset: cannot be overridden");
    }
    SetKey(config, full, item.inputs);
    config.overrides.push_back(full + "=" + JoinInputs(item.inputs));
  }
}

ExperimentConfig ParseConfig(const std::string& text) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw Error(ErrorKind::kConfig, std::string("malformed config: ") + e.what());
  }
  std::erase_if(items, [](const CLI::ConfigItem& item) {
    return item.name == "++" || item.name == "--";
  });

  Preset preset = Preset::kCustom;
  for (const auto& item : items) {
    if (item.fullname() == "preset") {
      preset = ParsePreset(Single("preset", item.inputs));
    }
  }
  ExperimentConfig config = PresetConfig(preset);
  for (const auto& item : items) {
    const std::string key = item.fullname();
    if (key == "preset") continue;
    SetKey(config, key, item.inputs);
    if (preset != Preset::kCustom) {
      config.overrides.push_back(key + "=" + JoinInputs(item.inputs));
    }
  }

  if (preset == Preset::kCustom) {
    std::vector<std::string> missing;
    if (config.n_players.empty()) missing.push_back("network.n_players");
    if (config.channels.empty() && config.loads.empty()) {
      missing.push_back("network.channels|network.load");
    }
    if (config.eps.empty()) missing.push_back("dynamics.eps");
    if (!missing.empty()) {
      std::string msg = "custom config is missing required keys:";
      for (const auto& k : missing) msg += " " + k;
      throw Error(ErrorKind::kConfig, msg);
    }
  }
  config.Validate();
  return config;
}

std::vector<GridPoint> ExpandGrid(const ExperimentConfig& config) {
  std::vector<GridPoint> grid;
  for (int n : config.n_players) {
    std::vector<int> ks = config.channels;
    for (double l : config.loads) {
      ks.push_back(std::max(1, static_cast<int>(std::lround(n / l))));
    }
    for (int k : ks) {
      for (double e : config.eps) {
        grid.push_back({static_cast<int>(grid.size()), n, k, e});
      }
    }
  }
  return grid;
}

std::uint64_t NetworkSeed(std::uint64_t master, int n_players,
                          int realization) {
  return DeriveSeed(master, {static_cast<std::uint64_t>(n_players),
                             static_cast<std::uint64_t>(realization)});
}

std::uint64_t RunSeed(std::uint64_t master, const GridPoint& point,
                      int realization) {
  return DeriveSeed(master, {static_cast<std::uint64_t>(point.n_players),
                             static_cast<std::uint64_t>(point.num_channels),
                             std::bit_cast<std::uint64_t>(point.eps),
                             static_cast<std::uint64_t>(realization)});
}

NetworkSpec SpecFor(const ExperimentConfig& config, const GridPoint& point) {
  NetworkSpec spec;
  spec.region = config.Region();
  spec.n_players = point.n_players;
  spec.num_channels = point.num_channels;
  spec.radio = config.radio;
  spec.orientation = config.orientation;
  spec.neighbor_count = config.neighbor_count;
  spec.fanin_limit = config.fanin_limit;
  spec.max_link_distance = config.max_link_distance;
  return spec;
}

SweepRow RunTask(const ExperimentConfig& config, const GridPoint& point,
                 int realization, Trace* trace_out) {
  SweepRow row;
  row.grid_index = point.index;
  row.realization = realization;
  row.network_seed = NetworkSeed(config.seed, point.n_players, realization);
  row.run_seed = RunSeed(config.seed, point, realization);
  row.n_players = point.n_players;
  row.num_channels = point.num_channels;
  row.eps = point.eps;
  try {
    const NetworkRealization net =
        BuildRealization(SpecFor(config, point), row.network_seed);
    RunOptions options;
    options.max_steps = config.max_steps;
    options.initial_mode = config.initial_mode;
    options.paranoid = config.paranoid;
    Trace trace = Run(net, point.eps, SchedulePolicy::FromKind(config.policy),
                      options, row.run_seed);

    row.converged = trace.converged;
    row.t_con = trace.t_con;
    row.steps = static_cast<std::int64_t>(trace.steps.size());
    row.mean_rate = trace.MeanRate();
    row.min_rate = trace.MinRate();
    row.cbar = MeanInterferenceFreeRate(net);
    // Without an SNR target, compare against the SNR matching cbar.
    const double snr = config.radio.snr_target_db
                           ? std::pow(10.0, *config.radio.snr_target_db / 10.0)
                           : std::exp2(row.cbar) - 1.0;
    row.tdma_slot = BaselineTdma(point.load(), snr, true);
    row.tdma_frame = BaselineTdma(point.load(), snr, false);
    if (config.baseline_samples > 0) {
      Engine rng(DeriveSeed(row.network_seed,
                            {static_cast<std::uint64_t>(Stream::kBaseline),
                             static_cast<std::uint64_t>(point.num_channels)}));
      row.random_rate = BaselineRandom(net, rng, config.baseline_samples);
    }
    row.t_hat = ConvergenceTimeBound(row.cbar, point.eps, point.n_players,
                                     config.policy);
    const Lemma5Report drift = CheckLemma5(net, trace);
    row.drift_checks = static_cast<int>(drift.checks.size());
    row.drift_violations = drift.violations;
    if (trace_out != nullptr) *trace_out = std::move(trace);
  } catch (const Error& e) {
    row.status = ErrorKindName(e.kind());
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = "internal";
    row.message = e.what();
  }
  return row;
}

SweepResult RunSweep(const ExperimentConfig& config, const RowCallback& on_row) {
  config.Validate();
  SweepResult result;
  result.config = config;
  result.grid = ExpandGrid(config);

  const std::size_t total = result.grid.size() * config.realizations;
  const int threads =
      config.threads > 0
          ? config.threads
          : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const GridPoint& point = result.grid[task / config.realizations];
      const int r = static_cast<int>(task % config.realizations);
      Trace trace;
      SweepRow row = RunTask(config, point, r,
                             config.keep_traces ? &trace : nullptr);
      std::lock_guard<std::mutex> lock(mu);
      if (on_row) on_row(row);
      if (config.keep_traces && row.ok()) {
        result.traces.emplace(std::make_pair(point.index, r), std::move(trace));
      }
      result.rows.push_back(std::move(row));
    }
  };
  {
    std::vector<std::jthread> pool;
    const int n = static_cast<int>(
        std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  }
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              return std::tie(a.grid_index, a.realization) <
                     std::tie(b.grid_index, b.realization);
            });
  return result;
}

std::vector<const SweepRow*> SweepResult::RowsAt(int grid_index) const {
  std::vector<const SweepRow*> out;
  for (const SweepRow& r : rows) {
    if (r.grid_index == grid_index) out.push_back(&r);
  }
  return out;
}

int SweepResult::FailedRows() const {
  return static_cast<int>(std::count_if(
      rows.begin(), rows.end(), [](const SweepRow& r) { return !r.ok(); }));
}

std::string RowToCsv(const SweepRow& r) {
  std::ostringstream out;
  out << r.grid_index << ',' << r.realization << ',' << r.network_seed << ','
      << r.run_seed << ',' << r.n_players << ',' << r.num_channels << ','
      << FormatDouble(r.eps) << ',' << r.status << ','
      << (r.converged ? 1 : 0) << ','
      << (r.t_con ? std::to_string(*r.t_con) : std::string()) << ','
      << r.steps << ',' << FormatDouble(r.mean_rate) << ','
      << FormatDouble(r.min_rate) << ',' << FormatDouble(r.cbar) << ','
      << FormatDouble(r.tdma_slot) << ',' << FormatDouble(r.tdma_frame) << ','
      << FormatDouble(r.random_rate) << ',' << FormatDouble(r.t_hat) << ','
      << r.drift_checks << ',' << r.drift_violations << ','
      << CsvField(r.message);
  return out.str();
}

std::vector<Aggregate> Summarize(const SweepResult& result) {
  std::vector<Aggregate> out;
  for (const GridPoint& point : result.grid) {
    Aggregate a;
    a.point = point;
    std::vector<double> t_cons;
    int ok = 0;
    for (const SweepRow* r : result.RowsAt(point.index)) {
      ++a.rows;
      if (!r->ok()) {
        ++a.failed;
        continue;
      }
      ++ok;
      if (r->converged) {
        ++a.converged;
        t_cons.push_back(static_cast<double>(*r->t_con));
      } else {
        ++a.censored;
      }
      a.mean_rate += r->mean_rate;
      a.min_rate += r->min_rate;
      a.cbar += r->cbar;
      a.tdma_slot += r->tdma_slot;
      a.tdma_frame += r->tdma_frame;
      a.random_rate += r->random_rate;
      a.t_hat += r->t_hat;
      a.drift_clean += r->drift_violations == 0;
    }
    if (ok > 0) {
      for (double* f : {&a.mean_rate, &a.min_rate, &a.cbar, &a.tdma_slot,
                        &a.tdma_frame, &a.random_rate, &a.t_hat}) {
        *f /= ok;
      }
    }
    if (!t_cons.empty()) {
      std::sort(t_cons.begin(), t_cons.end());
      double sum = 0.0;
      for (double t : t_cons) sum += t;
      a.t_con_mean = sum / t_cons.size();
      a.t_con_q10 = Quantile(t_cons, 0.1);
      a.t_con_q50 = Quantile(t_cons, 0.5);
      a.t_con_q90 = Quantile(t_cons, 0.9);
    }
    out.push_back(a);
  }
  return out;
}

std::string ProvenanceLine(const ExperimentConfig& config) {
  std::string line = "# config_hash=" + Hex(config.Hash()) +
                     " seed=" + std::to_string(config.seed) +
                     " preset=" + PresetName(config.preset);
  if (!config.overrides.empty()) {
    line += " overrides=";
    for (std::size_t i = 0; i < config.overrides.size(); ++i) {
      if (i) line += ";";
      line += config.overrides[i];
    }
  }
  return line;
}

std::vector<OutputFile> EmitSweepTables(const SweepResult& result) {
  const std::string head = ProvenanceLine(result.config) + "\n";
  std::string rows = head + kRowCsvHeader + "\n";
  for (const SweepRow& r : result.rows) rows += RowToCsv(r) + "\n";

  std::ostringstream sum;
  sum << head << kSummaryCsvHeader << '\n';
  for (const Aggregate& a : Summarize(result)) {
    sum << a.point.index << ',' << a.point.n_players << ','
        << a.point.num_channels << ',' << FormatDouble(a.point.load()) << ','
        << FormatDouble(a.point.eps) << ',' << a.rows << ',' << a.failed << ','
        << a.converged << ',' << a.censored << ','
        << FormatDouble(a.t_con_mean) << ',' << FormatDouble(a.t_con_q10)
        << ',' << FormatDouble(a.t_con_q50) << ','
        << FormatDouble(a.t_con_q90) << ',' << FormatDouble(a.mean_rate)
        << ',' << FormatDouble(a.min_rate) << ',' << FormatDouble(a.cbar)
        << ',' << FormatDouble(a.tdma_slot) << ','
        << FormatDouble(a.tdma_frame) << ',' << FormatDouble(a.random_rate)
        << ',' << FormatDouble(a.t_hat) << ',' << a.drift_clean << '\n';
  }
  return {{"rows.csv", rows}, {"summary.csv", sum.str()}};
}

std::vector<OutputFile> EmitFigureData(const SweepResult& result,
                                       Preset figure) {
  const std::string head = ProvenanceLine(result.config) + "\n";
  auto distinct = [&](auto field) {
    std::vector<double> values;
    for (const GridPoint& p : result.grid) {
      const double v = field(p);
      if (std::find(values.begin(), values.end(), v) == values.end()) {
        values.push_back(v);
      }
    }
    return values.size();
  };
  const std::size_t ns = distinct([](const GridPoint& p) { return double(p.n_players); });
  const std::size_t ks = distinct([](const GridPoint& p) { return double(p.num_channels); });
  const std::size_t es = distinct([](const GridPoint& p) { return p.eps; });
  const std::vector<Aggregate> aggs = Summarize(result);

  switch (figure) {
    case Preset::kFig3: {
      if (result.traces.empty()) {
        throw Error(ErrorKind::kShape, "fig3 needs a kept trace");
      }
      const auto& [key, trace] = *result.traces.begin();
      const int n = result.grid[key.first].n_players;
      std::ostringstream out;
      out << head << "t,mean_rate,min_rate,x_after\n";
      if (trace.steps.empty()) {
        out << "0," << FormatDouble(trace.MeanRate()) << ','
            << FormatDouble(trace.MinRate()) << ','
            << FormatDouble(trace.MeanRate() * n) << '\n';
      }
      for (const StepRecord& s : trace.steps) {
        out << s.t + 1 << ',' << FormatDouble(s.x_after / n) << ','
            << FormatDouble(s.min_rate_after) << ','
            << FormatDouble(s.x_after) << '\n';
      }
      return {{"fig3.csv", out.str()}};
    }
    case Preset::kFig4: {
      if (result.grid.size() != ns) {
        throw Error(ErrorKind::kShape,
                    "fig4 needs exactly one grid point per N");
      }
      std::ostringstream out;
      out << head;
      for (const Aggregate& a : aggs) {
        out << "# n_players=" << a.point.n_players << " rows=" << a.rows
            << " converged=" << a.converged << " censored=" << a.censored
            << " failed=" << a.failed << '\n';
      }
      out << "n_players,t_con,cdf\n";
      for (const Aggregate& a : aggs) {
        std::vector<std::int64_t> t;
        for (const SweepRow* r : result.RowsAt(a.point.index)) {
          if (r->ok() && r->converged) t.push_back(*r->t_con);
        }
        std::sort(t.begin(), t.end());
        // Censored runs stay in the denominator, so the curve tops out at
        // converged / usable rows.
        const int usable = a.rows - a.failed;
        for (std::size_t i = 0; i < t.size(); ++i) {
          if (i + 1 < t.size() && t[i + 1] == t[i]) continue;
          out << a.point.n_players << ',' << t[i] << ','
              << FormatDouble(static_cast<double>(i + 1) / usable) << '\n';
        }
      }
      return {{"fig4_cdf.csv", out.str()}};
    }
    case Preset::kFig5: {
      if (ns != 1 || es != 1) {
        throw Error(ErrorKind::kShape, "fig5 needs a single N and eps");
      }
      std::ostringstream out;
      out << head
          << "load,num_channels,mean_rate,tdma_slot,tdma_frame,random_rate,"
             "ratio_slot,ratio_frame\n";
      for (const Aggregate& a : aggs) {
        out << FormatDouble(a.point.load()) << ',' << a.point.num_channels
            << ',' << FormatDouble(a.mean_rate) << ','
            << FormatDouble(a.tdma_slot) << ',' << FormatDouble(a.tdma_frame)
            << ',' << FormatDouble(a.random_rate) << ','
            << FormatDouble(a.mean_rate / a.tdma_slot) << ','
            << FormatDouble(a.mean_rate / a.tdma_frame) << '\n';
      }
      return {{"fig5.csv", out.str()}};
    }
    case Preset::kFig6: {
      if (ns != 1 || ks != 1) {
        throw Error(ErrorKind::kShape, "fig6 needs a single N and K");
      }
      std::ostringstream out;
      out << head << "eps,t_con_mean,mean_rate,min_rate,converged,censored\n";
      for (const Aggregate& a : aggs) {
        out << FormatDouble(a.point.eps) << ',' << FormatDouble(a.t_con_mean)
            << ',' << FormatDouble(a.mean_rate) << ','
            << FormatDouble(a.min_rate) << ',' << a.converged << ','
            << a.censored << '\n';
      }
      return {{"fig6.csv", out.str()}};
    }
    case Preset::kCustom:
      break;
  }
  throw Error(ErrorKind::kShape, "custom sweeps have no figure layout");
}

void WriteOutputs(const std::string& dir,
                  const std::vector<OutputFile>& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorKind::kConfig, "cannot create " + dir + ": " + ec.message());
  }
  for (const OutputFile& f : files) {
    const std::filesystem::path path = std::filesystem::path(dir) / f.name;
    std::ofstream out(path, std::ios::binary);
    out << f.content;
    if (!out) {
      throw Error(ErrorKind::kConfig, "cannot write " + path.string());
    }
  }
}

}  // namespace ibr
