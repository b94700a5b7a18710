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

#ifndef IBR_EXPERIMENT_H_
#define IBR_EXPERIMENT_H_

// Experiment configuration, the figure presets, Monte Carlo sweeps and the
// CSV files derived from them.
//
// Config documents are flat `key = value` lines. Keys live in sections,
// written either as a `[section]` header or as a `section.key` prefix:
//
//   preset = fig4
//   seed = 7
//   [dynamics]
//   eps = 0.5
//   network.n_players = [100, 200]

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ibr/analysis.h"
#include "ibr/channel.h"
#include "ibr/dynamics.h"
#include "ibr/errors.h"

namespace ibr {

enum class Preset { kFig3, kFig4, kFig5, kFig6, kCustom };

const char* PresetName(Preset preset);
Preset ParsePreset(const std::string& name);

struct ExperimentConfig {
  Preset preset = Preset::kCustom;
  std::uint64_t seed = 1;
  int realizations = 1;
  // 0 uses every hardware thread.
  int threads = 0;

  std::vector<int> n_players;
  // Exactly one of channels / loads is non-empty. A load l maps to
  // K = max(1, round(N / l)).
  std::vector<int> channels;
  std::vector<double> loads;
  std::vector<double> eps;

  RegionSpec::Shape region_shape = RegionSpec::Shape::kDisk;
  double region_radius = 10.0;
  double region_width = 1.0;
  double region_height = 1.0;
  RadioParams radio;
  OrientationMode orientation = OrientationMode::kOmni;
  int neighbor_count = 5;
  std::optional<int> fanin_limit;
  std::optional<double> max_link_distance;

  PolicyKind policy = PolicyKind::kDeviators;
  std::int64_t max_steps = 0;  // 0 selects 200 N
  InitialMode initial_mode = InitialMode::kUniform;
  bool paranoid = false;

  double q = kDefaultQ;
  int baseline_samples = 20;
  // Keep full traces in the result (fig3 needs the step series).
  bool keep_traces = false;

  std::string out_dir = "out";

  // Keys set on top of the preset, in application order, as "key=value".
  std::vector<std::string> overrides;

  // Canonical `key = value` rendering of every resolved field, sorted by
  // key. Its hash identifies the configuration in output files.
  std::string CanonicalText() const;
  RegionSpec Region() const;
  std::uint64_t Hash() const;
  // Throws kConfig naming the offending key.
  void Validate() const;
};

ExperimentConfig PresetConfig(Preset preset);

// Parses a config document on top of the selected preset (or custom
// defaults). Unknown keys and bad values throw kConfig with the key path;
// a custom config missing required keys throws kConfig listing them.
ExperimentConfig ParseConfig(const std::string& text);

// Applies one `key = value` override (section-qualified key) and records it.
void ApplyOverride(ExperimentConfig& config, const std::string& key,
                   const std::string& value);

// All config keys accepted by ParseConfig.
const std::vector<std::string>& ConfigKeys();

struct GridPoint {
  int index = 0;
  int n_players = 0;
  int num_channels = 0;
  double eps = 0.0;

  double load() const {
    return static_cast<double>(n_players) / num_channels;
  }
};

std::vector<GridPoint> ExpandGrid(const ExperimentConfig& config);

// Geometry depends on (master, N, realization) only, so all loads and eps
// values at one N share the same networks.
std::uint64_t NetworkSeed(std::uint64_t master, int n_players,
                          int realization);
std::uint64_t RunSeed(std::uint64_t master, const GridPoint& point,
                      int realization);

NetworkSpec SpecFor(const ExperimentConfig& config, const GridPoint& point);

struct SweepRow {
  int grid_index = 0;
  int realization = 0;
  std::uint64_t network_seed = 0;
  std::uint64_t run_seed = 0;
  int n_players = 0;
  int num_channels = 0;
  double eps = 0.0;
  std::string status = "ok";  // or an error-kind name
  std::string message;
  bool converged = false;
  std::optional<std::int64_t> t_con;
  std::int64_t steps = 0;
  double mean_rate = 0.0;
  double min_rate = 0.0;
  double cbar = 0.0;
  double tdma_slot = 0.0;
  double tdma_frame = 0.0;
  double random_rate = 0.0;
  double t_hat = 0.0;
  int drift_checks = 0;
  int drift_violations = 0;

  bool ok() const { return status == "ok"; }
  double load() const {
    return static_cast<double>(n_players) / num_channels;
  }
};

inline constexpr const char* kRowCsvHeader =
    "grid,realization,network_seed,run_seed,n_players,num_channels,eps,"
    "status,converged,t_con,steps,mean_rate,min_rate,cbar,tdma_slot,"
    "tdma_frame,random_rate,t_hat,drift_checks,drift_violations,message";
std::string RowToCsv(const SweepRow& row);

struct SweepResult {
  ExperimentConfig config;
  std::vector<GridPoint> grid;
  // Sorted by (grid_index, realization).
  std::vector<SweepRow> rows;
  // Keyed by (grid_index, realization) when config.keep_traces.
  std::map<std::pair<int, int>, Trace> traces;

  std::vector<const SweepRow*> RowsAt(int grid_index) const;
  int FailedRows() const;
};

// One (grid point, realization) task: build, run, diagnose. Errors become
// rows with a non-ok status.
SweepRow RunTask(const ExperimentConfig& config, const GridPoint& point,
                 int realization, Trace* trace_out = nullptr);

using RowCallback = std::function<void(const SweepRow&)>;

// Runs every task on a worker pool. `on_row` is called once per finished
// row, serialized, in completion order.
SweepResult RunSweep(const ExperimentConfig& config,
                     const RowCallback& on_row = {});

struct Aggregate {
  GridPoint point;
  int rows = 0;
  int failed = 0;
  int converged = 0;
  int censored = 0;
  double t_con_mean = 0.0;  // over converged rows
  double t_con_q10 = 0.0;
  double t_con_q50 = 0.0;
  double t_con_q90 = 0.0;
  double mean_rate = 0.0;
  double min_rate = 0.0;  // mean over rows of the per-run minimum
  double cbar = 0.0;
  double tdma_slot = 0.0;
  double tdma_frame = 0.0;
  double random_rate = 0.0;
  double t_hat = 0.0;
  int drift_clean = 0;  // rows with zero drift violations
};

std::vector<Aggregate> Summarize(const SweepResult& result);

inline constexpr const char* kSummaryCsvHeader =
    "grid,n_players,num_channels,load,eps,rows,failed,converged,censored,"
    "t_con_mean,t_con_q10,t_con_q50,t_con_q90,mean_rate,min_rate,cbar,"
    "tdma_slot,tdma_frame,random_rate,t_hat,drift_clean";

struct OutputFile {
  std::string name;
  std::string content;
};

// "# config_hash=<hex> seed=<n> preset=<name> [overrides=...]".
std::string ProvenanceLine(const ExperimentConfig& config);

// rows.csv and summary.csv, each starting with the provenance line.
std::vector<OutputFile> EmitSweepTables(const SweepResult& result);

// Figure CSVs. Throws kShape when the result's grid does not have the
// figure's shape.
std::vector<OutputFile> EmitFigureData(const SweepResult& result,
                                       Preset figure);

// Writes files under dir, creating it. Throws kConfig on I/O failure.
void WriteOutputs(const std::string& dir,
                  const std::vector<OutputFile>& files);

}  // namespace ibr

#endif  // IBR_EXPERIMENT_H_
