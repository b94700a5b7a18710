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

// ibrsim: command-line front end for random interference game sweeps.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 a sweep finished
// with failed rows or a verification check failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ibr/analysis.h"
#include "ibr/experiment.h"
#include "ibr/serialization.h"

namespace {

using namespace ibr;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFailed = 2;

struct CommonFlags {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool paranoid = false;
  std::string policy;
  std::optional<std::int64_t> max_steps;
  std::optional<int> threads;
  std::vector<std::string> sets;
};

void AddCommon(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_path, "config file (key = value)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--preset", f.preset, "fig3, fig4, fig5, fig6 or custom");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--paranoid", f.paranoid,
                "recheck cached interference after every step");
  cmd->add_option("--policy", f.policy, "schedule")
      ->check(CLI::IsMember({"all", "deviators"}));
  cmd->add_option("--max-steps", f.max_steps, "step cap, 0 for 200 N");
  cmd->add_option("--threads", f.threads, "worker threads, 0 for all cores");
  cmd->add_option("--set", f.sets, "override, e.g. --set radio.alpha=4");
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfig, path + ": cannot open");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// File first, then --preset (later keys win), then flag overrides.
ExperimentConfig Resolve(const CommonFlags& f) {
  std::string text;
  if (!f.config_path.empty()) text = ReadFile(f.config_path);
  if (!f.preset.empty()) text += "\npreset = " + f.preset + "\n";
  ExperimentConfig config = ParseConfig(text);
  if (f.seed) ApplyOverride(config, "seed", std::to_string(*f.seed));
  if (!f.policy.empty()) ApplyOverride(config, "dynamics.policy", f.policy);
  if (f.max_steps) {
    ApplyOverride(config, "dynamics.max_steps", std::to_string(*f.max_steps));
  }
  if (f.paranoid) ApplyOverride(config, "dynamics.paranoid", "true");
  for (const std::string& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig, s + ": expected key=value");
    }
    ApplyOverride(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (f.threads) config.threads = *f.threads;
  if (!f.out.empty()) config.out_dir = f.out;
  config.Validate();
  return config;
}

const GridPoint& PointAt(const std::vector<GridPoint>& grid, int index) {
  if (index < 0 || index >= static_cast<int>(grid.size())) {
    throw Error(ErrorKind::kConfig,
                "--grid: index " + std::to_string(index) + " outside 0.." +
                    std::to_string(grid.size() - 1));
  }
  return grid[index];
}

NetworkRealization LoadOrBuild(const ExperimentConfig& config,
                               const GridPoint& point, int realization,
                               const std::string& network_path) {
  if (!network_path.empty()) {
    Json j;
    try {
      j = Json::parse(ReadFile(network_path));
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::kConfig, network_path + ": " + e.what());
    }
    return RealizationFromJson(j);
  }
  return BuildRealization(
      SpecFor(config, point),
      NetworkSeed(config.seed, point.n_players, realization));
}

std::string Provenanced(const ExperimentConfig& config,
                        const std::string& body) {
  return ProvenanceLine(config) + "\n" + body;
}

int CmdGen(const CommonFlags& f) {
  const ExperimentConfig config = Resolve(f);
  std::vector<OutputFile> files;
  std::vector<std::pair<int, int>> seen;  // (N, K)
  for (const GridPoint& p : ExpandGrid(config)) {
    if (std::find(seen.begin(), seen.end(),
                  std::pair{p.n_players, p.num_channels}) != seen.end()) {
      continue;
    }
    seen.emplace_back(p.n_players, p.num_channels);
    for (int r = 0; r < config.realizations; ++r) {
      const auto net = BuildRealization(
          SpecFor(config, p), NetworkSeed(config.seed, p.n_players, r));
      files.push_back({"net_N" + std::to_string(p.n_players) + "_K" +
                           std::to_string(p.num_channels) + "_r" +
                           std::to_string(r) + ".json",
                       RealizationToJson(net).dump() + "\n"});
    }
  }
  WriteOutputs(config.out_dir, files);
  std::cout << "wrote " << files.size() << " realizations to "
            << config.out_dir << "\n";
  return kExitOk;
}

int CmdRun(const CommonFlags& f, int grid_index, int realization,
           const std::string& network_path) {
  const ExperimentConfig config = Resolve(f);
  const auto grid = ExpandGrid(config);
  const GridPoint& point = PointAt(grid, grid_index);
  const auto net = LoadOrBuild(config, point, realization, network_path);

  RunOptions opt;
  opt.max_steps = config.max_steps;
  opt.initial_mode = config.initial_mode;
  opt.paranoid = config.paranoid;
  const Trace trace = Run(net, point.eps, SchedulePolicy::FromKind(config.policy),
                          opt, RunSeed(config.seed, point, realization));

  std::vector<OutputFile> files{
      {"realization.json", RealizationToJson(net).dump() + "\n"},
      {"trace.json", TraceToJson(trace).dump() + "\n"},
      {"trace.csv", Provenanced(config, TraceToCsv(trace))},
  };
  if (net.has_geometry()) {
    Engine rng(DeriveSeed(
        net.seed(), {static_cast<std::uint64_t>(Stream::kSampling)}));
    std::vector<StrategyProfile> samples;
    for (int i = 0; i < 3; ++i) {
      samples.push_back(
          StrategyProfile::Uniform(net.size(), net.num_channels(), rng));
    }
    const auto diag = BuildDiagnostics(net, point.eps, config.policy, samples,
                                       &trace, config.q);
    files.push_back({"diagnostics.json", DiagnosticsToJson(diag).dump(2) + "\n"});
  }
  WriteOutputs(config.out_dir, files);

  std::cout << "N=" << net.size() << " K=" << net.num_channels()
            << " eps=" << FormatDouble(point.eps) << " steps="
            << trace.steps.size() << " converged=" << trace.converged
            << " mean_rate=" << FormatDouble(trace.MeanRate())
            << " min_rate=" << FormatDouble(trace.MinRate()) << "\n";
  return kExitOk;
}

int CmdSweep(const CommonFlags& f) {
  const ExperimentConfig config = Resolve(f);
  std::filesystem::create_directories(config.out_dir);
  const auto partial_path =
      std::filesystem::path(config.out_dir) / "rows.partial.csv";
  std::ofstream partial(partial_path);
  if (!partial) {
    throw Error(ErrorKind::kConfig, partial_path.string() + ": cannot write");
  }
  partial << ProvenanceLine(config) << "\n" << kRowCsvHeader << "\n";
  partial.flush();

  const int total =
      static_cast<int>(ExpandGrid(config).size()) * config.realizations;
  int done = 0;
  const SweepResult result = RunSweep(config, [&](const SweepRow& row) {
    partial << RowToCsv(row) << "\n";
    partial.flush();
    ++done;
    if (!row.ok()) {
      std::cerr << "row " << row.grid_index << "/" << row.realization << ": "
                << row.status << ": " << row.message << "\n";
    }
    if (done % 50 == 0 || done == total) {
      std::cerr << done << "/" << total << " tasks\n";
    }
  });
  partial.close();

  std::vector<OutputFile> files = EmitSweepTables(result);
  if (config.preset != Preset::kCustom) {
    for (auto& file : EmitFigureData(result, config.preset)) {
      files.push_back(std::move(file));
    }
  }
  WriteOutputs(config.out_dir, files);
  std::filesystem::remove(partial_path);

  const int failed = result.FailedRows();
  std::cout << result.rows.size() << " rows, " << failed << " failed, outputs in "
            << config.out_dir << "\n";
  return failed == 0 ? kExitOk : kExitFailed;
}

// Re-runs the dynamics on each grid point with every available check on:
// paranoid cache verification, trace replay, and exhaustive equilibrium
// membership when the instance is small enough.
int CmdVerify(const CommonFlags& f, const std::string& network_path) {
  ExperimentConfig config = Resolve(f);
  int failures = 0;
  auto report = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
    failures += !ok;
  };

  for (const GridPoint& point : ExpandGrid(config)) {
    for (int r = 0; r < config.realizations; ++r) {
      const auto net = LoadOrBuild(config, point, r, network_path);
      const std::string tag = "N=" + std::to_string(net.size()) +
                              " K=" + std::to_string(net.num_channels()) +
                              " eps=" + FormatDouble(point.eps) +
                              " r=" + std::to_string(r);
      RunOptions opt;
      opt.max_steps = config.max_steps;
      opt.initial_mode = config.initial_mode;
      opt.paranoid = true;
      Trace trace;
      try {
        trace = Run(net, point.eps, SchedulePolicy::FromKind(config.policy),
                    opt, RunSeed(config.seed, point, r));
      } catch (const Error& e) {
        report(false, tag + " run: " + e.what());
        continue;
      }

      GameState replay(net, trace.initial_profile);
      bool replay_ok = true;
      for (const StepRecord& s : trace.steps) {
        const double before = replay.SumRate();
        replay.Move(s.actor, s.new_channel);
        const double after = replay.SumRate();
        replay_ok &= std::fabs(after - before - (s.d1 + s.d2 + s.d3)) <=
                     1e-9 * std::max(1.0, before);
        replay_ok &= !s.deviated() || s.d1 > point.eps / 2;
      }
      replay_ok &= replay.profile() == trace.final_profile;
      report(replay_ok, tag + " trace replay and decomposition");

      if (trace.converged) {
        report(IsEpsPne(net, trace.final_profile, point.eps),
               tag + " final profile is an equilibrium");
        if (std::pow(net.num_channels(), net.size()) <= kOracleProfileLimit) {
          const OracleResult oracle = OracleEnumerate(net, point.eps);
          report(oracle.Contains(trace.final_profile),
                 tag + " final profile found by exhaustive scan");
        }
      } else {
        std::cout << "note " << tag << " did not converge within "
                  << trace.max_steps << " steps\n";
      }

      // Asymptotic claims are reported, never gated on.
      if (net.has_geometry() && net.size() >= 2 && net.num_channels() > 0) {
        Engine rng(DeriveSeed(
            net.seed(), {static_cast<std::uint64_t>(Stream::kSampling)}));
        std::vector<StrategyProfile> samples;
        for (int i = 0; i < 3; ++i) {
          samples.push_back(
              StrategyProfile::Uniform(net.size(), net.num_channels(), rng));
        }
        try {
          const auto d = BuildDiagnostics(net, point.eps, config.policy,
                                          samples, &trace, config.q);
          std::cout << "info " << tag << " near max "
                    << *std::max_element(d.near_counts.begin(),
                                         d.near_counts.end())
                    << " (bound " << FormatDouble(d.near_bound) << "), far min "
                    << *std::min_element(d.far_counts.begin(),
                                         d.far_counts.end())
                    << " (bound " << FormatDouble(d.far_bound)
                    << "), min |B_eps| " << d.eps_set_min << " (bound "
                    << FormatDouble(d.eps_set_bound) << "), drift "
                    << d.drift_violations << "/" << d.drift_checks.size()
                    << " non-positive\n";
        } catch (const Error& e) {
          // Radii are undefined for some loads (q l <= 1).
          std::cout << "info " << tag << " no lemma report: " << e.what()
                    << "\n";
        }
      }
      if (!network_path.empty()) return failures == 0 ? kExitOk : kExitFailed;
    }
  }
  std::cout << (failures == 0 ? "verify: all checks passed\n"
                              : "verify: " + std::to_string(failures) +
                                    " checks failed\n");
  return failures == 0 ? kExitOk : kExitFailed;
}

int CmdBaseline(const CommonFlags& f) {
  const ExperimentConfig config = Resolve(f);
  std::ostringstream csv;
  csv << ProvenanceLine(config) << "\n"
      << "grid,realization,n_players,num_channels,load,cbar,tdma_slot,"
         "tdma_frame,random_rate\n";
  for (const GridPoint& p : ExpandGrid(config)) {
    for (int r = 0; r < config.realizations; ++r) {
      const std::uint64_t net_seed = NetworkSeed(config.seed, p.n_players, r);
      const auto net = BuildRealization(SpecFor(config, p), net_seed);
      const double cbar = MeanInterferenceFreeRate(net);
      const double snr = config.radio.snr_target_db
                             ? std::pow(10.0, *config.radio.snr_target_db / 10)
                             : std::exp2(cbar) - 1;
      Engine rng(DeriveSeed(net_seed,
                            {static_cast<std::uint64_t>(Stream::kBaseline),
                             static_cast<std::uint64_t>(p.num_channels)}));
      csv << p.index << "," << r << "," << p.n_players << ","
          << p.num_channels << "," << FormatDouble(p.load()) << ","
          << FormatDouble(cbar) << ","
          << FormatDouble(BaselineTdma(p.load(), snr, true)) << ","
          << FormatDouble(BaselineTdma(p.load(), snr, false)) << ","
          << FormatDouble(BaselineRandom(net, rng, config.baseline_samples))
          << "\n";
    }
  }
  WriteOutputs(config.out_dir, {{"baseline.csv", csv.str()}});
  std::cout << "wrote " << config.out_dir << "/baseline.csv\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random interference games under approximate best response"};
  app.require_subcommand(1);

  CommonFlags gen_f, run_f, sweep_f, verify_f, base_f;
  int grid_index = 0;
  int realization = 0;
  std::string run_network, verify_network;

  auto* gen = app.add_subcommand("gen", "generate network realizations");
  AddCommon(gen, gen_f);
  auto* run = app.add_subcommand("run", "run one trajectory");
  AddCommon(run, run_f);
  run->add_option("--grid", grid_index, "grid point index");
  run->add_option("--realization", realization, "realization index");
  run->add_option("--network", run_network, "realization JSON from gen")
      ->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep", "run a full sweep");
  AddCommon(sweep, sweep_f);
  auto* verify = app.add_subcommand("verify", "re-run with every check on");
  AddCommon(verify, verify_f);
  verify->add_option("--network", verify_network, "realization JSON from gen")
      ->check(CLI::ExistingFile);
  auto* baseline = app.add_subcommand("baseline", "TDMA and random baselines");
  AddCommon(baseline, base_f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return CmdGen(gen_f);
    if (*run) return CmdRun(run_f, grid_index, realization, run_network);
    if (*sweep) return CmdSweep(sweep_f);
    if (*verify) return CmdVerify(verify_f, verify_network);
    if (*baseline) return CmdBaseline(base_f);
  } catch (const Error& e) {
    std::cerr << "ibrsim: " << ErrorKindName(e.kind()) << ": " << e.what()
              << "\n";
    return e.kind() == ErrorKind::kConfig ? kExitConfig : kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "ibrsim: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitConfig;
}
