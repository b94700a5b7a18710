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

#include "ibr/dynamics.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ibr/errors.h"

namespace ibr {

const char* PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kAllPlayers: return "all";
    case PolicyKind::kDeviators: return "deviators";
    case PolicyKind::kCustom: return "custom";
  }
  return "deviators";
}

PolicyKind ParsePolicyKind(const std::string& name) {
  if (name == "all" || name == "all_players") return PolicyKind::kAllPlayers;
  if (name == "deviators") return PolicyKind::kDeviators;
  throw Error(ErrorKind::kConfig, "unknown schedule policy '" + name + "'");
}

SchedulePolicy SchedulePolicy::FromKind(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kAllPlayers: return AllPlayers();
    case PolicyKind::kDeviators: return Deviators();
    case PolicyKind::kCustom: break;
  }
  throw Error(ErrorKind::kConfig, "custom policies need a provider");
}

const char* InitialModeName(InitialMode mode) {
  return mode == InitialMode::kUniform ? "uniform" : "single";
}

InitialMode ParseInitialMode(const std::string& name) {
  if (name == "uniform") return InitialMode::kUniform;
  if (name == "single") return InitialMode::kSingleChannel;
  throw Error(ErrorKind::kConfig, "unknown initial profile mode '" + name + "'");
}

double Trace::MeanRate() const {
  if (final_rates.empty()) return 0.0;
  return std::accumulate(final_rates.begin(), final_rates.end(), 0.0) /
         static_cast<double>(final_rates.size());
}

double Trace::MinRate() const {
  if (final_rates.empty()) return 0.0;
  return *std::min_element(final_rates.begin(), final_rates.end());
}

std::vector<PlayerId> Candidates(const NetworkRealization& net,
                                 const StrategyProfile& profile, double eps,
                                 const SchedulePolicy& policy) {
  switch (policy.kind()) {
    case PolicyKind::kAllPlayers: {
      std::vector<PlayerId> all(net.size());
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    case PolicyKind::kDeviators: {
      std::vector<PlayerId> out;
      for (PlayerId n = 0; n < net.size(); ++n) {
        const std::vector<ChannelId> set = EpsBestSet(net, profile, n, eps);
        if (!std::binary_search(set.begin(), set.end(), profile[n])) {
          out.push_back(n);
        }
      }
      return out;
    }
    case PolicyKind::kCustom:
      return policy.provider()(GameState(net, profile), eps);
  }
  return {};
}

std::vector<PlayerId> Candidates(const GameState& state, double eps,
                                 const SchedulePolicy& policy) {
  switch (policy.kind()) {
    case PolicyKind::kAllPlayers: {
      std::vector<PlayerId> all(state.size());
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    case PolicyKind::kDeviators:
      return state.Deviators(eps);
    case PolicyKind::kCustom:
      return policy.provider()(state, eps);
  }
  return {};
}

std::optional<StepRecord> Step(GameState& state, double eps,
                               const SchedulePolicy& policy,
                               DynamicsStreams& rng, std::int64_t t) {
  const std::vector<PlayerId> deviators = state.Deviators(eps);
  if (deviators.empty()) return std::nullopt;

  std::vector<PlayerId> candidates =
      policy.kind() == PolicyKind::kDeviators ? deviators
                                              : Candidates(state, eps, policy);
  if (candidates.empty()) {
    throw Error(ErrorKind::kConsistency,
                "schedule offered no players outside an equilibrium");
  }

  StepRecord rec;
  rec.t = t;
  rec.deviator_count = static_cast<int>(deviators.size());
  rec.candidate_count = static_cast<int>(candidates.size());
  rec.actor = candidates[UniformIndex(rng.schedule, candidates.size())];
  rec.old_channel = state.profile()[rec.actor];
  rec.new_channel = rec.old_channel;

  const RateVector before = state.Rates();
  rec.x_before = std::accumulate(before.begin(), before.end(), 0.0);

  const std::optional<ChannelId> target =
      state.BestResponse(rec.actor, eps, rng.action);
  if (!target) {
    rec.x_after = rec.x_before;
    rec.min_rate_after = *std::min_element(before.begin(), before.end());
    return rec;
  }

  rec.new_channel = *target;
  state.Move(rec.actor, rec.new_channel);
  const RateVector after = state.Rates();
  rec.d1 = after[rec.actor] - before[rec.actor];
  for (PlayerId m : state.members(rec.new_channel)) {
    if (m != rec.actor) rec.d2 += after[m] - before[m];
  }
  for (PlayerId m : state.members(rec.old_channel)) {
    rec.d3 += after[m] - before[m];
  }
  rec.x_after = std::accumulate(after.begin(), after.end(), 0.0);
  rec.min_rate_after = *std::min_element(after.begin(), after.end());
  return rec;
}

std::int64_t DefaultMaxSteps(int n_players) {
  return 200 * static_cast<std::int64_t>(n_players);
}

Trace Run(const NetworkRealization& net, double eps,
          const SchedulePolicy& policy, const RunOptions& options,
          std::uint64_t run_seed) {
  if (!(eps > 0.0)) throw Error(ErrorKind::kDomain, "eps must be positive");
  const std::int64_t max_steps =
      options.max_steps > 0 ? options.max_steps : DefaultMaxSteps(net.size());

  DynamicsStreams rng(run_seed);
  StrategyProfile initial =
      options.initial
          ? *options.initial
          : options.initial_mode == InitialMode::kUniform
                ? StrategyProfile::Uniform(net.size(), net.num_channels(),
                                           rng.initial)
                : StrategyProfile::AllOn(net.size(), net.num_channels(), 0);

  Trace trace;
  trace.eps = eps;
  trace.policy = policy.kind();
  trace.max_steps = max_steps;
  trace.run_seed = run_seed;
  trace.initial_profile = initial;

  GameState state(net, std::move(initial));
  std::int64_t t = 0;
  for (;;) {
    if (t >= max_steps) {
      // Out of budget; still report convergence if the last step landed on
      // an equilibrium.
      if (state.IsEpsPne(eps)) {
        trace.converged = true;
        trace.t_con = t;
      }
      break;
    }
    std::optional<StepRecord> rec = Step(state, eps, policy, rng, t);
    if (!rec) {
      trace.converged = true;
      trace.t_con = t;
      break;
    }
    if (options.paranoid) {
      const double err = state.MaxCacheError();
      const double x_ref = SumRate(net, state.profile());
      if (!(err <= 1e-9) ||
          std::fabs(x_ref - rec->x_after) > 1e-9 * std::max(1.0, x_ref)) {
        throw Error(ErrorKind::kConsistency,
                    "cached interference drifted from recomputation at step " +
                        std::to_string(t));
      }
    }
    trace.steps.push_back(*rec);
    ++t;
  }
  trace.final_profile = state.profile();
  trace.final_rates = state.Rates();
  return trace;
}

}  // namespace ibr
