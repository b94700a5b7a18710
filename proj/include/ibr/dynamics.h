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

#ifndef IBR_DYNAMICS_H_
#define IBR_DYNAMICS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ibr/channel.h"
#include "ibr/game.h"
#include "ibr/rng.h"

namespace ibr {

enum class PolicyKind { kAllPlayers, kDeviators, kCustom };

const char* PolicyKindName(PolicyKind kind);
// Accepts "all" / "all_players" and "deviators".
PolicyKind ParsePolicyKind(const std::string& name);

// Who may act on a turn. The acting player is drawn uniformly from the
// returned set.
class SchedulePolicy {
 public:
  using Provider =
      std::function<std::vector<PlayerId>(const GameState&, double eps)>;

  static SchedulePolicy AllPlayers() { return SchedulePolicy(PolicyKind::kAllPlayers, {}); }
  static SchedulePolicy Deviators() { return SchedulePolicy(PolicyKind::kDeviators, {}); }
  static SchedulePolicy Custom(Provider provider) {
    return SchedulePolicy(PolicyKind::kCustom, std::move(provider));
  }
  static SchedulePolicy FromKind(PolicyKind kind);

  PolicyKind kind() const { return kind_; }
  const Provider& provider() const { return provider_; }

 private:
  SchedulePolicy(PolicyKind kind, Provider provider)
      : kind_(kind), provider_(std::move(provider)) {}

  PolicyKind kind_;
  Provider provider_;
};

struct StepRecord {
  std::int64_t t = 0;
  PlayerId actor = -1;
  ChannelId old_channel = -1;
  ChannelId new_channel = -1;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double x_before = 0.0;
  double x_after = 0.0;
  double min_rate_after = 0.0;
  int deviator_count = 0;
  int candidate_count = 0;

  bool deviated() const { return old_channel != new_channel; }
};

struct Trace {
  std::vector<StepRecord> steps;
  bool converged = false;
  std::optional<std::int64_t> t_con;
  StrategyProfile initial_profile{1, {}};
  StrategyProfile final_profile{1, {}};
  RateVector final_rates;
  double eps = 0.0;
  PolicyKind policy = PolicyKind::kDeviators;
  std::int64_t max_steps = 0;
  std::uint64_t run_seed = 0;

  double MeanRate() const;
  double MinRate() const;
};

// Reference candidate set from the stateless game operations.
std::vector<PlayerId> Candidates(const NetworkRealization& net,
                                 const StrategyProfile& profile, double eps,
                                 const SchedulePolicy& policy);
std::vector<PlayerId> Candidates(const GameState& state, double eps,
                                 const SchedulePolicy& policy);

// One turn. Returns nullopt (the converged signal) when no player deviates,
// leaving the state untouched. An actor that is already eps-best yields a
// zero-delta record.
std::optional<StepRecord> Step(GameState& state, double eps,
                               const SchedulePolicy& policy,
                               DynamicsStreams& rng, std::int64_t t = 0);

enum class InitialMode { kUniform, kSingleChannel };

const char* InitialModeName(InitialMode mode);
InitialMode ParseInitialMode(const std::string& name);

struct RunOptions {
  // 0 selects the default of 200 * N.
  std::int64_t max_steps = 0;
  InitialMode initial_mode = InitialMode::kUniform;
  // Used verbatim when set; the initial stream is then not consumed.
  std::optional<StrategyProfile> initial;
  // Recompute interference from scratch after every step and fail on any
  // mismatch with the cache beyond 1e-9 relative.
  bool paranoid = false;
};

std::int64_t DefaultMaxSteps(int n_players);

// Iterates Step until convergence or the step cap. Not converging is a
// result (converged = false, t_con empty), not an error.
Trace Run(const NetworkRealization& net, double eps,
          const SchedulePolicy& policy, const RunOptions& options,
          std::uint64_t run_seed);

}  // namespace ibr

#endif  // IBR_DYNAMICS_H_
