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

#ifndef IBR_GAME_H_
#define IBR_GAME_H_

#include <optional>
#include <span>
#include <vector>

#include "ibr/channel.h"
#include "ibr/rng.h"

namespace ibr {

using ChannelId = int;
// Per-player rate in bits/s/Hz.
using RateVector = std::vector<double>;

// One channel per player.
class StrategyProfile {
 public:
  StrategyProfile(int num_channels, std::vector<ChannelId> channels);

  static StrategyProfile Uniform(int n_players, int num_channels, Engine& rng);
  static StrategyProfile AllOn(int n_players, int num_channels,
                               ChannelId channel);

  int size() const { return static_cast<int>(channels_.size()); }
  int num_channels() const { return num_channels_; }
  ChannelId operator[](PlayerId n) const { return channels_[n]; }
  const std::vector<ChannelId>& channels() const { return channels_; }

  // Copy with player n moved to channel k.
  StrategyProfile With(PlayerId n, ChannelId k) const;
  void Set(PlayerId n, ChannelId k);

  friend bool operator==(const StrategyProfile&,
                         const StrategyProfile&) = default;

 private:
  int num_channels_;
  std::vector<ChannelId> channels_;
};

// Aggregate co-channel interference at a link's receiver. `infinite` marks
// the self-victim case: the link's own receiver is transmitting on the
// channel.
struct Interference {
  double power = 0.0;
  bool infinite = false;
};

// log2(1 + signal / (noise + I)); exactly 0 for infinite interference.
double RateFromInterference(double signal, double noise, Interference i);

// {k : utilities[k] + eps >= max utilities}, ascending.
std::vector<ChannelId> EpsBestFromUtilities(std::span<const double> utilities,
                                            double eps);

// --- Reference operations -------------------------------------------------
// Straight from the definitions with full recomputation; O(N) per utility.
// The dynamics use GameState below and are checked against these.

// Sum of g_{m,d(link)} P_m over m != link with profile[m] == channel.
Interference InterferenceAt(const NetworkRealization& net,
                            const StrategyProfile& profile, PlayerId link,
                            ChannelId channel);

// u_n with player n on its current channel.
double Utility(const NetworkRealization& net, const StrategyProfile& profile,
               PlayerId n);
// u_n(k, a_{-n}).
double UtilityOn(const NetworkRealization& net, const StrategyProfile& profile,
                 PlayerId n, ChannelId k);
RateVector Rates(const NetworkRealization& net, const StrategyProfile& profile);
double SumRate(const NetworkRealization& net, const StrategyProfile& profile);

std::vector<ChannelId> EpsBestSet(const NetworkRealization& net,
                                  const StrategyProfile& profile, PlayerId n,
                                  double eps);

struct BrOutcome {
  StrategyProfile profile;
  bool deviated = false;
};

// Approximate best response: keep the channel when it is eps-best, else
// switch uniformly over the eps/2-best set. Draws from rng only on a switch.
BrOutcome BrEps(const NetworkRealization& net, const StrategyProfile& profile,
                PlayerId n, double eps, Engine& rng);

bool IsEpsPne(const NetworkRealization& net, const StrategyProfile& profile,
              double eps);

// Split of a unilateral move's sum-rate change: the mover's own gain (d1),
// the change for occupants of the destination channel (d2) and for those
// left behind on the origin channel (d3).
struct DeltaDecomposition {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;

  double total() const { return d1 + d2 + d3; }
};

// Throws kInvalidTransition when the profiles differ outside player n.
DeltaDecomposition DecomposeDelta(const NetworkRealization& net,
                                  const StrategyProfile& before,
                                  const StrategyProfile& after, PlayerId n);

struct Drift {
  double e1_plus_e2 = 0.0;
  double e_total = 0.0;
};

// Exact expectation of the decomposition over the deviator's uniform choice
// in its eps/2-best set. Throws kNotApplicable when n does not deviate.
Drift ExpectedDrift(const NetworkRealization& net,
                    const StrategyProfile& profile, PlayerId n, double eps);

// --- Cached engine --------------------------------------------------------

// A profile together with per-channel, per-receiver interference totals.
// Totals for a channel are rebuilt from its sorted member list whenever the
// membership changes, in the same summation order as InterferenceAt, so
// cached and reference values agree bit for bit.
class GameState {
 public:
  GameState(const NetworkRealization& net, StrategyProfile profile);

  const NetworkRealization& net() const { return *net_; }
  const StrategyProfile& profile() const { return profile_; }
  int size() const { return profile_.size(); }
  int num_channels() const { return profile_.num_channels(); }
  const std::vector<PlayerId>& members(ChannelId k) const {
    return members_[k];
  }

  Interference InterferenceOn(PlayerId n, ChannelId k) const;
  double UtilityOn(PlayerId n, ChannelId k) const;
  double Utility(PlayerId n) const { return UtilityOn(n, profile_[n]); }
  std::vector<double> UtilitiesAcross(PlayerId n) const;
  RateVector Rates() const;
  double SumRate() const;

  std::vector<ChannelId> EpsBestSet(PlayerId n, double eps) const;
  bool IsEpsBest(PlayerId n, double eps) const;
  std::vector<PlayerId> Deviators(double eps) const;
  bool IsEpsPne(double eps) const;

  // Decomposition of moving n to k, without moving.
  DeltaDecomposition PreviewMove(PlayerId n, ChannelId k) const;
  Drift ExpectedDrift(PlayerId n, double eps) const;

  // The approximate best response's target channel, or nullopt when the
  // current channel is eps-best. Same rng consumption as BrEps.
  std::optional<ChannelId> BestResponse(PlayerId n, double eps,
                                        Engine& rng) const;

  void Move(PlayerId n, ChannelId k);

  // Largest relative deviation of cached totals from a full recomputation.
  double MaxCacheError() const;

 private:
  double& total(ChannelId k, PlayerId link) {
    return interference_[static_cast<std::size_t>(k) * size() + link];
  }
  double total(ChannelId k, PlayerId link) const {
    return interference_[static_cast<std::size_t>(k) * size() + link];
  }
  void Rebuild(ChannelId k);
  // Interference at `link` from the given ascending member list, skipping
  // `skip` and `link` itself.
  Interference SumOver(std::span<const PlayerId> members, PlayerId link,
                       PlayerId skip) const;

  const NetworkRealization* net_;
  StrategyProfile profile_;
  std::vector<std::vector<PlayerId>> members_;
  std::vector<double> interference_;
};

}  // namespace ibr

#endif  // IBR_GAME_H_
