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

#include "ibr/game.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ibr/errors.h"

namespace ibr {
namespace {

void CheckPlayer(int size, PlayerId n) {
  if (n < 0 || n >= size) {
    throw Error(ErrorKind::kDomain, "player " + std::to_string(n) +
                                        " out of range");
  }
}

void CheckCompatible(const NetworkRealization& net,
                     const StrategyProfile& profile) {
  if (profile.size() != net.size()) {
    throw Error(ErrorKind::kShape, "profile and network differ in size");
  }
}

}  // namespace

StrategyProfile::StrategyProfile(int num_channels,
                                 std::vector<ChannelId> channels)
    : num_channels_(num_channels), channels_(std::move(channels)) {
  if (num_channels_ < 1) {
    throw Error(ErrorKind::kDomain, "need at least one channel");
  }
  for (ChannelId k : channels_) {
    if (k < 0 || k >= num_channels_) {
      throw Error(ErrorKind::kDomain,
                  "channel " + std::to_string(k) + " out of range");
    }
  }
}

StrategyProfile StrategyProfile::Uniform(int n_players, int num_channels,
                                         Engine& rng) {
  std::vector<ChannelId> channels(n_players);
  for (ChannelId& k : channels) {
    k = static_cast<ChannelId>(UniformIndex(rng, num_channels));
  }
  return StrategyProfile(num_channels, std::move(channels));
}

StrategyProfile StrategyProfile::AllOn(int n_players, int num_channels,
                                       ChannelId channel) {
  return StrategyProfile(num_channels,
                         std::vector<ChannelId>(n_players, channel));
}

StrategyProfile StrategyProfile::With(PlayerId n, ChannelId k) const {
  StrategyProfile copy = *this;
  copy.Set(n, k);
  return copy;
}

void StrategyProfile::Set(PlayerId n, ChannelId k) {
  CheckPlayer(size(), n);
  if (k < 0 || k >= num_channels_) {
    throw Error(ErrorKind::kDomain, "channel out of range");
  }
  channels_[n] = k;
}

double RateFromInterference(double signal, double noise, Interference i) {
  if (i.infinite) return 0.0;
  return std::log2(1.0 + signal / (noise + i.power));
}

std::vector<ChannelId> EpsBestFromUtilities(std::span<const double> utilities,
                                            double eps) {
  const double best = *std::max_element(utilities.begin(), utilities.end());
  std::vector<ChannelId> set;
  for (std::size_t k = 0; k < utilities.size(); ++k) {
    if (utilities[k] + eps >= best) set.push_back(static_cast<ChannelId>(k));
  }
  return set;
}

// --- Reference operations -------------------------------------------------

Interference InterferenceAt(const NetworkRealization& net,
                            const StrategyProfile& profile, PlayerId link,
                            ChannelId channel) {
  Interference total;
  for (PlayerId m = 0; m < net.size(); ++m) {
    if (m == link || profile[m] != channel) continue;
    if (net.IsSentinel(m, link)) {
      total.infinite = true;
    } else {
      total.power += net.cross_power(m, link);
    }
  }
  return total;
}

double UtilityOn(const NetworkRealization& net, const StrategyProfile& profile,
                 PlayerId n, ChannelId k) {
  return RateFromInterference(net.signal(n), net.noise(),
                              InterferenceAt(net, profile, n, k));
}

double Utility(const NetworkRealization& net, const StrategyProfile& profile,
               PlayerId n) {
  return UtilityOn(net, profile, n, profile[n]);
}

RateVector Rates(const NetworkRealization& net,
                 const StrategyProfile& profile) {
  CheckCompatible(net, profile);
  RateVector rates(net.size());
  for (PlayerId n = 0; n < net.size(); ++n) rates[n] = Utility(net, profile, n);
  return rates;
}

double SumRate(const NetworkRealization& net, const StrategyProfile& profile) {
  double sum = 0.0;
  for (double r : Rates(net, profile)) sum += r;
  return sum;
}

std::vector<ChannelId> EpsBestSet(const NetworkRealization& net,
                                  const StrategyProfile& profile, PlayerId n,
                                  double eps) {
  if (!(eps >= 0.0)) throw Error(ErrorKind::kDomain, "eps must be >= 0");
  CheckCompatible(net, profile);
  CheckPlayer(net.size(), n);
  std::vector<double> u(profile.num_channels());
  for (ChannelId k = 0; k < profile.num_channels(); ++k) {
    u[k] = UtilityOn(net, profile, n, k);
  }
  return EpsBestFromUtilities(u, eps);
}

BrOutcome BrEps(const NetworkRealization& net, const StrategyProfile& profile,
                PlayerId n, double eps, Engine& rng) {
  if (!(eps > 0.0)) throw Error(ErrorKind::kDomain, "eps must be positive");
  const std::vector<ChannelId> keep = EpsBestSet(net, profile, n, eps);
  if (std::binary_search(keep.begin(), keep.end(), profile[n])) {
    return {profile, false};
  }
  const std::vector<ChannelId> targets = EpsBestSet(net, profile, n, eps / 2);
  return {profile.With(n, targets[UniformIndex(rng, targets.size())]), true};
}

bool IsEpsPne(const NetworkRealization& net, const StrategyProfile& profile,
              double eps) {
  for (PlayerId n = 0; n < net.size(); ++n) {
    const std::vector<ChannelId> set = EpsBestSet(net, profile, n, eps);
    if (!std::binary_search(set.begin(), set.end(), profile[n])) return false;
  }
  return true;
}

DeltaDecomposition DecomposeDelta(const NetworkRealization& net,
                                  const StrategyProfile& before,
                                  const StrategyProfile& after, PlayerId n) {
  CheckCompatible(net, before);
  CheckCompatible(net, after);
  CheckPlayer(net.size(), n);
  for (PlayerId m = 0; m < net.size(); ++m) {
    if (m != n && before[m] != after[m]) {
      throw Error(ErrorKind::kInvalidTransition,
                  "profiles differ at player " + std::to_string(m) +
                      ", not only at the mover");
    }
  }
  DeltaDecomposition d;
  if (before == after) return d;
  d.d1 = Utility(net, after, n) - Utility(net, before, n);
  for (PlayerId m = 0; m < net.size(); ++m) {
    if (m == n) continue;
    if (before[m] == after[n]) {
      d.d2 += Utility(net, after, m) - Utility(net, before, m);
    } else if (before[m] == before[n]) {
      d.d3 += Utility(net, after, m) - Utility(net, before, m);
    }
  }
  return d;
}

Drift ExpectedDrift(const NetworkRealization& net,
                    const StrategyProfile& profile, PlayerId n, double eps) {
  const std::vector<ChannelId> keep = EpsBestSet(net, profile, n, eps);
  if (std::binary_search(keep.begin(), keep.end(), profile[n])) {
    throw Error(ErrorKind::kNotApplicable,
                "player " + std::to_string(n) + " does not deviate");
  }
  const std::vector<ChannelId> targets = EpsBestSet(net, profile, n, eps / 2);
  Drift drift;
  for (ChannelId k : targets) {
    const DeltaDecomposition d =
        DecomposeDelta(net, profile, profile.With(n, k), n);
    drift.e1_plus_e2 += d.d1 + d.d2;
    drift.e_total += d.total();
  }
  drift.e1_plus_e2 /= static_cast<double>(targets.size());
  drift.e_total /= static_cast<double>(targets.size());
  return drift;
}

// --- Cached engine --------------------------------------------------------

GameState::GameState(const NetworkRealization& net, StrategyProfile profile)
    : net_(&net),
      profile_(std::move(profile)),
      members_(profile_.num_channels()),
      interference_(static_cast<std::size_t>(profile_.num_channels()) *
                        profile_.size(),
                    0.0) {
  CheckCompatible(net, profile_);
  for (PlayerId m = 0; m < size(); ++m) members_[profile_[m]].push_back(m);
  for (ChannelId k = 0; k < num_channels(); ++k) Rebuild(k);
}

void GameState::Rebuild(ChannelId k) {
  double* row = &interference_[static_cast<std::size_t>(k) * size()];
  std::fill(row, row + size(), 0.0);
  const int n = size();
  for (PlayerId m : members_[k]) {
    for (PlayerId link = 0; link < n; ++link) {
      if (link != m) row[link] += net_->cross_power(m, link);
    }
  }
}

Interference GameState::SumOver(std::span<const PlayerId> members,
                                PlayerId link, PlayerId skip) const {
  Interference total;
  for (PlayerId m : members) {
    if (m == link || m == skip) continue;
    if (net_->IsSentinel(m, link)) {
      total.infinite = true;
    } else {
      total.power += net_->cross_power(m, link);
    }
  }
  return total;
}

Interference GameState::InterferenceOn(PlayerId n, ChannelId k) const {
  return {total(k, n), profile_[net_->dest()[n]] == k};
}

double GameState::UtilityOn(PlayerId n, ChannelId k) const {
  return RateFromInterference(net_->signal(n), net_->noise(),
                              InterferenceOn(n, k));
}

std::vector<double> GameState::UtilitiesAcross(PlayerId n) const {
  std::vector<double> u(num_channels());
  for (ChannelId k = 0; k < num_channels(); ++k) u[k] = UtilityOn(n, k);
  return u;
}

RateVector GameState::Rates() const {
  RateVector rates(size());
  for (PlayerId n = 0; n < size(); ++n) rates[n] = Utility(n);
  return rates;
}

double GameState::SumRate() const {
  double sum = 0.0;
  for (PlayerId n = 0; n < size(); ++n) sum += Utility(n);
  return sum;
}

std::vector<ChannelId> GameState::EpsBestSet(PlayerId n, double eps) const {
  if (!(eps >= 0.0)) throw Error(ErrorKind::kDomain, "eps must be >= 0");
  return EpsBestFromUtilities(UtilitiesAcross(n), eps);
}

bool GameState::IsEpsBest(PlayerId n, double eps) const {
  // Utility is nonincreasing in interference, so the best channel is the
  // least-interfered one. Near the boundary fall back to the full scan.
  const ChannelId own = profile_[n];
  const ChannelId jammed = profile_[net_->dest()[n]];
  ChannelId quietest = -1;
  double least = std::numeric_limits<double>::infinity();
  for (ChannelId k = 0; k < num_channels(); ++k) {
    if (k == jammed) continue;
    const double i = total(k, n);
    if (i < least) {
      least = i;
      quietest = k;
    }
  }
  if (quietest < 0) return true;  // single channel, all jammed: all equal
  const double margin = Utility(n) + eps - UtilityOn(n, quietest);
  if (std::fabs(margin) > 1e-12) return margin > 0.0;
  const std::vector<ChannelId> set = EpsBestSet(n, eps);
  return std::binary_search(set.begin(), set.end(), own);
}

std::vector<PlayerId> GameState::Deviators(double eps) const {
  std::vector<PlayerId> out;
  for (PlayerId n = 0; n < size(); ++n) {
    if (!IsEpsBest(n, eps)) out.push_back(n);
  }
  return out;
}

bool GameState::IsEpsPne(double eps) const {
  for (PlayerId n = 0; n < size(); ++n) {
    if (!IsEpsBest(n, eps)) return false;
  }
  return true;
}

DeltaDecomposition GameState::PreviewMove(PlayerId n, ChannelId k) const {
  CheckPlayer(size(), n);
  const ChannelId old = profile_[n];
  DeltaDecomposition d;
  if (k == old) return d;
  d.d1 = UtilityOn(n, k) - Utility(n);

  std::vector<PlayerId> joined = members_[k];
  joined.insert(std::upper_bound(joined.begin(), joined.end(), n), n);
  for (PlayerId m : members_[k]) {
    const double after = RateFromInterference(net_->signal(m), net_->noise(),
                                              SumOver(joined, m, -1));
    d.d2 += after - Utility(m);
  }
  for (PlayerId m : members_[old]) {
    if (m == n) continue;
    const double after = RateFromInterference(net_->signal(m), net_->noise(),
                                              SumOver(members_[old], m, n));
    d.d3 += after - Utility(m);
  }
  return d;
}

Drift GameState::ExpectedDrift(PlayerId n, double eps) const {
  const std::vector<double> u = UtilitiesAcross(n);
  const std::vector<ChannelId> keep = EpsBestFromUtilities(u, eps);
  if (std::binary_search(keep.begin(), keep.end(), profile_[n])) {
    throw Error(ErrorKind::kNotApplicable,
                "player " + std::to_string(n) + " does not deviate");
  }
  const std::vector<ChannelId> targets = EpsBestFromUtilities(u, eps / 2);
  Drift drift;
  for (ChannelId k : targets) {
    const DeltaDecomposition d = PreviewMove(n, k);
    drift.e1_plus_e2 += d.d1 + d.d2;
    drift.e_total += d.total();
  }
  drift.e1_plus_e2 /= static_cast<double>(targets.size());
  drift.e_total /= static_cast<double>(targets.size());
  return drift;
}

std::optional<ChannelId> GameState::BestResponse(PlayerId n, double eps,
                                                 Engine& rng) const {
  if (!(eps > 0.0)) throw Error(ErrorKind::kDomain, "eps must be positive");
  const std::vector<double> u = UtilitiesAcross(n);
  const std::vector<ChannelId> keep = EpsBestFromUtilities(u, eps);
  if (std::binary_search(keep.begin(), keep.end(), profile_[n])) {
    return std::nullopt;
  }
  const std::vector<ChannelId> targets = EpsBestFromUtilities(u, eps / 2);
  return targets[UniformIndex(rng, targets.size())];
}

void GameState::Move(PlayerId n, ChannelId k) {
  const ChannelId old = profile_[n];
  profile_.Set(n, k);
  if (k == old) return;
  std::vector<PlayerId>& from = members_[old];
  from.erase(std::lower_bound(from.begin(), from.end(), n));
  std::vector<PlayerId>& to = members_[k];
  to.insert(std::upper_bound(to.begin(), to.end(), n), n);
  Rebuild(old);
  Rebuild(k);
}

double GameState::MaxCacheError() const {
  double worst = 0.0;
  for (ChannelId k = 0; k < num_channels(); ++k) {
    for (PlayerId link = 0; link < size(); ++link) {
      const Interference ref = InterferenceAt(*net_, profile_, link, k);
      const Interference got = InterferenceOn(link, k);
      if (ref.infinite != got.infinite) {
        return std::numeric_limits<double>::infinity();
      }
      const double scale = std::max(std::fabs(ref.power), 1e-300);
      worst = std::max(worst, std::fabs(ref.power - got.power) / scale);
    }
  }
  return worst;
}

}  // namespace ibr
