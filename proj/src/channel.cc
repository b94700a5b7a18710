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

#include "ibr/channel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibr/errors.h"

namespace ibr {
namespace {

constexpr int kFaninRetryBudget = 64;

bool WithinBeam(double offset, double width) {
  return width >= 2.0 * kPi || std::fabs(offset) <= width / 2.0;
}

}  // namespace

double RadioParams::BigG() const {
  return std::pow(wavelength / (4.0 * kPi), alpha);
}

void RadioParams::Validate() const {
  if (!(alpha > 2.0)) {
    throw Error(ErrorKind::kDomain, "path-loss exponent must exceed 2");
  }
  if (!(wavelength > 0.0)) {
    throw Error(ErrorKind::kDomain, "wavelength must be positive");
  }
  if (!(noise_n0 > 0.0)) {
    throw Error(ErrorKind::kDomain, "noise power must be positive");
  }
  if (!(theta_t > 0.0 && theta_t <= 2.0 * kPi) ||
      !(theta_r > 0.0 && theta_r <= 2.0 * kPi)) {
    throw Error(ErrorKind::kDomain, "beam widths must lie in (0, 2pi]");
  }
  if (p0 && !(*p0 > 0.0)) {
    throw Error(ErrorKind::kDomain, "p0 must be positive");
  }
  if (!snr_target_db && !p0) {
    throw Error(ErrorKind::kDomain,
                "either an SNR target or p0 is needed to set powers");
  }
  if (power_cap_enabled && !p0) {
    throw Error(ErrorKind::kDomain, "power cap requires p0");
  }
}

const char* OrientationModeName(OrientationMode mode) {
  switch (mode) {
    case OrientationMode::kOmni: return "omni";
    case OrientationMode::kAimed: return "aimed";
    case OrientationMode::kRandom: return "random";
  }
  return "omni";
}

OrientationMode ParseOrientationMode(const std::string& name) {
  if (name == "omni") return OrientationMode::kOmni;
  if (name == "aimed") return OrientationMode::kAimed;
  if (name == "random") return OrientationMode::kRandom;
  throw Error(ErrorKind::kConfig, "unknown orientation mode '" + name + "'");
}

LinkGain ComputeGain(const Point& tx, double tx_heading, const Point& rx,
                     double rx_heading, const RadioParams& params) {
  if (tx == rx) return {0.0, true};
  if (!WithinBeam(AngleOffset(tx, rx, tx_heading), params.theta_t) ||
      !WithinBeam(AngleOffset(rx, tx, rx_heading), params.theta_r)) {
    return {0.0, false};
  }
  return {params.BigG() / std::pow(Distance(tx, rx), params.alpha), false};
}

double MaxPower(const RadioParams& params, int n_players) {
  if (!params.p0) throw Error(ErrorKind::kDomain, "P_max requires p0");
  const double n = static_cast<double>(n_players);
  return *params.p0 * std::pow(std::log(n) / n, params.alpha / 2.0);
}

double PowerControl(double direct_gain, const RadioParams& params,
                    int n_players) {
  if (!(direct_gain > 0.0)) {
    throw Error(ErrorKind::kUnreachableDestination,
                "direct gain is zero; destination outside the beams");
  }
  if (!params.snr_target_db) return MaxPower(params, n_players);
  const double snr_linear = std::pow(10.0, *params.snr_target_db / 10.0);
  double p = snr_linear * params.noise_n0 / direct_gain;
  if (params.power_cap_enabled) p = std::min(p, MaxPower(params, n_players));
  return p;
}

std::vector<PlayerId> AssignDestinations(
    std::span<const Point> positions, int candidate_count,
    std::optional<int> fanin_limit, Engine& rng,
    std::optional<double> max_link_distance) {
  const int n = static_cast<int>(positions.size());
  if (candidate_count < 1) {
    throw Error(ErrorKind::kDomain, "need at least one destination candidate");
  }
  if (fanin_limit && *fanin_limit < 1) {
    throw Error(ErrorKind::kDomain, "fan-in limit must be positive");
  }
  std::vector<std::vector<PlayerId>> candidates(n);
  for (PlayerId p = 0; p < n; ++p) {
    candidates[p] = NearestNeighbors(positions, p, candidate_count);
    if (max_link_distance) {
      std::erase_if(candidates[p], [&](PlayerId m) {
        return Distance(positions[p], positions[m]) > *max_link_distance;
      });
      if (candidates[p].empty()) {
        throw Error(ErrorKind::kAssignmentInfeasible,
                    "player " + std::to_string(p) +
                        " has no neighbour within the transmission range");
      }
    }
  }

  std::vector<PlayerId> dest(n);
  const int attempts = fanin_limit ? kFaninRetryBudget : 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::vector<int> load(n, 0);
    bool ok = true;
    for (PlayerId p = 0; p < n && ok; ++p) {
      std::vector<PlayerId> open;
      for (PlayerId m : candidates[p]) {
        if (!fanin_limit || load[m] < *fanin_limit) open.push_back(m);
      }
      if (open.empty()) {
        ok = false;
        break;
      }
      dest[p] = open[UniformIndex(rng, open.size())];
      ++load[dest[p]];
    }
    if (ok) return dest;
  }
  throw Error(ErrorKind::kAssignmentInfeasible,
              "fan-in limit could not be met after " +
                  std::to_string(attempts) + " attempts");
}

NetworkRealization NetworkRealization::FromGeometry(
    const RegionSpec& region, const RadioParams& radio,
    OrientationMode orientation, int num_channels,
    std::vector<Point> positions, std::vector<PlayerId> dest,
    std::vector<double> tx_heading, std::vector<double> rx_heading,
    std::vector<double> power, std::uint64_t seed) {
  radio.Validate();
  const std::size_t n = dest.size();
  if (positions.size() != n || tx_heading.size() != n ||
      rx_heading.size() != n || power.size() != n) {
    throw Error(ErrorKind::kShape, "per-player vectors differ in length");
  }
  NetworkRealization net;
  net.region_ = region;
  net.radio_ = radio;
  net.orientation_ = orientation;
  net.num_channels_ = num_channels;
  net.seed_ = seed;
  net.positions_ = std::move(positions);
  net.dest_ = std::move(dest);
  net.tx_heading_ = std::move(tx_heading);
  net.rx_heading_ = std::move(rx_heading);
  net.power_ = std::move(power);
  net.gain_.assign(n * n, 0.0);
  for (PlayerId v = 0; v < net.size(); ++v) {
    if (net.dest_[v] < 0 || net.dest_[v] >= net.size()) {
      throw Error(ErrorKind::kShape, "destination index out of range");
    }
  }
  const bool omni = radio.omnidirectional();
  const double big_g = radio.BigG();
  for (PlayerId tx = 0; tx < net.size(); ++tx) {
    for (PlayerId link = 0; link < net.size(); ++link) {
      const PlayerId rx = net.dest_[link];
      if (rx == tx) continue;  // sentinel, stored as 0
      double g;
      if (omni) {
        const double r = Distance(net.positions_[tx], net.positions_[rx]);
        if (r == 0.0) {
          throw Error(ErrorKind::kDegenerateGeometry,
                      "two players share a position");
        }
        g = big_g / std::pow(r, radio.alpha);
      } else {
        const LinkGain lg =
            ComputeGain(net.positions_[tx], net.tx_heading_[tx],
                        net.positions_[rx], net.rx_heading_[rx], radio);
        if (lg.infinite) {
          throw Error(ErrorKind::kDegenerateGeometry,
                      "two players share a position");
        }
        g = lg.value;
      }
      net.gain_[net.index(tx, link)] = g;
    }
  }
  net.Finish();
  if (radio.power_cap_enabled) {
    const double cap = MaxPower(radio, net.size());
    for (double p : net.power_) {
      if (p > cap * (1.0 + 1e-12)) {
        throw Error(ErrorKind::kDomain, "power exceeds P_max");
      }
    }
  }
  return net;
}

NetworkRealization NetworkRealization::FromGains(std::vector<PlayerId> dest,
                                                 std::vector<double> power,
                                                 std::vector<double> gain,
                                                 int num_channels,
                                                 double noise_n0) {
  const std::size_t n = dest.size();
  if (power.size() != n || gain.size() != n * n) {
    throw Error(ErrorKind::kShape, "gain matrix must be N x N");
  }
  NetworkRealization net;
  net.radio_.noise_n0 = noise_n0;
  net.num_channels_ = num_channels;
  net.dest_ = std::move(dest);
  net.power_ = std::move(power);
  net.gain_ = std::move(gain);
  net.tx_heading_.assign(n, 0.0);
  net.rx_heading_.assign(n, 0.0);
  for (PlayerId v = 0; v < net.size(); ++v) {
    if (net.dest_[v] < 0 || net.dest_[v] >= net.size()) {
      throw Error(ErrorKind::kShape, "destination index out of range");
    }
  }
  for (PlayerId tx = 0; tx < net.size(); ++tx) {
    for (PlayerId link = 0; link < net.size(); ++link) {
      if (net.IsSentinel(tx, link)) net.gain_[net.index(tx, link)] = 0.0;
    }
  }
  net.Finish();
  return net;
}

void NetworkRealization::Finish() {
  const int n = size();
  if (num_channels_ < 1) {
    throw Error(ErrorKind::kDomain, "need at least one channel");
  }
  if (!(radio_.noise_n0 > 0.0)) {
    throw Error(ErrorKind::kDomain, "noise power must be positive");
  }
  for (PlayerId v = 0; v < n; ++v) {
    if (dest_[v] == v) {
      throw Error(ErrorKind::kShape,
                  "player " + std::to_string(v) + " is its own destination");
    }
    if (!(direct(v) > 0.0)) {
      throw Error(ErrorKind::kUnreachableDestination,
                  "player " + std::to_string(v) + " cannot reach its destination");
    }
    if (!(power_[v] > 0.0) || !std::isfinite(power_[v])) {
      throw Error(ErrorKind::kDomain, "powers must be positive and finite");
    }
  }
  for (double g : gain_) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw Error(ErrorKind::kDomain, "gains must be finite and nonnegative");
    }
  }
  cross_.resize(gain_.size());
  for (PlayerId tx = 0; tx < n; ++tx) {
    for (PlayerId link = 0; link < n; ++link) {
      cross_[index(tx, link)] = gain_[index(tx, link)] * power_[tx];
    }
  }
}

double NetworkRealization::InterferenceFreeRate(PlayerId n) const {
  return std::log2(1.0 + signal(n) / noise());
}

std::vector<std::pair<PlayerId, PlayerId>> NetworkRealization::SentinelPairs()
    const {
  std::vector<std::pair<PlayerId, PlayerId>> pairs;
  pairs.reserve(dest_.size());
  for (PlayerId link = 0; link < size(); ++link) {
    pairs.emplace_back(dest_[link], link);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<int> NetworkRealization::FanIn() const {
  std::vector<int> fanin(dest_.size(), 0);
  for (PlayerId d : dest_) ++fanin[d];
  return fanin;
}

NetworkRealization BuildRealization(const NetworkSpec& spec,
                                    NetworkStreams& streams,
                                    std::uint64_t seed) {
  if (spec.n_players < 2) {
    throw Error(ErrorKind::kInsufficientPlayers,
                "a network needs at least two players");
  }
  spec.radio.Validate();
  const int n = spec.n_players;
  std::vector<Point> positions =
      SamplePositions(spec.region, n, streams.placement);
  const int k = std::min(spec.neighbor_count, n - 1);
  std::vector<PlayerId> dest =
      AssignDestinations(positions, k, spec.fanin_limit, streams.destinations,
                         spec.max_link_distance);

  std::vector<double> tx_heading(n, 0.0);
  std::vector<double> rx_heading(n, 0.0);
  switch (spec.orientation) {
    case OrientationMode::kOmni:
      break;
    case OrientationMode::kAimed: {
      auto bearing = [&](PlayerId from, PlayerId to) {
        return std::atan2(positions[to].y - positions[from].y,
                          positions[to].x - positions[from].x);
      };
      std::vector<bool> aimed(n, false);
      for (PlayerId v = 0; v < n; ++v) {
        tx_heading[v] = bearing(v, dest[v]);
        // Receive beam faces the lowest-index link it serves.
        const PlayerId rx = dest[v];
        if (!aimed[rx]) {
          rx_heading[rx] = bearing(rx, v);
          aimed[rx] = true;
        }
      }
      break;
    }
    case OrientationMode::kRandom:
      for (PlayerId v = 0; v < n; ++v) {
        tx_heading[v] = 2.0 * kPi * UniformUnit(streams.orientation);
        rx_heading[v] = 2.0 * kPi * UniformUnit(streams.orientation);
      }
      break;
  }

  std::vector<double> power(n);
  for (PlayerId v = 0; v < n; ++v) {
    const LinkGain direct =
        ComputeGain(positions[v], tx_heading[v], positions[dest[v]],
                    rx_heading[dest[v]], spec.radio);
    if (direct.infinite) {
      throw Error(ErrorKind::kDegenerateGeometry,
                  "player shares a position with its destination");
    }
    power[v] = PowerControl(direct.value, spec.radio, n);
  }
  return NetworkRealization::FromGeometry(
      spec.region, spec.radio, spec.orientation, spec.num_channels,
      std::move(positions), std::move(dest), std::move(tx_heading),
      std::move(rx_heading), std::move(power), seed);
}

NetworkRealization BuildRealization(const NetworkSpec& spec,
                                    std::uint64_t network_seed) {
  NetworkStreams streams(network_seed);
  return BuildRealization(spec, streams, network_seed);
}

}  // namespace ibr
