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

#ifndef IBR_CHANNEL_H_
#define IBR_CHANNEL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ibr/geometry.h"
#include "ibr/rng.h"

namespace ibr {

inline constexpr double kSpeedOfLight = 299792458.0;

// Radio model: distance path loss with ideal sector beams.
struct RadioParams {
  double alpha = 3.5;                        // path-loss exponent, > 2
  double wavelength = kSpeedOfLight / 2.4e9; // metres
  double noise_n0 = 1.0;
  double theta_t = 2.0 * kPi;  // transmit beam width, (0, 2pi]
  double theta_r = 2.0 * kPi;  // receive beam width, (0, 2pi]
  // Per-link power is set to hit this interference-free SNR when present.
  std::optional<double> snr_target_db = 20.0;
  // P_max = p0 (ln N / N)^(alpha/2); used as a cap or, without an SNR
  // target, as the transmit power itself.
  std::optional<double> p0;
  bool power_cap_enabled = false;

  // (wavelength / 4 pi)^alpha.
  double BigG() const;
  bool omnidirectional() const {
    return theta_t >= 2.0 * kPi && theta_r >= 2.0 * kPi;
  }
  // Throws kDomain on out-of-range fields.
  void Validate() const;
};

enum class OrientationMode { kOmni, kAimed, kRandom };

const char* OrientationModeName(OrientationMode mode);
OrientationMode ParseOrientationMode(const std::string& name);

// Result of evaluating the path-loss/beam gain for one tx/rx pair. A
// transmitter cannot cancel its own signal at its own receiver, which is
// flagged rather than represented with an IEEE infinity.
struct LinkGain {
  double value = 0.0;
  bool infinite = false;
};

LinkGain ComputeGain(const Point& tx, double tx_heading, const Point& rx,
                     double rx_heading, const RadioParams& params);

// Transmit power reaching the SNR target over `direct_gain`, optionally
// capped at P_max. Throws kUnreachableDestination when direct_gain <= 0.
double PowerControl(double direct_gain, const RadioParams& params,
                    int n_players);

double MaxPower(const RadioParams& params, int n_players);

// dest[n] drawn uniformly from n's candidate_count nearest neighbours. With a
// fan-in limit S no node may serve more than S links; players are assigned in
// index order among still-open candidates and the whole draw is retried a
// bounded number of times before kAssignmentInfeasible.
// `max_link_distance` drops candidates farther than the given range.
std::vector<PlayerId> AssignDestinations(
    std::span<const Point> positions, int candidate_count,
    std::optional<int> fanin_limit, Engine& rng,
    std::optional<double> max_link_distance = std::nullopt);

// What to build: geometry, radio and the destination rule.
struct NetworkSpec {
  RegionSpec region = RegionSpec::Disk(10.0);
  int n_players = 2;
  int num_channels = 1;
  RadioParams radio;
  OrientationMode orientation = OrientationMode::kOmni;
  int neighbor_count = 5;
  std::optional<int> fanin_limit;
  std::optional<double> max_link_distance;
};

// The frozen random game. Immutable once built; safe to share.
//
// gain(n, m) is g_{n,d(m)}: transmitter n into the receiver of link m. The
// diagonal holds each link's direct gain. Entries with dest[m] == n are the
// self-victim sentinel: the stored gain is 0 and IsSentinel(n, m) is true.
class NetworkRealization {
 public:
  // Builds everything from positions; validates invariants.
  static NetworkRealization FromGeometry(
      const RegionSpec& region, const RadioParams& radio,
      OrientationMode orientation, int num_channels,
      std::vector<Point> positions, std::vector<PlayerId> dest,
      std::vector<double> tx_heading, std::vector<double> rx_heading,
      std::vector<double> power, std::uint64_t seed = 0);

  // Abstract game from an explicit N x N gain matrix (row n = transmitter,
  // column m = link receiver). Positions are left empty, so geometric
  // diagnostics are unavailable. Used for crafted instances.
  static NetworkRealization FromGains(std::vector<PlayerId> dest,
                                      std::vector<double> power,
                                      std::vector<double> gain,
                                      int num_channels, double noise_n0 = 1.0);

  int size() const { return static_cast<int>(dest_.size()); }
  int num_channels() const { return num_channels_; }
  const RegionSpec& region() const { return region_; }
  const RadioParams& radio() const { return radio_; }
  OrientationMode orientation() const { return orientation_; }
  std::uint64_t seed() const { return seed_; }
  bool has_geometry() const { return !positions_.empty(); }

  const std::vector<Point>& positions() const { return positions_; }
  const std::vector<PlayerId>& dest() const { return dest_; }
  const std::vector<double>& tx_heading() const { return tx_heading_; }
  const std::vector<double>& rx_heading() const { return rx_heading_; }
  const std::vector<double>& power() const { return power_; }
  double noise() const { return radio_.noise_n0; }

  double gain(PlayerId n, PlayerId m) const { return gain_[index(n, m)]; }
  bool IsSentinel(PlayerId n, PlayerId m) const { return dest_[m] == n; }
  double direct(PlayerId n) const { return gain_[index(n, n)]; }
  // gain(n, m) * power[n]; 0 on sentinel entries.
  double cross_power(PlayerId n, PlayerId m) const {
    return cross_[index(n, m)];
  }
  // g_{n,d(n)} P_n.
  double signal(PlayerId n) const { return cross_[index(n, n)]; }
  // log2(1 + g P / N0), the interference-free rate.
  double InterferenceFreeRate(PlayerId n) const;

  std::vector<std::pair<PlayerId, PlayerId>> SentinelPairs() const;
  std::vector<int> FanIn() const;

 private:
  NetworkRealization() : region_(RegionSpec::Disk(1.0)) {}
  std::size_t index(PlayerId n, PlayerId m) const {
    return static_cast<std::size_t>(n) * dest_.size() + m;
  }
  void Finish();

  RegionSpec region_;
  RadioParams radio_;
  OrientationMode orientation_ = OrientationMode::kOmni;
  int num_channels_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<Point> positions_;
  std::vector<PlayerId> dest_;
  std::vector<double> tx_heading_;
  std::vector<double> rx_heading_;
  std::vector<double> power_;
  std::vector<double> gain_;
  std::vector<double> cross_;
};

// Places players, assigns destinations, orients beams, sets powers and fills
// the gain matrix. Deterministic in the stream states.
NetworkRealization BuildRealization(const NetworkSpec& spec,
                                    NetworkStreams& streams,
                                    std::uint64_t seed = 0);
NetworkRealization BuildRealization(const NetworkSpec& spec,
                                    std::uint64_t network_seed);

}  // namespace ibr

#endif  // IBR_CHANNEL_H_
