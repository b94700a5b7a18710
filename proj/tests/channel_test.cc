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

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "ibr/channel.h"
#include "test_util.h"

namespace ibr {
namespace {

using testing::GeoGame;
using testing::ThrownKind;

TEST_CASE("big G matches the closed form") {
  RadioParams radio;
  CHECK(radio.wavelength == doctest::Approx(0.12491).epsilon(1e-4));
  CHECK(radio.BigG() == std::pow(radio.wavelength / (4 * kPi), 3.5));
}

TEST_CASE("compute_gain: omni at 1 m returns G") {
  RadioParams radio;
  const LinkGain g = ComputeGain({0, 0}, 0.0, {1, 0}, 0.0, radio);
  CHECK_FALSE(g.infinite);
  CHECK(g.value == doctest::Approx(radio.BigG()).epsilon(1e-15));
}

TEST_CASE("compute_gain: receiver behind a narrow transmit beam is zero") {
  RadioParams radio;
  radio.theta_t = kPi / 2;
  // Heading pi: the receiver at +x sits at offset pi.
  CHECK(ComputeGain({0, 0}, kPi, {1, 0}, 0.0, radio).value == 0.0);
}

TEST_CASE("compute_gain: receive indicator") {
  RadioParams radio;
  radio.theta_r = kPi / 2;
  // Receiver at (1,0) faces +x, so the transmitter at the origin is behind.
  CHECK(ComputeGain({0, 0}, 0.0, {1, 0}, 0.0, radio).value == 0.0);
  CHECK(ComputeGain({0, 0}, 0.0, {1, 0}, kPi, radio).value > 0.0);
}

TEST_CASE("compute_gain: doubling distance divides by 2^alpha") {
  RadioParams radio;
  const double g1 = ComputeGain({0, 0}, 0, {1.3, 0}, 0, radio).value;
  const double g2 = ComputeGain({0, 0}, 0, {2.6, 0}, 0, radio).value;
  CHECK(g1 / g2 == doctest::Approx(std::pow(2.0, 3.5)).epsilon(1e-12));
}

TEST_CASE("compute_gain: coincident points give the sentinel") {
  RadioParams radio;
  CHECK(ComputeGain({2, 2}, 0, {2, 2}, 0, radio).infinite);
}

TEST_CASE("power_control examples") {
  RadioParams radio;
  CHECK(PowerControl(4.0, radio, 10) == doctest::Approx(25.0));
  CHECK(4.0 * PowerControl(4.0, radio, 10) / radio.noise_n0 ==
        doctest::Approx(100.0));
  radio.snr_target_db = 0.0;
  CHECK(PowerControl(0.2, radio, 10) == doctest::Approx(5.0));

  RadioParams capped;
  capped.p0 = 1e-9;
  capped.power_cap_enabled = true;
  CHECK(PowerControl(1e-6, capped, 100) == MaxPower(capped, 100));
  CHECK(MaxPower(capped, 100) ==
        doctest::Approx(1e-9 * std::pow(std::log(100.0) / 100.0, 1.75)));

  CHECK(ThrownKind([&] { PowerControl(0.0, radio, 10); }) ==
        ErrorKind::kUnreachableDestination);
}

TEST_CASE("radio validation") {
  RadioParams r;
  r.alpha = 2.0;
  CHECK(ThrownKind([&] { r.Validate(); }) == ErrorKind::kDomain);
  r = RadioParams();
  r.theta_t = 0.0;
  CHECK(ThrownKind([&] { r.Validate(); }) == ErrorKind::kDomain);
  r = RadioParams();
  r.theta_r = 7.0;
  CHECK(ThrownKind([&] { r.Validate(); }) == ErrorKind::kDomain);
}

TEST_CASE("assign_destinations: N = 2 is forced") {
  Engine rng(1);
  const std::vector<Point> pts{{0, 0}, {1, 1}};
  CHECK(AssignDestinations(pts, 1, std::nullopt, rng) ==
        std::vector<PlayerId>{1, 0});
}

TEST_CASE("assign_destinations: destinations are among the 5 nearest") {
  Engine rng(2);
  const auto pts = SamplePositions(RegionSpec::Disk(10.0), 100, rng);
  const auto dest = AssignDestinations(pts, 5, std::nullopt, rng);
  for (PlayerId n = 0; n < 100; ++n) {
    const auto nn = NearestNeighbors(pts, n, 5);
    CHECK(std::find(nn.begin(), nn.end(), dest[n]) != nn.end());
  }
}

TEST_CASE("assign_destinations: fan-in limit honoured or infeasible") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Engine rng(seed);
    const auto pts = SamplePositions(RegionSpec::Disk(10.0), 10, rng);
    std::vector<PlayerId> dest;
    const auto kind = ThrownKind(
        [&] { dest = AssignDestinations(pts, 1, 1, rng); });
    if (kind) {
      CHECK(*kind == ErrorKind::kAssignmentInfeasible);
      continue;
    }
    std::vector<int> fanin(10, 0);
    for (PlayerId d : dest) ++fanin[d];
    CHECK(*std::max_element(fanin.begin(), fanin.end()) <= 1);
  }
}

TEST_CASE("build_realization: N = 2 has both sentinels") {
  const NetworkRealization net = GeoGame(2, 1, 4);
  CHECK(net.dest() == std::vector<PlayerId>{1, 0});
  CHECK(net.IsSentinel(0, 1));
  CHECK(net.IsSentinel(1, 0));
  CHECK(net.gain(0, 1) == 0.0);
  CHECK(net.direct(0) > 0.0);
  CHECK(net.direct(1) > 0.0);
}

TEST_CASE("build_realization is deterministic") {
  NetworkSpec spec;
  spec.n_players = 50;
  spec.num_channels = 5;
  const NetworkRealization a = BuildRealization(spec, 77);
  const NetworkRealization b = BuildRealization(spec, 77);
  CHECK(a.positions() == b.positions());
  CHECK(a.dest() == b.dest());
  for (PlayerId n = 0; n < 50; ++n) {
    for (PlayerId m = 0; m < 50; ++m) CHECK(a.gain(n, m) == b.gain(n, m));
  }
}

TEST_CASE("build_realization: finite gains times r^alpha equal G") {
  const NetworkRealization net = GeoGame(100, 10, 5);
  const double big_g = net.radio().BigG();
  int sentinels = 0;
  for (PlayerId n = 0; n < 100; ++n) {
    for (PlayerId m = 0; m < 100; ++m) {
      if (net.IsSentinel(n, m)) {
        ++sentinels;
        continue;
      }
      const double r = Distance(net.positions()[n],
                                net.positions()[net.dest()[m]]);
      CHECK(net.gain(n, m) * std::pow(r, 3.5) ==
            doctest::Approx(big_g).epsilon(1e-12));
    }
  }
  CHECK(sentinels == 100);
}

TEST_CASE("build_realization: powers hit the SNR target") {
  const NetworkRealization net = GeoGame(60, 6, 6);
  for (PlayerId n = 0; n < 60; ++n) {
    CHECK(net.signal(n) / net.noise() == doctest::Approx(100.0));
    CHECK(net.InterferenceFreeRate(n) ==
          doctest::Approx(std::log2(101.0)).epsilon(1e-12));
  }
}

TEST_CASE("build_realization: aimed beams reach every destination") {
  NetworkSpec spec;
  spec.n_players = 50;
  spec.num_channels = 5;
  spec.radio.theta_t = 2 * kPi / 3;
  spec.orientation = OrientationMode::kAimed;
  const NetworkRealization net = BuildRealization(spec, 8);
  int zeroed = 0;
  for (PlayerId n = 0; n < 50; ++n) {
    CHECK(net.direct(n) > 0.0);
    for (PlayerId m = 0; m < 50; ++m) zeroed += net.gain(n, m) == 0.0;
  }
  // Narrow transmit beams zero a good share of the cross gains.
  CHECK(zeroed > 50 * 50 / 4);
}

TEST_CASE("build_realization: fan-in constraint") {
  NetworkSpec spec;
  spec.n_players = 80;
  spec.num_channels = 8;
  spec.fanin_limit = 2;
  const NetworkRealization net = BuildRealization(spec, 9);
  const auto fanin = net.FanIn();
  CHECK(*std::max_element(fanin.begin(), fanin.end()) <= 2);
}

TEST_CASE("build_realization: power cap") {
  NetworkSpec spec;
  spec.n_players = 30;
  spec.num_channels = 3;
  spec.radio.p0 = 1e-3;
  spec.radio.power_cap_enabled = true;
  const NetworkRealization net = BuildRealization(spec, 10);
  const double cap = MaxPower(spec.radio, 30);
  for (double p : net.power()) CHECK(p <= cap * (1 + 1e-12));
}

TEST_CASE("build_realization needs two players") {
  NetworkSpec spec;
  spec.n_players = 1;
  CHECK(ThrownKind([&] { BuildRealization(spec, 1); }) ==
        ErrorKind::kInsufficientPlayers);
}

TEST_CASE("from_gains rejects self destinations and bad shapes") {
  CHECK(ThrownKind([] {
          NetworkRealization::FromGains({0, 0}, {1, 1}, {1, 1, 1, 1}, 1);
        }) == ErrorKind::kShape);
  CHECK(ThrownKind([] {
          NetworkRealization::FromGains({1, 0}, {1, 1}, {1, 1, 1}, 1);
        }) == ErrorKind::kShape);
  CHECK(ThrownKind([] {
          NetworkRealization::FromGains({1, 0}, {1, 1}, {0, 1, 1, 1}, 1);
        }) == ErrorKind::kUnreachableDestination);
}

}  // namespace
}  // namespace ibr
