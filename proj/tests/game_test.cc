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

#include "doctest.h"
#include "ibr/game.h"
#include "test_util.h"

namespace ibr {
namespace {

using testing::GeoGame;
using testing::RandomGainGame;
using testing::ThrownKind;

// Two pairs talking to each other: 0 <-> 1 and 2 <-> 3.
NetworkRealization TwoPairs() {
  // gain[tx * 4 + link]
  std::vector<double> g(16, 0.0);
  g[0 * 4 + 0] = 100;
  g[1 * 4 + 1] = 100;
  g[2 * 4 + 2] = 100;
  g[3 * 4 + 3] = 100;
  g[2 * 4 + 0] = 0.5;
  g[3 * 4 + 0] = 0.25;
  g[2 * 4 + 1] = 1.0;
  g[3 * 4 + 1] = 1.0;
  g[0 * 4 + 2] = 3.0;
  g[1 * 4 + 2] = 1.0;
  g[0 * 4 + 3] = 2.0;
  g[1 * 4 + 3] = 2.0;
  return NetworkRealization::FromGains({1, 0, 3, 2}, {1, 1, 2, 4}, g, 2);
}

// Brute-force rate recomputation straight from the definitions, without
// any library helper.
double BruteRate(const NetworkRealization& net, const StrategyProfile& a,
                 PlayerId n) {
  double interference = 0.0;
  for (PlayerId m = 0; m < net.size(); ++m) {
    if (m == n || a[m] != a[n]) continue;
    if (net.dest()[n] == m) return 0.0;
    interference += net.gain(m, n) * net.power()[m];
  }
  return std::log2(1.0 + net.gain(n, n) * net.power()[n] /
                             (net.noise() + interference));
}

TEST_CASE("interference: alone on the channel is zero") {
  const auto net = TwoPairs();
  const StrategyProfile a(2, {0, 1, 1, 1});
  const Interference i = InterferenceAt(net, a, 0, 0);
  CHECK(i.power == 0.0);
  CHECK_FALSE(i.infinite);
}

TEST_CASE("interference: two-term sum") {
  const auto net = TwoPairs();
  const StrategyProfile a(2, {0, 1, 0, 0});
  const Interference i = InterferenceAt(net, a, 0, 0);
  CHECK(i.power == doctest::Approx(0.5 * 2 + 0.25 * 4));
  CHECK_FALSE(i.infinite);
}

TEST_CASE("interference: sentinel pair is infinite") {
  const auto net = TwoPairs();
  const StrategyProfile a(2, {0, 0, 1, 1});
  CHECK(InterferenceAt(net, a, 0, 0).infinite);
  CHECK(Utility(net, a, 0) == 0.0);
  CHECK(Utility(net, a, 1) == 0.0);
}

TEST_CASE("utility examples") {
  const auto net = TwoPairs();
  const StrategyProfile a(2, {0, 1, 1, 1});
  CHECK(Utility(net, a, 0) == doctest::Approx(std::log2(101.0)));
  CHECK(RateFromInterference(1.0, 0.25, {0.75, false}) == 1.0);
  CHECK(RateFromInterference(5.0, 1.0, {0.0, true}) == 0.0);
}

TEST_CASE("sum_rate examples") {
  Engine rng(1);
  const auto net = RandomGainGame(rng, 4, 4);
  const StrategyProfile orth(4, {0, 1, 2, 3});
  double cap = 0.0;
  for (PlayerId n = 0; n < 4; ++n) cap += net.InterferenceFreeRate(n);
  CHECK(SumRate(net, orth) == doctest::Approx(cap));

  for (int trial = 0; trial < 50; ++trial) {
    const auto g = RandomGainGame(rng, 4, 2);
    const auto a = StrategyProfile::Uniform(4, 2, rng);
    double brute = 0.0;
    for (PlayerId n = 0; n < 4; ++n) brute += BruteRate(g, a, n);
    CHECK(SumRate(g, a) == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("eps_best_set on hypothetical utilities") {
  const std::vector<double> u{5.00, 4.95};
  CHECK(EpsBestFromUtilities(u, 0.1) == std::vector<ChannelId>{0, 1});
  CHECK(EpsBestFromUtilities(u, 0.01) == std::vector<ChannelId>{0});
  const std::vector<double> tie{3.0, 1.0, 3.0};
  CHECK(EpsBestFromUtilities(tie, 0.0) == std::vector<ChannelId>{0, 2});
  // Inclusive boundary.
  const std::vector<double> edge{1.0, 0.5};
  CHECK(EpsBestFromUtilities(edge, 0.5) == std::vector<ChannelId>{0, 1});
}

TEST_CASE("eps_best_set rejects negative eps") {
  const auto net = TwoPairs();
  const StrategyProfile a(2, {0, 1, 0, 1});
  CHECK(ThrownKind([&] { EpsBestSet(net, a, 0, -0.1); }) ==
        ErrorKind::kDomain);
}

TEST_CASE("br_eps: unique argmax stays put without drawing") {
  const auto net = TwoPairs();
  const StrategyProfile a(2, {0, 1, 1, 1});
  Engine rng(5), untouched(5);
  const BrOutcome out = BrEps(net, a, 0, 0.1, rng);
  CHECK_FALSE(out.deviated);
  CHECK(out.profile == a);
  CHECK(rng() == untouched());
}

TEST_CASE("br_eps: singleton target is deterministic") {
  const auto net = TwoPairs();
  // Player 0 shares channel 0 with its own receiver: rate 0; channel 1
  // holds only the far pair.
  const StrategyProfile a(2, {0, 0, 1, 1});
  for (std::uint64_t s = 0; s < 10; ++s) {
    Engine rng(s);
    const BrOutcome out = BrEps(net, a, 0, 0.1, rng);
    CHECK(out.deviated);
    CHECK(out.profile[0] == 1);
  }
}

TEST_CASE("br_eps: deviation gains more than eps / 2") {
  Engine rng(9);
  int deviations = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto net = RandomGainGame(rng, 6, 3, 50.0);
    const auto a = StrategyProfile::Uniform(6, 3, rng);
    const double eps = 0.2;
    for (PlayerId n = 0; n < 6; ++n) {
      const BrOutcome out = BrEps(net, a, n, eps, rng);
      if (!out.deviated) continue;
      ++deviations;
      CHECK(Utility(net, out.profile, n) - Utility(net, a, n) > eps / 2);
    }
  }
  CHECK(deviations > 0);
}

TEST_CASE("is_eps_pne examples") {
  const auto net = TwoPairs();
  // Player 0 on its receiver's channel has rate 0 and wants out.
  CHECK_FALSE(IsEpsPne(net, StrategyProfile(2, {0, 0, 1, 1}), 0.1));
  Engine rng(2);
  const auto orth_net = RandomGainGame(rng, 4, 4);
  CHECK(IsEpsPne(orth_net, StrategyProfile(4, {3, 1, 0, 2}), 0.0));

  for (int trial = 0; trial < 100; ++trial) {
    const auto g = RandomGainGame(rng, 3, 2, 30.0);
    const auto a = StrategyProfile::Uniform(3, 2, rng);
    bool brute = true;
    for (PlayerId n = 0; n < 3; ++n) {
      const double now = BruteRate(g, a, n);
      for (ChannelId k = 0; k < 2; ++k) {
        if (BruteRate(g, a.With(n, k), n) > now + 0.1) brute = false;
      }
    }
    CHECK(IsEpsPne(g, a, 0.1) == brute);
  }
}

TEST_CASE("delta decomposition examples") {
  const auto net = TwoPairs();
  const StrategyProfile a(2, {0, 1, 0, 1});
  const DeltaDecomposition none = DecomposeDelta(net, a, a, 2);
  CHECK(none.d1 == 0.0);
  CHECK(none.d2 == 0.0);
  CHECK(none.d3 == 0.0);

  // Player 2 joins its own receiver on channel 1 and leaves player 0 alone.
  const StrategyProfile b(2, {0, 1, 1, 1});
  const DeltaDecomposition d = DecomposeDelta(net, a, b, 2);
  CHECK(d.d3 >= 0.0);
  CHECK(d.total() == doctest::Approx(SumRate(net, b) - SumRate(net, a)));

  CHECK(ThrownKind([&] {
          DecomposeDelta(net, a, StrategyProfile(2, {1, 1, 1, 1}), 2);
        }) == ErrorKind::kInvalidTransition);
}

TEST_CASE("delta decomposition: move to an empty channel") {
  Engine rng(4);
  const auto net = RandomGainGame(rng, 4, 3);
  const StrategyProfile a(3, {0, 0, 1, 1});
  const StrategyProfile b = a.With(0, 2);
  const DeltaDecomposition d = DecomposeDelta(net, a, b, 0);
  CHECK(d.d2 == 0.0);
  CHECK(d.d3 >= 0.0);
}

TEST_CASE("delta decomposition is exact on random instances") {
  Engine rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const auto net = RandomGainGame(rng, 7, 3, 20.0);
    const auto a = StrategyProfile::Uniform(7, 3, rng);
    const PlayerId n = static_cast<PlayerId>(UniformIndex(rng, 7));
    const auto b = a.With(n, static_cast<ChannelId>(UniformIndex(rng, 3)));
    const DeltaDecomposition d = DecomposeDelta(net, a, b, n);
    const double x0 = SumRate(net, a);
    CHECK(std::fabs(d.total() - (SumRate(net, b) - x0)) <=
          1e-9 * std::max(1.0, x0));
    CHECK(d.d3 >= 0.0);
  }
}

TEST_CASE("expected_drift examples") {
  const auto net = TwoPairs();
  // Singleton target set: equals the single transition.
  const StrategyProfile a(2, {0, 0, 1, 1});
  const Drift drift = ExpectedDrift(net, a, 0, 0.1);
  const DeltaDecomposition d = DecomposeDelta(net, a, a.With(0, 1), 0);
  CHECK(drift.e1_plus_e2 == doctest::Approx(d.d1 + d.d2));
  CHECK(drift.e_total == doctest::Approx(d.total()));

  CHECK(ThrownKind([&] {
          ExpectedDrift(net, StrategyProfile(2, {0, 1, 0, 1}), 0, 0.1);
        }) == ErrorKind::kNotApplicable);
}

TEST_CASE("expected_drift matches explicit enumeration") {
  Engine rng(7);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    const auto net = RandomGainGame(rng, 4, 3, 40.0);
    const auto a = StrategyProfile::Uniform(4, 3, rng);
    for (PlayerId n = 0; n < 4; ++n) {
      const auto keep = EpsBestSet(net, a, n, 0.3);
      if (std::binary_search(keep.begin(), keep.end(), a[n])) continue;
      const auto targets = EpsBestSet(net, a, n, 0.15);
      double e12 = 0.0, et = 0.0;
      for (ChannelId k : targets) {
        const auto b = a.With(n, k);
        const double dx = SumRate(net, b) - SumRate(net, a);
        const DeltaDecomposition d = DecomposeDelta(net, a, b, n);
        e12 += dx - d.d3;
        et += dx;
      }
      const Drift drift = ExpectedDrift(net, a, n, 0.3);
      CHECK(drift.e1_plus_e2 ==
            doctest::Approx(e12 / targets.size()).epsilon(1e-9));
      CHECK(drift.e_total == doctest::Approx(et / targets.size()).epsilon(1e-9));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("utility is strictly decreasing in finite interference") {
  double prev = RateFromInterference(50.0, 1.0, {0.0, false});
  for (double i = 0.1; i < 100.0; i *= 1.7) {
    const double r = RateFromInterference(50.0, 1.0, {i, false});
    CHECK(r < prev);
    prev = r;
  }
}

TEST_CASE("argmax invariance under common power and noise scaling") {
  Engine rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto base = RandomGainGame(rng, 6, 3, 30.0);
    const double c = 0.001 + 1000.0 * UniformUnit(rng);
    std::vector<double> gain;
    for (PlayerId n = 0; n < 6; ++n) {
      for (PlayerId m = 0; m < 6; ++m) gain.push_back(base.gain(n, m));
    }
    std::vector<double> power(base.power());
    for (double& p : power) p *= c;
    const auto scaled = NetworkRealization::FromGains(
        base.dest(), power, gain, 3, base.noise() * c);
    const auto a = StrategyProfile::Uniform(6, 3, rng);
    for (PlayerId n = 0; n < 6; ++n) {
      CHECK(EpsBestSet(base, a, n, 0.1) == EpsBestSet(scaled, a, n, 0.1));
      Engine r1(trial), r2(trial);
      CHECK(BrEps(base, a, n, 0.1, r1).profile ==
            BrEps(scaled, a, n, 0.1, r2).profile);
    }
  }
}

TEST_CASE("rate never exceeds the interference-free cap") {
  Engine rng(14);
  const auto net = GeoGame(80, 8, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = StrategyProfile::Uniform(80, 8, rng);
    const RateVector r = Rates(net, a);
    for (PlayerId n = 0; n < 80; ++n) {
      CHECK(r[n] >= 0.0);
      CHECK(r[n] <= net.InterferenceFreeRate(n));
    }
  }
}

TEST_CASE("profile validation") {
  CHECK(ThrownKind([] { StrategyProfile(2, {0, 2}); }) == ErrorKind::kDomain);
  CHECK(ThrownKind([] { StrategyProfile(0, {}); }) == ErrorKind::kDomain);
  StrategyProfile a(2, {0, 1});
  CHECK(ThrownKind([&] { a.Set(2, 0); }) == ErrorKind::kDomain);
}

TEST_CASE("game state agrees with the reference bit for bit") {
  Engine rng(15);
  const auto net = GeoGame(120, 12, 7);
  GameState state(net, StrategyProfile::Uniform(120, 12, rng));
  for (int step = 0; step < 400; ++step) {
    const PlayerId n = static_cast<PlayerId>(UniformIndex(rng, 120));
    const ChannelId k = static_cast<ChannelId>(UniformIndex(rng, 12));
    const DeltaDecomposition preview = state.PreviewMove(n, k);
    const DeltaDecomposition ref =
        DecomposeDelta(net, state.profile(), state.profile().With(n, k), n);
    CHECK(preview.d1 == ref.d1);
    CHECK(preview.d2 == ref.d2);
    CHECK(preview.d3 == ref.d3);
    state.Move(n, k);
    if (step % 50 == 0) {
      CHECK(state.Rates() == Rates(net, state.profile()));
      CHECK(state.MaxCacheError() == 0.0);
      for (PlayerId m = 0; m < 120; m += 17) {
        CHECK(state.EpsBestSet(m, 0.1) ==
              EpsBestSet(net, state.profile(), m, 0.1));
        const auto set = state.EpsBestSet(m, 0.1);
        CHECK(state.IsEpsBest(m, 0.1) ==
              std::binary_search(set.begin(), set.end(), state.profile()[m]));
      }
    }
  }
}

TEST_CASE("game state best response uses the same draws as br_eps") {
  Engine rng(16);
  const auto net = GeoGame(60, 6, 8);
  const auto a = StrategyProfile::Uniform(60, 6, rng);
  GameState state(net, a);
  for (PlayerId n = 0; n < 60; ++n) {
    Engine r1(n), r2(n);
    const BrOutcome ref = BrEps(net, a, n, 0.1, r1);
    const std::optional<ChannelId> got = state.BestResponse(n, 0.1, r2);
    CHECK(ref.deviated == got.has_value());
    if (got) CHECK(ref.profile[n] == *got);
  }
}

}  // namespace
}  // namespace ibr
