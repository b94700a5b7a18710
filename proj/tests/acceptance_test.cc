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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Thresholds are fixed here and are not
// tuned to the outcome.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "ibr/analysis.h"
#include "ibr/experiment.h"
#include "test_util.h"

namespace ibr {
namespace {

using testing::RandomGainGame;

int g_failures = 0;

void Verdict(const char* id, bool pass, const std::string& detail) {
  std::printf("%s %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  g_failures += !pass;
}

std::string Fmt(const char* fmt, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, a);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       since)
      .count();
}

// Least-squares slope of log y on log x.
double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------

void Ac1(const SweepResult& fig4) {
  const double reported[] = {78, 156, 249, 353, 443};
  const auto agg = Summarize(fig4);
  bool pass = agg.size() == 5;
  std::vector<double> n, mean;
  std::string detail = "t_con mean vs reported:";
  for (std::size_t i = 0; i < agg.size() && i < 5; ++i) {
    const double rel = agg[i].t_con_mean / reported[i] - 1.0;
    pass &= agg[i].converged > 0 && std::fabs(rel) <= 0.25;
    n.push_back(agg[i].point.n_players);
    mean.push_back(agg[i].t_con_mean);
    detail += " N=" + std::to_string(agg[i].point.n_players) + ":" +
              Fmt("%.1f", agg[i].t_con_mean) + "/" +
              Fmt("%.0f", reported[i]) + "(" + Fmt("%+.0f%%", 100 * rel) +
              ", censored " + std::to_string(agg[i].censored) + ")";
  }
  const double slope = LogLogSlope(n, mean);
  pass &= slope <= 1.0;
  Verdict("AC1", pass, detail + "; log-log slope " + Fmt("%.3f", slope));
}

void Ac2(const SweepResult& fig5) {
  const auto agg = Summarize(fig5);
  bool pass = true;
  bool beats_both = true;
  std::string detail;
  for (const Aggregate& a : agg) {
    const double load = a.point.load();
    const double slot = a.mean_rate / a.tdma_slot;
    const double frame = a.mean_rate / a.tdma_frame;
    if (std::fabs(load - 2) < 1e-9) {
      pass &= slot >= 1.4 && slot <= 2.0;
      detail += " l=2 ratio " + Fmt("%.2f", slot) + " (frame-power " +
                Fmt("%.2f", frame) + ");";
    }
    if (std::fabs(load - 20) < 1e-9) {
      pass &= slot >= 5.5 && slot <= 8.5;
      detail += " l=20 ratio " + Fmt("%.2f", slot) + " (frame-power " +
                Fmt("%.2f", frame) + ");";
    }
    const bool beats = a.mean_rate > a.tdma_slot && a.mean_rate > a.random_rate;
    if (!beats) {
      detail += " l=" + Fmt("%g", load) + " br " + Fmt("%.3f", a.mean_rate) +
                " vs tdma " + Fmt("%.3f", a.tdma_slot) + ", random " +
                Fmt("%.3f", a.random_rate) + ";";
    }
    beats_both &= beats;
  }
  detail += beats_both ? " beats both baselines at every l"
                       : " does not beat both baselines at every l";
  Verdict("AC2", pass && beats_both && !agg.empty(), detail);
}

void Ac3(const SweepResult& fig4) {
  double sum = 0;
  int count = 0;
  for (const SweepRow& row : fig4.rows) {
    if (row.n_players == 400 && row.ok()) {
      sum += row.mean_rate;
      ++count;
    }
  }
  const double mean = count ? sum / count : 0.0;
  const double target = std::log2(101.0);
  const double rel = std::fabs(mean - target) / target;
  Verdict("AC3", count > 0 && rel <= 0.15,
          "N=400 mean rate " + Fmt("%.3f", mean) + " vs " +
              Fmt("%.3f", target) + " (" + Fmt("%.1f%%", 100 * rel) +
              " off, " + std::to_string(count) + " realizations)");
}

void Ac4() {
  long long steps = 0, decomposition_bad = 0, d1_bad = 0, d3_bad = 0;
  double worst_rel = 0;
  for (int n : {20, 50, 100, 200}) {
    for (double eps : {0.01, 0.1, 0.5, 2.0}) {
      for (int r = 0; r < 3; ++r) {
        const auto net = testing::GeoGame(n, std::max(1, n / 10),
                                          NetworkSeed(4, n, r));
        for (const auto& policy :
             {SchedulePolicy::Deviators(), SchedulePolicy::AllPlayers()}) {
          const Trace t = Run(net, eps, policy, {}, DeriveSeed(4, {std::uint64_t(n), std::uint64_t(r)}));
          StrategyProfile a = t.initial_profile;
          for (const StepRecord& s : t.steps) {
            ++steps;
            const StrategyProfile b = a.With(s.actor, s.new_channel);
            const double dx = SumRate(net, b) - SumRate(net, a);
            const DeltaDecomposition d = DecomposeDelta(net, a, b, s.actor);
            const double rel = std::fabs(d.total() - dx) /
                               std::max(1.0, std::fabs(SumRate(net, a)));
            worst_rel = std::max(worst_rel, rel);
            decomposition_bad += rel > 1e-9;
            if (s.deviated()) d1_bad += !(s.d1 > eps / 2);
            d3_bad += s.d3 < 0.0 || d.d3 < 0.0;
            a = b;
          }
        }
      }
    }
  }

  Engine rng(44);
  long long lemma3_bad = 0;
  for (int i = 0; i < 1000000; ++i) {
    const double a = std::exp2(40 * UniformUnit(rng) - 20);
    const double b = std::exp2(40 * UniformUnit(rng) - 20);
    const double di = std::exp2(40 * UniformUnit(rng) - 20);
    const Lemma3Gap g = ComputeLemma3Gap(a, b, di);
    lemma3_bad += g.lhs > g.rhs * (1 + 1e-12) + 1e-300;
  }

  // Scaling every power and the noise by c leaves all SINRs, hence every
  // eps-best set, unchanged.
  long long scaling_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto net = RandomGainGame(rng, 6, 3, 10.0);
    const double c = std::exp2(20 * UniformUnit(rng) - 10);
    std::vector<double> gain(36);
    for (PlayerId n = 0; n < 6; ++n) {
      for (PlayerId m = 0; m < 6; ++m) gain[n * 6 + m] = net.gain(n, m);
    }
    std::vector<double> power = net.power();
    for (double& p : power) p *= c;
    const auto scaled = NetworkRealization::FromGains(
        net.dest(), power, gain, 3, net.noise() * c);
    const auto a = StrategyProfile::Uniform(6, 3, rng);
    for (PlayerId n = 0; n < 6; ++n) {
      scaling_bad += EpsBestSet(net, a, n, 0.3) != EpsBestSet(scaled, a, n, 0.3);
    }
  }

  const bool pass = decomposition_bad == 0 && d1_bad == 0 && d3_bad == 0 &&
                    lemma3_bad == 0 && scaling_bad == 0 && steps > 0;
  Verdict("AC4", pass,
          std::to_string(steps) + " steps: decomposition misses " +
              std::to_string(decomposition_bad) + " (worst rel " +
              Fmt("%.2e", worst_rel) + "), d1<=eps/2 " +
              std::to_string(d1_bad) + ", d3<0 " + std::to_string(d3_bad) +
              "; lemma3 misses " + std::to_string(lemma3_bad) +
              "/1000000; scaling misses " + std::to_string(scaling_bad));
}

void Ac5() {
  Engine rng(55);
  int converged = 0, contained = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = 2 + static_cast<int>(UniformIndex(rng, 4));
    const int k = 1 + static_cast<int>(UniformIndex(rng, 3));
    const double eps = i % 2 ? 0.5 : 0.05;
    const NetworkRealization net =
        i % 2 ? RandomGainGame(rng, n, k, 20.0)
              : testing::GeoGame(n, k, DeriveSeed(55, {std::uint64_t(i)}));
    const Trace t = Run(net, eps, SchedulePolicy::Deviators(), {},
                        DeriveSeed(56, {std::uint64_t(i)}));
    if (!t.converged) continue;
    ++converged;
    contained += OracleEnumerate(net, eps).Contains(t.final_profile);
  }

  // Fixed deviating state with a multi-channel eps/2-best set.
  double z = 1e9;
  for (std::uint64_t seed = 0; seed < 1000 && z == 1e9; ++seed) {
    Engine pick(seed);
    const auto net = RandomGainGame(pick, 5, 3, 30.0);
    const auto a = StrategyProfile::Uniform(5, 3, pick);
    for (PlayerId n = 0; n < 5; ++n) {
      if (GameState(net, a).IsEpsBest(n, 0.2) ||
          EpsBestSet(net, a, n, 0.1).size() < 2) {
        continue;
      }
      const Drift exact = ExpectedDrift(net, a, n, 0.2);
      constexpr int kDraws = 100000;
      Engine draws(seed + 1);
      double sum = 0, sum2 = 0;
      for (int i = 0; i < kDraws; ++i) {
        const BrOutcome br = BrEps(net, a, n, 0.2, draws);
        const double x = DecomposeDelta(net, a, br.profile, n).total();
        sum += x;
        sum2 += x * x;
      }
      const double mean = sum / kDraws;
      const double se =
          std::sqrt(std::max(0.0, sum2 / kDraws - mean * mean) / kDraws);
      z = se > 0 ? std::fabs(mean - exact.e_total) / se
                 : (mean == exact.e_total ? 0.0 : 1e9);
      break;
    }
  }

  Verdict("AC5", converged > 0 && contained == converged && z <= 3.0,
          std::to_string(contained) + "/" + std::to_string(converged) +
              " converged finals in the oracle set (50 instances); drift " +
              "sample deviation " + Fmt("%.2f", z) + " SE");
}

void Ac6(const SweepResult& fig4) {
  int total = 0, clean = 0;
  long long checks = 0, violations = 0;
  for (const SweepRow& row : fig4.rows) {
    if (row.n_players != 400 || !row.ok()) continue;
    ++total;
    clean += row.drift_violations == 0;
    checks += row.drift_checks;
    violations += row.drift_violations;
  }
  Verdict("AC6", total == 100 && clean >= 90,
          std::to_string(clean) + "/" + std::to_string(total) +
              " realizations with positive drift at every deviating step (" +
              std::to_string(violations) + " of " + std::to_string(checks) +
              " steps non-positive)");
}

void Ac7(const SweepResult& fig4) {
  bool pass = true;
  std::string detail;
  for (int n : {100, 400}) {
    std::vector<const SweepRow*> rows;
    for (const SweepRow& row : fig4.rows) {
      if (row.n_players == n && row.ok()) rows.push_back(&row);
    }
    for (int l : {2, 5, 10}) {
      int exceed = 0;
      for (const SweepRow* row : rows) {
        // A censored run never reached the bound's side of the event.
        exceed += !row->t_con || *row->t_con >= l * row->t_hat;
      }
      const double p = rows.empty() ? 1.0 : double(exceed) / rows.size();
      pass &= !rows.empty() && p <= 1.0 / l;
      detail += " N=" + std::to_string(n) + ",L=" + std::to_string(l) + ":" +
                Fmt("%.3f", p);
    }
  }
  Verdict("AC7", pass, "Pr(T_con >= L t_hat):" + detail);
}

void Ac8() {
  constexpr int kRealizations = 10;
  constexpr double kLoad = 10.0;
  std::vector<double> f2, f4;
  std::string detail;
  for (int n : {100, 400, 1600}) {
    const int k = static_cast<int>(std::lround(n / kLoad));
    std::vector<NetworkRealization> nets;
    int lemma4_ok = 0;
    for (int r = 0; r < kRealizations; ++r) {
      NetworkSpec spec;
      spec.n_players = n;
      spec.num_channels = k;
      nets.push_back(BuildRealization(spec, NetworkSeed(8, n, r)));
      Engine rng(DeriveSeed(NetworkSeed(8, n, r),
                            {static_cast<std::uint64_t>(Stream::kSampling)}));
      std::vector<StrategyProfile> profiles;
      for (int i = 0; i < 3; ++i) {
        profiles.push_back(StrategyProfile::Uniform(n, k, rng));
      }
      lemma4_ok += CheckLemma4(nets.back(), 0.1, profiles).satisfied;
    }
    f2.push_back(CheckLemma2(nets).fraction);
    f4.push_back(double(lemma4_ok) / kRealizations);
    detail += " N=" + std::to_string(n) + ": lemma2 " +
              Fmt("%.2f", f2.back()) + ", lemma4 " + Fmt("%.2f", f4.back()) +
              ";";
  }
  const bool pass = std::is_sorted(f2.begin(), f2.end()) &&
                    std::is_sorted(f4.begin(), f4.end());
  Verdict("AC8", pass, "satisfaction fractions" + detail);
}

}  // namespace
}  // namespace ibr

int main() {
  using namespace ibr;
  const auto start = std::chrono::steady_clock::now();

  std::printf("running fig4 preset sweep...\n");
  std::fflush(stdout);
  const SweepResult fig4 = RunSweep(PresetConfig(Preset::kFig4));
  std::printf("  %.1f s\n", Seconds(start));
  Ac1(fig4);

  std::printf("running fig5 preset sweep...\n");
  std::fflush(stdout);
  const SweepResult fig5 = RunSweep(PresetConfig(Preset::kFig5));
  std::printf("  %.1f s\n", Seconds(start));
  Ac2(fig5);

  Ac3(fig4);
  Ac4();
  Ac5();
  Ac6(fig4);
  Ac7(fig4);
  Ac8();

  std::printf("%d criteria failed, %.1f s total\n", g_failures,
              Seconds(start));
  return g_failures == 0 ? 0 : 1;
}
