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

#ifndef IBR_ANALYSIS_H_
#define IBR_ANALYSIS_H_

// Empirical checks of the asymptotic claims about random interference games:
// near/far set sizes, the size of eps-best sets, the sign of the expected
// sum-rate drift and the convergence-time bound. Every check reports; none
// of them gate a run, since small instances are expected to violate
// asymptotic statements now and then.
//
// All logarithms inside thresholds are natural logarithms.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ibr/channel.h"
#include "ibr/dynamics.h"
#include "ibr/game.h"
#include "ibr/rng.h"

namespace ibr {

inline constexpr double kDefaultQ = 2.0;

struct TheoryParams {
  double q = kDefaultQ;
  double load = 1.0;  // l_N = N / K

  // (ln N / N)^(alpha / (2 alpha + 4)).
  static double Rho(int n_players, double alpha);
  static TheoryParams For(const NetworkRealization& net, double q = kDefaultQ);
};

// Radius of the near region around a transmitter: rho / sqrt(pi lambda).
double NearRadius(const NetworkRealization& net);
// Radius of the non-far region around a receiver.
double FarRadius(const NetworkRealization& net, double q, double load);

// {m != n : d(m) != n, r_{n,d(m)} <= NearRadius, d(m) inside n's tx beam}.
std::vector<PlayerId> NearSet(const NetworkRealization& net, PlayerId n);
// Complement of {m : r_{m,d(n)} <= FarRadius, m inside d(n)'s rx beam}.
std::vector<PlayerId> FarSet(const NetworkRealization& net, PlayerId n,
                             double q, double load);

struct Lemma2Bounds {
  double near_bound = 0.0;
  double far_bound = 0.0;
};

// near: (theta_t / pi) (N^2 ln^alpha N)^(1 / (alpha + 2));
// far:  (1 - (q - 1) / (2 (q l - 1))) N.
Lemma2Bounds ComputeLemma2Bounds(int n_players, double alpha, double theta_t,
                                 double q, double load);

struct Lemma2Row {
  int n_players = 0;
  int max_near = 0;
  int min_far = 0;
  Lemma2Bounds bounds;
  bool satisfied = false;
};

struct Lemma2Report {
  std::vector<Lemma2Row> rows;
  double fraction = 0.0;  // rows with both bounds met
};

// Load per realization is N / K of that realization.
Lemma2Report CheckLemma2(std::span<const NetworkRealization> realizations,
                         double q = kDefaultQ);

// Channels holding only far players (other than n) and fewer than
// ceil(q l) of them.
std::vector<ChannelId> GoodChannelSet(const NetworkRealization& net,
                                      const StrategyProfile& profile,
                                      PlayerId n, double q, double load);

struct Lemma4Report {
  int min_best_set = 0;  // min |B_eps| over players and sampled profiles
  double bound = 0.0;    // (1 / (2 l)) (1 - 1/q) N
  // max |u_n(exact BR) - interference-free rate| over players and profiles.
  double max_gap = 0.0;
  bool satisfied = false;  // min_best_set >= bound
};

Lemma4Report CheckLemma4(const NetworkRealization& net, double eps,
                         std::span<const StrategyProfile> sampled_profiles,
                         double q = kDefaultQ);

struct DriftCheck {
  std::int64_t t = 0;
  PlayerId actor = -1;
  double e1_plus_e2 = 0.0;
  double e_total = 0.0;
  bool positive = false;
};

struct Lemma5Report {
  std::vector<DriftCheck> checks;
  int violations = 0;
};

// Replays the trace from its initial profile and evaluates the exact
// expected drift before every step whose actor deviated.
Lemma5Report CheckLemma5(const NetworkRealization& net, const Trace& trace);

struct Lemma3Gap {
  double lhs = 0.0;
  double rhs = 0.0;
};

// lhs = log2(1 + a/b) - log2(1 + a/(b + dI)), rhs = a/(a+b) * dI/(b ln 2).
// Throws kDomain unless all three inputs are positive.
Lemma3Gap ComputeLemma3Gap(double a, double b, double delta_i);

// 4 cbar N / eps under the deviators schedule, 4 cbar N^2 / eps otherwise.
double ConvergenceTimeBound(double cbar, double eps, int n_players,
                            PolicyKind policy);

// Orthogonal sharing: log2(1 + snr) / l per slot, or log2(1 + l snr) / l when
// the power budget is per frame.
double BaselineTdma(double load, double snr_linear, bool per_slot_power);

// Mean per-player utility over `samples` i.i.d. uniform channel profiles.
double BaselineRandom(const NetworkRealization& net, Engine& rng,
                      int samples);

// (1/N) sum log2(1 + g P / N0).
double MeanInterferenceFreeRate(const NetworkRealization& net);
// max_n SNR_n / (SNR_n + 1).
double Gamma(const NetworkRealization& net);

inline constexpr double kOracleProfileLimit = 1e7;

struct OracleResult {
  std::vector<StrategyProfile> equilibria;
  std::vector<double> sum_rates;  // aligned with equilibria
  std::int64_t profiles_scanned = 0;

  bool Contains(const StrategyProfile& profile) const;
};

// Exhaustive scan of all K^N profiles with the reference equilibrium test.
// Throws kInstanceTooLarge when K^N exceeds kOracleProfileLimit.
OracleResult OracleEnumerate(const NetworkRealization& net, double eps);

struct DiagnosticsReport {
  int n_players = 0;
  int num_channels = 0;
  double eps = 0.0;
  double q = kDefaultQ;
  double load = 0.0;
  double rho = 0.0;
  std::vector<int> near_counts;
  std::vector<int> far_counts;
  double near_bound = 0.0;
  double far_bound = 0.0;
  int eps_set_min = 0;
  double eps_set_bound = 0.0;
  double utility_gap_max = 0.0;
  std::vector<DriftCheck> drift_checks;
  int drift_violations = 0;
  double cbar = 0.0;
  double gamma = 0.0;
  // Reference value of the asymptotic drift lower bound; often negative at
  // desk-scale N.
  double drift_lower_bound = 0.0;
  double t_hat = 0.0;
  std::optional<std::int64_t> t_con;
};

// Geometry-dependent fields need a realization built from positions.
DiagnosticsReport BuildDiagnostics(
    const NetworkRealization& net, double eps, PolicyKind policy,
    std::span<const StrategyProfile> sampled_profiles,
    const Trace* trace = nullptr, double q = kDefaultQ);

}  // namespace ibr

#endif  // IBR_ANALYSIS_H_
