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

#include "ibr/analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ibr/errors.h"

namespace ibr {
namespace {

void RequireGeometry(const NetworkRealization& net, const char* what) {
  if (!net.has_geometry()) {
    throw Error(ErrorKind::kNotApplicable,
                std::string(what) + " needs a realization with positions");
  }
}

// True when `target` lies in the beam of width `width` centred on `heading`
// at `origin`. Coincident points count as inside.
bool InBeam(const Point& origin, double heading, double width,
            const Point& target) {
  if (width >= 2.0 * kPi || origin == target) return true;
  return std::fabs(AngleOffset(origin, target, heading)) <= width / 2.0;
}

double Load(const NetworkRealization& net) {
  return static_cast<double>(net.size()) / net.num_channels();
}

}  // namespace

double TheoryParams::Rho(int n_players, double alpha) {
  if (n_players < 2) {
    throw Error(ErrorKind::kInsufficientPlayers, "rho needs N >= 2");
  }
  const double n = n_players;
  return std::pow(std::log(n) / n, alpha / (2.0 * alpha + 4.0));
}

TheoryParams TheoryParams::For(const NetworkRealization& net, double q) {
  return TheoryParams{q, Load(net)};
}

double NearRadius(const NetworkRealization& net) {
  RequireGeometry(net, "near set");
  const double lambda = net.region().lambda();
  return TheoryParams::Rho(net.size(), net.radio().alpha) /
         std::sqrt(kPi * lambda);
}

double FarRadius(const NetworkRealization& net, double q, double load) {
  RequireGeometry(net, "far set");
  if (!(q > 1.0) || !(q * load > 1.0)) {
    throw Error(ErrorKind::kDomain, "far radius needs q > 1 and q * l > 1");
  }
  const double lambda = net.region().lambda();
  return std::sqrt((q - 1.0) / (q * load - 1.0) /
                   (2.0 * net.radio().theta_r * lambda));
}

std::vector<PlayerId> NearSet(const NetworkRealization& net, PlayerId n) {
  const double radius = NearRadius(net);
  const auto& pos = net.positions();
  const auto& dest = net.dest();
  const double theta_t = net.radio().theta_t;
  std::vector<PlayerId> out;
  for (PlayerId m = 0; m < net.size(); ++m) {
    if (m == n || dest[m] == n) continue;
    const Point& rx = pos[dest[m]];
    if (Distance(pos[n], rx) > radius) continue;
    if (!InBeam(pos[n], net.tx_heading()[n], theta_t, rx)) continue;
    out.push_back(m);
  }
  return out;
}

std::vector<PlayerId> FarSet(const NetworkRealization& net, PlayerId n,
                             double q, double load) {
  const double radius = FarRadius(net, q, load);
  const auto& pos = net.positions();
  const PlayerId rx = net.dest()[n];
  const double theta_r = net.radio().theta_r;
  std::vector<PlayerId> out;
  for (PlayerId m = 0; m < net.size(); ++m) {
    const bool close = Distance(pos[m], pos[rx]) <= radius &&
                       InBeam(pos[rx], net.rx_heading()[rx], theta_r, pos[m]);
    if (!close) out.push_back(m);
  }
  return out;
}

Lemma2Bounds ComputeLemma2Bounds(int n_players, double alpha, double theta_t,
                                 double q, double load) {
  if (n_players < 2 || !(q > 1.0) || !(q * load > 1.0)) {
    throw Error(ErrorKind::kDomain,
                "bounds need N >= 2, q > 1 and q * l > 1");
  }
  const double n = n_players;
  Lemma2Bounds b;
  b.near_bound = theta_t / kPi *
                 std::pow(n * n * std::pow(std::log(n), alpha),
                          1.0 / (alpha + 2.0));
  b.far_bound = (1.0 - 0.5 * (q - 1.0) / (q * load - 1.0)) * n;
  return b;
}

Lemma2Report CheckLemma2(std::span<const NetworkRealization> realizations,
                         double q) {
  Lemma2Report report;
  int ok = 0;
  for (const NetworkRealization& net : realizations) {
    const double load = Load(net);
    Lemma2Row row;
    row.n_players = net.size();
    row.bounds = ComputeLemma2Bounds(net.size(), net.radio().alpha,
                                     net.radio().theta_t, q, load);
    row.min_far = net.size();
    for (PlayerId n = 0; n < net.size(); ++n) {
      row.max_near = std::max(row.max_near,
                              static_cast<int>(NearSet(net, n).size()));
      row.min_far = std::min(row.min_far,
                             static_cast<int>(FarSet(net, n, q, load).size()));
    }
    row.satisfied = row.max_near <= row.bounds.near_bound &&
                    row.min_far >= row.bounds.far_bound;
    ok += row.satisfied;
    report.rows.push_back(row);
  }
  if (!report.rows.empty()) {
    report.fraction = static_cast<double>(ok) / report.rows.size();
  }
  return report;
}

std::vector<ChannelId> GoodChannelSet(const NetworkRealization& net,
                                      const StrategyProfile& profile,
                                      PlayerId n, double q, double load) {
  const std::vector<PlayerId> far = FarSet(net, n, q, load);
  std::vector<char> is_far(net.size(), 0);
  for (PlayerId m : far) is_far[m] = 1;

  const int cap = static_cast<int>(std::ceil(q * load));
  std::vector<int> count(profile.num_channels(), 0);
  std::vector<char> spoiled(profile.num_channels(), 0);
  for (PlayerId m = 0; m < net.size(); ++m) {
    if (m == n) continue;
    ++count[profile[m]];
    if (!is_far[m]) spoiled[profile[m]] = 1;
  }
  std::vector<ChannelId> out;
  for (ChannelId k = 0; k < profile.num_channels(); ++k) {
    if (!spoiled[k] && count[k] < cap) out.push_back(k);
  }
  return out;
}

Lemma4Report CheckLemma4(const NetworkRealization& net, double eps,
                         std::span<const StrategyProfile> sampled_profiles,
                         double q) {
  if (!(eps > 0.0)) throw Error(ErrorKind::kDomain, "eps must be positive");
  const double load = Load(net);
  Lemma4Report report;
  report.bound = 1.0 / (2.0 * load) * (1.0 - 1.0 / q) * net.size();
  report.min_best_set = net.num_channels();
  for (const StrategyProfile& profile : sampled_profiles) {
    GameState state(net, profile);
    for (PlayerId n = 0; n < net.size(); ++n) {
      const std::vector<double> u = state.UtilitiesAcross(n);
      const std::vector<ChannelId> best = EpsBestFromUtilities(u, eps);
      report.min_best_set =
          std::min(report.min_best_set, static_cast<int>(best.size()));
      const double top = *std::max_element(u.begin(), u.end());
      report.max_gap = std::max(report.max_gap,
                                std::fabs(top - net.InterferenceFreeRate(n)));
    }
  }
  report.satisfied = report.min_best_set >= report.bound;
  return report;
}

Lemma5Report CheckLemma5(const NetworkRealization& net, const Trace& trace) {
  Lemma5Report report;
  GameState state(net, trace.initial_profile);
  for (const StepRecord& rec : trace.steps) {
    if (rec.deviated()) {
      const Drift drift = state.ExpectedDrift(rec.actor, trace.eps);
      DriftCheck check{rec.t, rec.actor, drift.e1_plus_e2, drift.e_total,
                       drift.e1_plus_e2 > 0.0};
      report.violations += !check.positive;
      report.checks.push_back(check);
      state.Move(rec.actor, rec.new_channel);
    }
  }
  return report;
}

Lemma3Gap ComputeLemma3Gap(double a, double b, double delta_i) {
  if (!(a > 0.0) || !(b > 0.0) || !(delta_i > 0.0)) {
    throw Error(ErrorKind::kDomain, "a, b and delta_i must be positive");
  }
  Lemma3Gap gap;
  // log2((1 + a/b) / (1 + a/(b + dI))) without the cancellation of a
  // difference of logs.
  gap.lhs = std::log1p(a / b * (delta_i / (a + b + delta_i))) / std::log(2.0);
  gap.rhs = a / (a + b) * delta_i / (b * std::log(2.0));
  return gap;
}

double ConvergenceTimeBound(double cbar, double eps, int n_players,
                            PolicyKind policy) {
  if (!(eps > 0.0)) throw Error(ErrorKind::kDomain, "eps must be positive");
  const double n = n_players;
  const double per_deviation = 4.0 * cbar * n / eps;
  return policy == PolicyKind::kDeviators ? per_deviation : per_deviation * n;
}

double BaselineTdma(double load, double snr_linear, bool per_slot_power) {
  if (!(load > 0.0)) throw Error(ErrorKind::kDomain, "load must be positive");
  if (!(snr_linear >= 0.0)) {
    throw Error(ErrorKind::kDomain, "snr must be non-negative");
  }
  const double snr = per_slot_power ? snr_linear : load * snr_linear;
  return std::log2(1.0 + snr) / load;
}

double BaselineRandom(const NetworkRealization& net, Engine& rng,
                      int samples) {
  if (samples <= 0) throw Error(ErrorKind::kDomain, "samples must be positive");
  double total = 0.0;
  for (int s = 0; s < samples; ++s) {
    GameState state(net, StrategyProfile::Uniform(net.size(),
                                                  net.num_channels(), rng));
    total += state.SumRate() / net.size();
  }
  return total / samples;
}

double MeanInterferenceFreeRate(const NetworkRealization& net) {
  double total = 0.0;
  for (PlayerId n = 0; n < net.size(); ++n) {
    total += net.InterferenceFreeRate(n);
  }
  return total / net.size();
}

double Gamma(const NetworkRealization& net) {
  double g = 0.0;
  for (PlayerId n = 0; n < net.size(); ++n) {
    const double snr = net.signal(n) / net.noise();
    g = std::max(g, snr / (snr + 1.0));
  }
  return g;
}

bool OracleResult::Contains(const StrategyProfile& profile) const {
  return std::find(equilibria.begin(), equilibria.end(), profile) !=
         equilibria.end();
}

OracleResult OracleEnumerate(const NetworkRealization& net, double eps) {
  const int n = net.size();
  const int k = net.num_channels();
  if (std::pow(static_cast<double>(k), n) > kOracleProfileLimit) {
    throw Error(ErrorKind::kInstanceTooLarge,
                "oracle refuses K^N = " + std::to_string(k) + "^" +
                    std::to_string(n) + " profiles");
  }
  OracleResult result;
  std::vector<ChannelId> digits(n, 0);
  for (;;) {
    const StrategyProfile profile(k, digits);
    ++result.profiles_scanned;
    if (IsEpsPne(net, profile, eps)) {
      result.equilibria.push_back(profile);
      result.sum_rates.push_back(SumRate(net, profile));
    }
    int i = 0;
    while (i < n && ++digits[i] == k) digits[i++] = 0;
    if (i == n) break;
  }
  return result;
}

DiagnosticsReport BuildDiagnostics(
    const NetworkRealization& net, double eps, PolicyKind policy,
    std::span<const StrategyProfile> sampled_profiles, const Trace* trace,
    double q) {
  RequireGeometry(net, "diagnostics");
  DiagnosticsReport r;
  r.n_players = net.size();
  r.num_channels = net.num_channels();
  r.eps = eps;
  r.q = q;
  r.load = Load(net);
  const RadioParams& radio = net.radio();
  r.rho = TheoryParams::Rho(net.size(), radio.alpha);

  const Lemma2Bounds bounds = ComputeLemma2Bounds(
      net.size(), radio.alpha, radio.theta_t, q, r.load);
  r.near_bound = bounds.near_bound;
  r.far_bound = bounds.far_bound;
  for (PlayerId n = 0; n < net.size(); ++n) {
    r.near_counts.push_back(static_cast<int>(NearSet(net, n).size()));
    r.far_counts.push_back(static_cast<int>(FarSet(net, n, q, r.load).size()));
  }

  const Lemma4Report l4 = CheckLemma4(net, eps, sampled_profiles, q);
  r.eps_set_min = l4.min_best_set;
  r.eps_set_bound = l4.bound;
  r.utility_gap_max = l4.max_gap;

  if (trace != nullptr) {
    const Lemma5Report l5 = CheckLemma5(net, *trace);
    r.drift_checks = l5.checks;
    r.drift_violations = l5.violations;
    r.t_con = trace->t_con;
  }

  r.cbar = MeanInterferenceFreeRate(net);
  r.gamma = Gamma(net);
  r.t_hat = ConvergenceTimeBound(r.cbar, eps, net.size(), policy);

  const double nn = net.size();
  const double log_ratio = std::log(nn) / nn;
  double c_max = 0.0;
  for (PlayerId n = 0; n < net.size(); ++n) {
    c_max = std::max(c_max, net.InterferenceFreeRate(n));
  }
  const double p_max = *std::max_element(net.power().begin(),
                                         net.power().end());
  // Without a configured P0, use the smallest P0 whose cap admits every
  // transmit power actually in use.
  const double p0 =
      radio.p0 ? *radio.p0 : p_max / std::pow(log_ratio, radio.alpha / 2.0);
  const std::vector<int> fanin = net.FanIn();
  const double s = *std::max_element(fanin.begin(), fanin.end());
  const double lambda = net.region().lambda();
  const double path_term = p0 / net.noise() * r.gamma *
                           std::pow(kPi * lambda, radio.alpha / 2.0) *
                           radio.BigG() / std::log(2.0);
  const double crowd_term =
      c_max * (radio.theta_t / kPi + s / std::pow(nn, 2.0 / (radio.alpha + 2.0)));
  r.drift_lower_bound =
      eps / 2.0 - 2.0 * r.load / (1.0 - 1.0 / q) *
                      std::pow(log_ratio, radio.alpha / (radio.alpha + 2.0)) *
                      (path_term + crowd_term);
  return r;
}

}  // namespace ibr
