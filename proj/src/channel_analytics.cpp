// Copyright 2026 The diqsdc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "diqsdc/channel_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace diqsdc::analytics {

namespace {

const double kChshMax = 2.0 * std::sqrt(2.0);
constexpr double kInfinity = std::numeric_limits<double>::infinity();

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

}  // namespace

double SystemParams::eta_local() const {
  return eta_coupling * eta_memory * eta_detector;
}

double SystemParams::eta_total() const {
  return eta_transmission(distance_km, alpha_db_per_km);
}

void SystemParams::validate() const {
  require(fidelity >= 0.25 && fidelity <= 1.0, "fidelity must lie in [0.25, 1]");
  require(eta_coupling >= 0.0 && eta_coupling <= 1.0,
          "eta_coupling must lie in [0, 1]");
  require(eta_memory >= 0.0 && eta_memory <= 1.0,
          "eta_memory must lie in [0, 1]");
  require(eta_detector >= 0.0 && eta_detector <= 1.0,
          "eta_detector must lie in [0, 1]");
  require(vbs_transmittance >= 0.0 && vbs_transmittance <= 1.0,
          "vbs_transmittance must lie in [0, 1]");
  require(alpha_db_per_km > 0.0, "alpha must be positive");
  require(distance_km >= 0.0, "distance must be non-negative");
  require(rep_rate_hz > 0.0, "repetition rate must be positive");
  require(spdc_pair_probability >= 0.0 && spdc_pair_probability <= 1.0,
          "spdc pair probability must lie in [0, 1]");
  require(pulses >= 1, "pulse count must be at least 1");
}

double binary_entropy(double x) {
  require(x >= 0.0 && x <= 1.0, "binary_entropy: argument must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double eta_transmission(double distance_km, double alpha_db_per_km) {
  require(distance_km >= 0.0, "eta_transmission: negative distance");
  return std::pow(10.0, -alpha_db_per_km * distance_km / 10.0);
}

double heralding_success_probability(double vbs_transmittance, double eta_t) {
  const double t = vbs_transmittance;
  return eta_t * t * t * (1.0 - t) * (1.0 - t);
}

RoundMetrics round1_metrics(double eta_local, double fidelity) {
  const double e2 = eta_local * eta_local;
  return {kChshMax * e2 * fidelity, 0.5 - e2 * (fidelity - 0.5)};
}

RoundMetrics round2_metrics(double eta_t, double eta_local, double fidelity) {
  const double e2 = eta_t * eta_local * eta_local;
  const double f2 = fidelity * fidelity;
  return {kChshMax * e2 * f2, 0.5 - e2 * (f2 - 0.5)};
}

double holevo_bound(double chsh_s) {
  if (chsh_s <= 2.0) {
    throw std::domain_error(
        "holevo_bound: CHSH value is in the classical (abort) regime");
  }
  if (chsh_s > kChshMax + 1e-9) {
    throw std::invalid_argument("holevo_bound: CHSH value beyond 2*sqrt(2)");
  }
  const double half = chsh_s / 2.0;
  const double inner = std::max(half * half - 1.0, 0.0);
  const double arg = std::min((1.0 + std::sqrt(inner)) / 2.0, 1.0);
  return binary_entropy(arg);
}

CapacityReport secrecy_capacity(const SystemParams& params) {
  params.validate();
  const double eta_l = params.eta_local();
  const double eta_t = params.eta_total();
  const double f = params.fidelity;

  const RoundMetrics r1 = round1_metrics(eta_l, f);
  const RoundMetrics r2 = round2_metrics(eta_t, eta_l, f);

  CapacityReport rep;
  rep.s1 = r1.chsh_s;
  rep.s2 = r2.chsh_s;
  rep.qt = r2.q_sum;
  rep.mutual_info_ab = 1.0 - binary_entropy(rep.qt);
  rep.aborted = rep.s1 <= 2.0 || rep.s2 <= 2.0;
  if (rep.s1 <= 2.0) {
    rep.chi_s1 = 1.0;
    rep.secrecy_capacity = 0.0;
  } else {
    rep.chi_s1 = holevo_bound(rep.s1);
    rep.secrecy_capacity =
        std::max(0.0, rep.mutual_info_ab - rep.chi_s1);
  }
  rep.chi_s2 = rep.s2 > 2.0 ? holevo_bound(rep.s2) : 1.0;

  rep.loss_rate = 1.0 - eta_l * eta_l * eta_t;
  rep.error_rate = 1.0 - f * f;
  rep.loss_rate_original = 1.0 - eta_l * eta_l * eta_t * eta_t;
  rep.secrecy_capacity_original = secrecy_capacity_original(params);

  const double p1 =
      heralding_success_probability(params.vbs_transmittance, eta_t);
  rep.qubit_rate = 0.25 * params.rep_rate_hz * p1 * rep.secrecy_capacity;
  rep.qubit_rate_original = 0.25 * params.rep_rate_hz *
                            params.spdc_pair_probability *
                            rep.secrecy_capacity_original;
  return rep;
}

double secrecy_capacity_original(const SystemParams& params) {
  params.validate();
  const double eta_l2 = params.eta_local() * params.eta_local();
  const double eta_t = params.eta_total();
  const double f = params.fidelity;

  const double s1 = kChshMax * eta_t * eta_l2 * f;
  if (s1 <= 2.0) return 0.0;
  const double qt =
      0.5 - eta_t * eta_t * eta_l2 * (f * f - 0.5);
  return std::max(0.0, 1.0 - binary_entropy(qt) - holevo_bound(s1));
}

std::pair<double, double> practical_efficiency(const SystemParams& params) {
  const CapacityReport rep = secrecy_capacity(params);
  return {rep.qubit_rate, rep.qubit_rate_original};
}

double max_distance(const SystemParams& params, ProtocolVariant variant,
                    double tol_km) {
  require(tol_km > 0.0, "max_distance: tolerance must be positive");
  const auto capacity_at = [&](double l) {
    SystemParams p = params;
    p.distance_km = l;
    return variant == ProtocolVariant::current
               ? secrecy_capacity(p).secrecy_capacity
               : secrecy_capacity_original(p);
  };
  if (capacity_at(0.0) <= 0.0) {
    throw std::domain_error("max_distance: no positive capacity at L = 0");
  }
  // With perfect local efficiency and fidelity the leakage bound vanishes
  // and the capacity stays positive at every finite distance.
  const double eta_l = params.eta_local();
  if (variant == ProtocolVariant::current &&
      eta_l * eta_l * params.fidelity >= 1.0) {
    return kInfinity;
  }

  double lo = 0.0;
  double hi = 1.0;
  while (capacity_at(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 5.0e4) return kInfinity;
  }
  while (hi - lo > tol_km) {
    const double mid = 0.5 * (lo + hi);
    (capacity_at(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> purification_round(double fidelity) {
  if (!(fidelity > 0.5 && fidelity <= 1.0)) {
    throw std::domain_error(
        "purification_round: fidelity must exceed 1/2 to purify");
  }
  const double f = fidelity;
  const double w = (1.0 - f) / 3.0;
  const double success = f * f + (2.0 / 3.0) * f * (1.0 - f) + 5.0 * w * w;
  const double next = (f * f + w * w) / success;
  return {next, success};
}

PurificationPlan purified_capacity(const SystemParams& params, int n_rounds,
                                   const PurificationStep& step) {
  params.validate();
  require(n_rounds >= 0, "purified_capacity: negative round count");

  PurificationPlan plan;
  plan.rounds = n_rounds;
  double f = params.fidelity;
  double success_product = 1.0;
  for (int i = 0; i < n_rounds; ++i) {
    const auto [next, success] = step ? step(f) : purification_round(f);
    f = next;
    success_product *= success;
    plan.per_round.emplace_back(f, success);
  }
  plan.final_fidelity = f;

  const double eta_l = params.eta_local();
  const double eta_t = params.eta_total();
  plan.qt_prime = 0.5 - eta_t * eta_l * eta_l * (f - 0.5);
  const double s1 = round1_metrics(eta_l, f).chsh_s;
  const double info = 1.0 - binary_entropy(plan.qt_prime);
  plan.cs_prime =
      s1 > 2.0 ? std::max(0.0, info - holevo_bound(s1)) : 0.0;

  const double p1 =
      heralding_success_probability(params.vbs_transmittance, eta_t);
  plan.esm = 0.25 * params.rep_rate_hz * p1 *
             (success_product / std::pow(2.0, n_rounds)) * info;
  return plan;
}

std::vector<CurveRow> sweep_curves(const SystemParams& params, double l_min,
                                   double l_max, double step, Exec exec) {
  params.validate();
  require(step > 0.0, "sweep_curves: step must be positive");
  require(l_min >= 0.0, "sweep_curves: negative start distance");
  require(l_min <= l_max, "sweep_curves: empty distance range");

  const auto n_rows =
      static_cast<std::size_t>(std::floor((l_max - l_min) / step + 1e-9)) + 1;
  std::vector<CurveRow> rows(n_rows);
  for_each_index(n_rows, exec, [&](std::size_t i) {
    SystemParams p = params;
    p.distance_km = l_min + static_cast<double>(i) * step;
    const CapacityReport rep = secrecy_capacity(p);
    CurveRow& row = rows[i];
    row.distance_km = p.distance_km;
    row.cs = rep.secrecy_capacity;
    row.cs0 = rep.secrecy_capacity_original;
    row.es = rep.qubit_rate;
    row.es0 = rep.qubit_rate_original;
    row.log10_es = row.es > 0.0 ? std::log10(row.es) : -kInfinity;
    row.log10_es0 = row.es0 > 0.0 ? std::log10(row.es0) : -kInfinity;
    row.s1 = rep.s1;
    row.s2 = rep.s2;
    row.qt = rep.qt;
  });
  return rows;
}

}  // namespace diqsdc::analytics
