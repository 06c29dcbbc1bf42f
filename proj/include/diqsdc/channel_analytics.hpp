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

#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "diqsdc/parallel.hpp"

// Closed-form performance model of the heralded DI-QSDC protocol: CHSH
// values and error rates per transmission round, Holevo leakage bound,
// Devetak-Winter secrecy capacity, loss/error rates, throughput, maximal
// distance, and the entanglement-purification extension. Everything here is
// a pure function of the physical parameters; the exact optics oracle in
// fock_optics pins the heralding probability these formulas rely on.
namespace diqsdc::analytics {

// All physical parameters of a deployment.
struct SystemParams {
  double fidelity = 0.98;           // F of |phi+> after one distribution
  double eta_coupling = 0.98;       // photon-fiber coupling efficiency
  double eta_memory = 1.0;          // quantum-memory extraction efficiency
  double eta_detector = 1.0;        // photon-detector efficiency
  double vbs_transmittance = 0.5;   // T of the variable beam splitters
  double alpha_db_per_km = 0.2;     // fiber attenuation
  double distance_km = 1.0;         // Alice-Bob distance L
  double rep_rate_hz = 1.0e7;       // source repetition rate
  double spdc_pair_probability = 1.0e-4;  // per-pulse pair probability of the
                                          // SPDC baseline source
  std::uint64_t pulses = 1'000'000;       // pulses per protocol run

  // eta_c * eta_m * eta_d.
  double eta_local() const;
  // Full-link transmission 10^(-alpha*L/10). The measurement station sits at
  // the midpoint, so each half-link has sqrt of this.
  double eta_total() const;

  // Throws std::invalid_argument when any field is out of range.
  void validate() const;
};

// Binary entropy H(x) = -x log2 x - (1-x) log2 (1-x), with H(0) = H(1) = 0.
double binary_entropy(double x);

// Fiber transmission 10^(-alpha*L/10).
double eta_transmission(double distance_km, double alpha_db_per_km);

// Heralding success probability of one distribution attempt:
// eta_t * T^2 * (1-T)^2. Must agree with the fock_optics oracle.
double heralding_success_probability(double vbs_transmittance, double eta_t);

struct RoundMetrics {
  double chsh_s = 0.0;  // CHSH polynomial value
  double q_sum = 0.0;   // combined bit-flip + phase-flip error rate
};

// After the heralded distribution round: S1 = 2√2·ηl²·F,
// Q = 1/2 - ηl²·(F - 1/2). Loss to the midpoint is filtered by heralding
// and does not appear.
RoundMetrics round1_metrics(double eta_local, double fidelity);

// After the encoded-photon transmission round: S2 = 2√2·ηt·ηl²·F²,
// Q = 1/2 - ηt·ηl²·(F² - 1/2).
RoundMetrics round2_metrics(double eta_t, double eta_local, double fidelity);

// Holevo bound chi(S) = H((1 + sqrt((S/2)² - 1)) / 2) on the eavesdropper's
// information given an observed CHSH value. Domain: 2 < S <= 2√2. Throws
// std::domain_error for S <= 2 (abort regime) and std::invalid_argument for
// S beyond 2√2 by more than numeric noise.
double holevo_bound(double chsh_s);

struct CapacityReport {
  double s1 = 0.0;
  double s2 = 0.0;
  double qt = 0.0;       // total error rate after both rounds
  double chi_s1 = 0.0;   // leakage bound used by the capacity
  double chi_s2 = 0.0;   // reported for completeness, no downstream role
  double mutual_info_ab = 0.0;           // 1 - H(qt)
  double secrecy_capacity = 0.0;         // max(0, I_AB - chi_s1)
  double secrecy_capacity_original = 0.0;
  double loss_rate = 0.0;                // 1 - ηl²·ηt
  double error_rate = 0.0;               // 1 - F²
  double loss_rate_original = 0.0;       // 1 - ηl²·ηt²
  double qubit_rate = 0.0;               // secure qubits/s, heralded scheme
  double qubit_rate_original = 0.0;      // secure qubits/s, SPDC baseline
  bool aborted = false;                  // any CHSH value <= 2
};

// Full closed-form evaluation at the given parameters. When S1 <= 2 the DI
// check fails: the report is flagged aborted, chi_s1 is pinned at its
// worst-case value 1 and the capacity at 0.
CapacityReport secrecy_capacity(const SystemParams& params);

// Baseline variant with an SPDC source and no heralding filter: the
// distribution round also sees the channel (S1° = 2√2·ηt·ηl²·F) and both
// transmissions load the loss (Qt° uses ηt², r_loss° = 1 - ηl²·ηt²).
double secrecy_capacity_original(const SystemParams& params);

// Secure qubits per second for both variants:
// Es = R/4 · P1 · Cs and Es° = R/4 · p · Cs°. Half the pairs per round go
// to security checking, hence the 1/4.
std::pair<double, double> practical_efficiency(const SystemParams& params);

enum class ProtocolVariant { current, original };

// Distance at which the chosen variant's capacity reaches zero, by bisection
// to tol_km. Returns +infinity when the capacity stays positive at any
// finite distance (perfect local efficiency and fidelity). Throws
// std::domain_error when the capacity is already zero at L = 0.
double max_distance(const SystemParams& params, ProtocolVariant variant,
                    double tol_km = 1e-3);

// One round of the two-pair recurrence for white-noise (Werner) states:
// F' = (F² + w²) / D and success probability D = F² + 2F(1-F)/3 + 5w²,
// w = (1-F)/3. Requires F > 1/2; throws std::domain_error otherwise.
std::pair<double, double> purification_round(double fidelity);

// A purification strategy maps a fidelity to (next fidelity, success
// probability). The Werner recurrence above is the default; channels with
// structured noise can swap in their own map.
using PurificationStep = std::function<std::pair<double, double>(double)>;

struct PurificationPlan {
  int rounds = 0;
  // (fidelity after round i, success probability of round i), i = 1..N.
  std::vector<std::pair<double, double>> per_round;
  double final_fidelity = 0.0;
  double qt_prime = 0.0;   // 1/2 - ηt·ηl²·(F_N - 1/2)
  double cs_prime = 0.0;   // max(0, 1 - H(qt') - chi(S1(F_N)))
  double esm = 0.0;        // R/4 · P1 · (Π P_EP / 2^N) · (1 - H(qt'))
};

// Applies the purification step n_rounds times before the encoding round.
// The second transmission then carries a single decoherence pass, so qt'
// uses F_N instead of F².
PurificationPlan purified_capacity(const SystemParams& params, int n_rounds,
                                   const PurificationStep& step = {});

struct CurveRow {
  double distance_km = 0.0;
  double cs = 0.0;
  double cs0 = 0.0;
  double es = 0.0;
  double es0 = 0.0;
  double log10_es = 0.0;   // -inf when the rate is zero
  double log10_es0 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  double qt = 0.0;
};

// Capacity/efficiency curves over a distance grid; rows are independent and
// evaluated in parallel under Exec::parallel.
std::vector<CurveRow> sweep_curves(const SystemParams& params, double l_min,
                                   double l_max, double step,
                                   Exec exec = Exec::parallel);

}  // namespace diqsdc::analytics
