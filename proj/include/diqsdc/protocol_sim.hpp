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

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "diqsdc/channel_analytics.hpp"
#include "diqsdc/parallel.hpp"
#include "diqsdc/rng.hpp"

// Monte Carlo execution of the heralded DI-QSDC protocol: sampled
// entanglement distribution, finite-sample CHSH security checking in both
// transmission rounds, Pauli encoding, sequence shuffling, intercept-resend
// eavesdropper models, Bell-state-measurement decoding and a leakage audit.
// Every estimator converges to the corresponding channel_analytics closed
// form. Runs are deterministic in (config, seed), independent of the
// execution policy: randomness is indexed per pair through counter-based
// substreams.
namespace diqsdc::protocol {

enum class EveStrategy {
  none,
  intercept_fixed_z,   // measure/resend in the Z basis
  intercept_random_zx  // measure/resend in Z or X, chosen per pair
};

struct EveModel {
  EveStrategy strategy = EveStrategy::none;
  double round1_fraction = 0.0;  // fraction of distribution-round photons hit
  double round2_fraction = 0.0;  // fraction of encoded-round positions hit
};

struct ProtocolConfig {
  analytics::SystemParams params;
  std::uint64_t seed = 1;
  double check_fraction = 0.5;  // per round; default consumes half the pairs
  EveModel eve;
  // Explicit message bits encoded onto the message pairs in order. When
  // empty (or shorter than the message-pair count) the remainder is filled
  // with random bits. Longer than the message-pair count is an error.
  std::vector<std::uint8_t> message_bits;
  // Diagnostic mode: keep executing after a failed CHSH check so post-abort
  // statistics (decode errors, leakage) can be studied. Abort flags are
  // still reported.
  bool continue_on_abort = false;

  void validate() const;  // throws std::invalid_argument
};

// Measurement bases: Alice draws from four directions in the Z-X plane,
// Bob from two. Angles are against sigma_z.
inline constexpr std::array<double, 4> kAliceBasisAngles = {
    0.0, 0.78539816339744830961, -0.78539816339744830961,
    1.57079632679489661923};
inline constexpr std::array<double, 2> kBobBasisAngles = {
    0.0, 1.57079632679489661923};

using Tally = std::array<
    std::array<std::array<std::array<std::uint64_t, 2>, 2>, 2>, 4>;

struct SecurityCheckStats {
  // tally[basis_a][basis_b][a == +1][b == +1]
  Tally tally = {};
  std::uint64_t n_checks = 0;
  std::uint64_t n_discarded = 0;   // (A0,B2) and (A3,B1) rounds
  std::uint64_t error_events = 0;  // combined corruption-or-loss error count

  double s_hat = 0.0, s_se = 0.0;
  double qb_hat = 0.0, qb_se = 0.0;
  double qp_hat = 0.0, qp_se = 0.0;
  double q_sum_hat = 0.0, q_sum_se = 0.0;
  bool sufficient = false;  // every estimator cell had at least one sample

  bool operator==(const SecurityCheckStats&) const = default;
};

struct LeakAudit {
  std::uint64_t eve_round1_hits = 0;  // message pairs touched in round 1
  std::uint64_t eve_round2_hits = 0;  // message pairs touched in round 2
  std::uint64_t matched_pairs = 0;    // touched in both rounds
  double matched_fraction = 0.0;
  double chi_bound = 0.0;  // Holevo bound chi(S1_hat); 1 when S1_hat <= 2

  bool operator==(const LeakAudit&) const = default;
};

struct RunReport {
  std::uint64_t pulses = 0;
  std::uint64_t heralded = 0;  // N1
  std::uint64_t check1_count = 0;
  std::uint64_t check2_count = 0;
  std::uint64_t message_count = 0;

  SecurityCheckStats round1;
  SecurityCheckStats round2;
  bool aborted_round1 = false;
  bool aborted_round2 = false;

  // Survivor bits in original message order; decoded + lost = message count.
  std::vector<std::uint8_t> decoded_bits;
  std::uint64_t bit_errors = 0;
  std::uint64_t lost_messages = 0;

  LeakAudit leak;

  bool operator==(const RunReport&) const = default;
};

// Full protocol run. Steps: heralded distribution over `pulses` attempts;
// first CHSH check on a check_fraction subset (abort when S1_hat <= 2);
// encoding and shuffling; transmission with loss, decoherence and the
// eavesdropper model; second CHSH check (abort when S2_hat <= 2); BSM
// decoding; leakage audit.
RunReport run_protocol(const ProtocolConfig& config,
                       Exec exec = Exec::parallel);

// --- building blocks, exposed for direct testing ---

// One Bernoulli heralding attempt at the configured success probability.
bool sample_heralding(const analytics::SystemParams& params,
                      rng::Stream& stream);

struct CheckContext {
  bool present_a = true;   // Alice-side photon detected
  bool present_b = true;   // Bob-side photon detected
  bool corrupted = false;  // decoherence event: outcomes decorrelate
  bool eve_touched = false;
  EveStrategy eve_strategy = EveStrategy::none;
};

// Draws one (+1/-1, +1/-1) outcome pair. Missing photons produce fair
// coins; corrupted pairs decorrelate; intercepted pairs follow the
// product-state correlator of the eavesdropper's basis; otherwise the
// |phi+> correlator from the optics oracle applies. Marginals are uniform
// in every case.
std::pair<int, int> sample_check_outcome(const CheckContext& ctx,
                                         double angle_a, double angle_b,
                                         rng::Stream& stream);

// CHSH estimator over the (A1,A2)x(B1,B2) cells with per-cell binomial
// standard errors; fills s_hat/s_se. Throws std::runtime_error when a cell
// is empty.
void estimate_chsh(SecurityCheckStats& stats);

// Bit-flip (A0,B1) and phase-flip (A3,B2) mismatch fractions plus the
// combined per-pair error-event rate; fills the q_* fields. Throws
// std::runtime_error when a needed cell is empty.
void estimate_error_rates(SecurityCheckStats& stats);

// Uniform random permutation of {0..n-1} (Fisher-Yates).
std::vector<std::uint32_t> random_permutation(std::size_t n,
                                              rng::Stream&& stream);

struct TransmitOutcome {
  bool survived = false;   // photon made it through the fiber
  bool corrupted = false;  // second decoherence pass hit the pair
};

// Channel pass of one encoded photon.
TransmitOutcome sample_transmission(const analytics::SystemParams& params,
                                    rng::Stream& stream);

struct DecodeInputs {
  bool detected = false;     // both photons arrived at the BSM
  bool eve_touched = false;  // either round; phase information destroyed
  bool corrupted = false;    // either round's decoherence
  std::uint8_t encoded_bit = 0;
};

struct DecodeResult {
  bool lost = false;
  std::uint8_t bit = 0;
  bool error = false;
};

// Bell-state-measurement readout: a lost pair decodes to nothing, an
// intercepted pair to a coin, a corrupted pair to the flipped bit.
DecodeResult bsm_decode(const DecodeInputs& in, rng::Stream& stream);

}  // namespace diqsdc::protocol
