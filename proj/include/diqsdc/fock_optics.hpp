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

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <utility>
#include <vector>

// Exact small-Hilbert-space simulation of the heralded entanglement
// distribution circuit: two parties each fire an H and a V photon through a
// variable beam splitter, send the transmitted arm through lossy fiber to a
// midpoint Bell-state measurement, and keep the reflected arm in a quantum
// memory that heralds photon presence. This module is the brute-force oracle
// the closed-form channel model is checked against.
namespace diqsdc::optics {

using Complex = std::complex<double>;

// Fixed mode table for the circuit. Each (path, polarization) slot is one
// mode; an occupation configuration packs the per-mode photon counts (0..3)
// into two bits per mode of a 64-bit key.
enum Mode : int {
  // Source inputs: one H and one V photon per party.
  kSrcAH, kSrcAV, kSrcBH, kSrcBV,
  // Variable beam splitter outputs. "1" arms are transmitted toward the
  // midpoint station, "2" arms are reflected into the local memory.
  kA1H, kA1V, kA2H, kA2V,
  kB1H, kB1V, kB2H, kB2V,
  // Bob's stored mode after the half-wave plate (H and V exchanged).
  kB3H, kB3V,
  // Detector slots after the 50:50 beam splitter and the polarizing
  // splitters: D1 = (port c, H), D2 = (c, V), D3 = (d, H), D4 = (d, V).
  kD1, kD2, kD3, kD4,
  // Environment sinks for fiber loss; never measured.
  kSinkAH, kSinkAV, kSinkBH, kSinkBV,
  kModeCount,
};
static_assert(kModeCount <= 32, "occupation keys pack 2 bits per mode");

const char* mode_name(int mode);

using OccKey = std::uint64_t;

constexpr int occupancy(OccKey key, int mode) {
  return static_cast<int>((key >> (2 * mode)) & 0x3u);
}

constexpr OccKey with_occupancy(OccKey key, int mode, int count) {
  return (key & ~(OccKey{0x3} << (2 * mode))) |
         (static_cast<OccKey>(count) << (2 * mode));
}

int total_photons(OccKey key);

// One input port of a linear element: destination mode and transition
// amplitude.
struct Port {
  int mode;
  Complex coeff;
};

// A pure photonic state: complex amplitudes over occupation configurations
// in the normalized number basis. Lossless elements preserve the squared
// norm; loss elements route amplitude onto sink modes, so the state as a
// whole stays normalized and the no-loss branch norm reads off the survival
// probability.
class FockState {
 public:
  FockState() = default;

  static FockState basis(OccKey key, Complex amp = 1.0);

  void add(OccKey key, Complex amp);
  double norm2() const;
  FockState normalized() const;
  bool empty() const { return amps_.empty(); }
  std::size_t size() const { return amps_.size(); }
  Complex amplitude(OccKey key) const;
  const std::map<OccKey, Complex>& amplitudes() const { return amps_; }

  // Exact bosonic substitution a†(src) -> Σ_j coeff_j a†(dst_j), including
  // stimulated √(n+1) factors when a destination is already occupied.
  FockState apply_element(int src_mode, std::span<const Port> outputs) const;
  FockState apply_element(int src_mode,
                          std::initializer_list<Port> outputs) const;

  // <other|this>.
  Complex overlap(const FockState& other) const;

  // Drops terms with negligible squared amplitude (default 1e-24).
  FockState pruned(double min_norm2 = 1e-24) const;

 private:
  std::map<OccKey, Complex> amps_;
};

enum class BellLabel { phi_plus, phi_minus, psi_plus, psi_minus, none };
const char* to_string(BellLabel label);

struct HeraldPattern {
  std::uint8_t clicks = 0;  // bit i set => detector D(i+1) saw >= 1 photon
  bool memory_alice = false;
  bool memory_bob = false;

  bool click(int detector_1_to_4) const {
    return (clicks >> (detector_1_to_4 - 1)) & 1;
  }
};

struct HeraldedOutcome {
  HeraldPattern pattern;
  double probability = 0.0;
  // Conditional state after the detector modes are consumed, normalized.
  FockState post_state;
  BellLabel bell_label = BellLabel::none;
};

enum class Side { alice, bob };

// Four-photon product state |H V>_Alice |H V>_Bob on the source modes.
FockState prepare_sources();

// Variable beam splitter: every photon on the side's source modes goes to
// sqrt(T) * transmitted + sqrt(1 - T) * reflected. Throws
// std::invalid_argument for T outside [0, 1].
FockState apply_vbs(const FockState& state, Side side, double transmittance);

// Loss on the given modes: each photon survives in place with amplitude
// sqrt(eta) and couples to the mode's environment sink with sqrt(1 - eta).
// Throws std::invalid_argument for eta outside [0, 1] or for a mode without
// a sink (only the transmitted arms are lossy in this circuit).
FockState apply_loss(const FockState& state, std::span<const int> modes,
                     double eta);
FockState apply_loss(const FockState& state, std::initializer_list<int> modes,
                     double eta);

// Half-wave plate on Bob's reflected arm: b2 H/V -> b3 V/H.
FockState apply_hwp_bob(const FockState& state);

// 50:50 beam splitter on the transmitted arms followed by polarization
// routing to D1..D4, then exhaustive measurement enumeration. Returns every
// (detector subset, memory clicks) outcome with its probability and the
// conditional post-state; outcome probabilities sum to the input norm².
// Detector pairs {D1,D2} / {D3,D4} are labelled psi+, {D2,D3} / {D1,D4}
// psi-, everything else none.
std::vector<HeraldedOutcome> bsm_circuit(const FockState& state);

struct DistributionResult {
  // Probability of the psi+ detector signature with both memory clicks.
  // This is the herald the rate model counts, and it equals
  // eta_t' ^2 * T^2 * (1-T)^2 exactly.
  double success_probability = 0.0;
  // The psi- signature heralds with the same probability and is corrected
  // to |phi+> by a phase flip, so the raw usable-pair rate of the circuit
  // is combined_probability = twice the counted one.
  double psi_minus_probability = 0.0;
  double combined_probability = 0.0;
  // Post-states keyed by the heralding Bell label, after the half-wave-plate
  // relabel and the psi- phase-flip correction; each should equal |phi+> on
  // the stored modes.
  std::map<BellLabel, FockState> post_states;
  // Full outcome enumeration, accepted or not.
  std::vector<HeraldedOutcome> outcomes;
};

// Composes the whole circuit: sources -> VBS both sides -> fiber loss on the
// transmitted arms -> HWP -> BSM, then accepts an outcome only when a psi
// detector signature coincides with both memory clicks.
DistributionResult distribute_entanglement(double transmittance,
                                           double eta_t_prime);

// Squared overlap with |phi+> = (|H H> + |V V>)/sqrt(2) on the stored modes
// (Alice a2, Bob b3).
double fidelity_phi_plus(const FockState& state);

// <sigma(a) ⊗ sigma(b)> for a Bell state, with sigma(t) = cos(t)·sigma_z +
// sin(t)·sigma_x, evaluated by explicit density-matrix contraction. Throws
// std::invalid_argument for BellLabel::none.
double correlation_oracle(BellLabel label, double angle_a, double angle_b);

}  // namespace diqsdc::optics
