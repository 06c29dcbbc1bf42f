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

#include "diqsdc/fock_optics.hpp"

#include <cmath>
#include <stdexcept>

namespace diqsdc::optics {

namespace {

constexpr double kFact[5] = {1.0, 1.0, 2.0, 6.0, 24.0};
const double kInvSqrt2 = std::sqrt(0.5);

int sink_for(int mode) {
  switch (mode) {
    case kA1H: return kSinkAH;
    case kA1V: return kSinkAV;
    case kB1H: return kSinkBH;
    case kB1V: return kSinkBV;
    default:
      throw std::invalid_argument("apply_loss: mode has no environment sink");
  }
}

void check_unit_interval(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

const char* mode_name(int mode) {
  static const char* kNames[kModeCount] = {
      "srcA.H", "srcA.V", "srcB.H", "srcB.V", "a1.H",    "a1.V",
      "a2.H",   "a2.V",   "b1.H",   "b1.V",   "b2.H",    "b2.V",
      "b3.H",   "b3.V",   "D1",     "D2",     "D3",      "D4",
      "sinkA.H", "sinkA.V", "sinkB.H", "sinkB.V"};
  return (mode >= 0 && mode < kModeCount) ? kNames[mode] : "?";
}

int total_photons(OccKey key) {
  int n = 0;
  while (key) {
    n += static_cast<int>(key & 0x3u);
    key >>= 2;
  }
  return n;
}

const char* to_string(BellLabel label) {
  switch (label) {
    case BellLabel::phi_plus: return "phi+";
    case BellLabel::phi_minus: return "phi-";
    case BellLabel::psi_plus: return "psi+";
    case BellLabel::psi_minus: return "psi-";
    case BellLabel::none: return "none";
  }
  return "?";
}

FockState FockState::basis(OccKey key, Complex amp) {
  FockState s;
  s.add(key, amp);
  return s;
}

void FockState::add(OccKey key, Complex amp) {
  auto [it, inserted] = amps_.try_emplace(key, amp);
  if (!inserted) it->second += amp;
}

double FockState::norm2() const {
  double n = 0.0;
  for (const auto& [key, amp] : amps_) n += std::norm(amp);
  return n;
}

FockState FockState::normalized() const {
  const double n2 = norm2();
  if (n2 <= 0.0) throw std::invalid_argument("cannot normalize a null state");
  const double inv = 1.0 / std::sqrt(n2);
  FockState out;
  for (const auto& [key, amp] : amps_) out.amps_[key] = amp * inv;
  return out;
}

Complex FockState::amplitude(OccKey key) const {
  const auto it = amps_.find(key);
  return it == amps_.end() ? Complex{0.0} : it->second;
}

FockState FockState::apply_element(int src_mode,
                                   std::span<const Port> outputs) const {
  FockState out;
  const int n_out = static_cast<int>(outputs.size());
  std::vector<int> split(outputs.size());
  for (const auto& [key, amp] : amps_) {
    const int n = occupancy(key, src_mode);
    if (n == 0) {
      out.add(key, amp);
      continue;
    }
    const OccKey base = with_occupancy(key, src_mode, 0);
    // Enumerate the multinomial expansion of (Σ_j c_j b_j†)^n: every way of
    // splitting the n photons over the output ports, with exact bosonic
    // weights for occupancies the term lands on.
    auto emit = [&](auto&& self, int port, int remaining) -> void {
      if (port == n_out - 1) {
        split[port] = remaining;
      } else {
        for (int k = 0; k <= remaining; ++k) {
          split[port] = k;
          self(self, port + 1, remaining - k);
        }
        return;
      }
      Complex term = amp * std::sqrt(kFact[n]);
      OccKey nk = base;
      for (int j = 0; j < n_out; ++j) {
        const int k = split[j];
        if (k == 0) continue;
        const int q = occupancy(nk, outputs[j].mode);
        if (q + k > 3) {
          throw std::logic_error("occupation overflow: >3 photons per mode");
        }
        Complex cpow = 1.0;
        for (int t = 0; t < k; ++t) cpow *= outputs[j].coeff;
        term *= cpow / kFact[k] * std::sqrt(kFact[q + k] / kFact[q]);
        nk = with_occupancy(nk, outputs[j].mode, q + k);
      }
      out.add(nk, term);
    };
    emit(emit, 0, n);
  }
  return out.pruned();
}

FockState FockState::apply_element(int src_mode,
                                   std::initializer_list<Port> outputs) const {
  std::vector<Port> v(outputs);
  return apply_element(src_mode, std::span<const Port>(v));
}

Complex FockState::overlap(const FockState& other) const {
  Complex o = 0.0;
  for (const auto& [key, amp] : amps_) {
    const auto it = other.amps_.find(key);
    if (it != other.amps_.end()) o += std::conj(it->second) * amp;
  }
  return o;
}

FockState FockState::pruned(double min_norm2) const {
  FockState out;
  for (const auto& [key, amp] : amps_) {
    if (std::norm(amp) > min_norm2) out.amps_[key] = amp;
  }
  return out;
}

FockState prepare_sources() {
  OccKey key = 0;
  key = with_occupancy(key, kSrcAH, 1);
  key = with_occupancy(key, kSrcAV, 1);
  key = with_occupancy(key, kSrcBH, 1);
  key = with_occupancy(key, kSrcBV, 1);
  return FockState::basis(key);
}

FockState apply_vbs(const FockState& state, Side side, double transmittance) {
  check_unit_interval(transmittance, "VBS transmittance");
  const double t = std::sqrt(transmittance);
  const double r = std::sqrt(1.0 - transmittance);
  if (side == Side::alice) {
    return state.apply_element(kSrcAH, {{kA1H, t}, {kA2H, r}})
        .apply_element(kSrcAV, {{kA1V, t}, {kA2V, r}});
  }
  return state.apply_element(kSrcBH, {{kB1H, t}, {kB2H, r}})
      .apply_element(kSrcBV, {{kB1V, t}, {kB2V, r}});
}

FockState apply_loss(const FockState& state, std::span<const int> modes,
                     double eta) {
  check_unit_interval(eta, "loss efficiency");
  const double keep = std::sqrt(eta);
  const double lose = std::sqrt(1.0 - eta);
  FockState s = state;
  for (const int m : modes) {
    s = s.apply_element(m, {{m, keep}, {sink_for(m), lose}});
  }
  return s;
}

FockState apply_loss(const FockState& state, std::initializer_list<int> modes,
                     double eta) {
  std::vector<int> v(modes);
  return apply_loss(state, std::span<const int>(v), eta);
}

FockState apply_hwp_bob(const FockState& state) {
  return state.apply_element(kB2H, {{kB3V, 1.0}})
      .apply_element(kB2V, {{kB3H, 1.0}});
}

std::vector<HeraldedOutcome> bsm_circuit(const FockState& state) {
  // 50:50 beam splitter: a1 -> (c + d)/√2, b1 -> (c - d)/√2 per
  // polarization; the polarizing splitters make the port/polarization slots
  // the detector modes directly.
  const FockState routed =
      state.apply_element(kA1H, {{kD1, kInvSqrt2}, {kD3, kInvSqrt2}})
          .apply_element(kA1V, {{kD2, kInvSqrt2}, {kD4, kInvSqrt2}})
          .apply_element(kB1H, {{kD1, kInvSqrt2}, {kD3, -kInvSqrt2}})
          .apply_element(kB1V, {{kD2, kInvSqrt2}, {kD4, -kInvSqrt2}});

  struct Group {
    double prob = 0.0;
    FockState post;
  };
  std::map<int, Group> groups;
  for (const auto& [key, amp] : routed.amplitudes()) {
    std::uint8_t clicks = 0;
    for (int d = 0; d < 4; ++d) {
      if (occupancy(key, kD1 + d) > 0) clicks |= std::uint8_t(1u << d);
    }
    const bool mem_a = occupancy(key, kA2H) + occupancy(key, kA2V) > 0;
    const bool mem_b = occupancy(key, kB2H) + occupancy(key, kB2V) +
                           occupancy(key, kB3H) + occupancy(key, kB3V) >
                       0;
    const int gkey = clicks | (mem_a ? 1 << 4 : 0) | (mem_b ? 1 << 5 : 0);
    Group& g = groups[gkey];
    g.prob += std::norm(amp);
    OccKey residue = key;
    for (int d = 0; d < 4; ++d) residue = with_occupancy(residue, kD1 + d, 0);
    g.post.add(residue, amp);
  }

  std::vector<HeraldedOutcome> outcomes;
  outcomes.reserve(groups.size());
  for (auto& [gkey, g] : groups) {
    HeraldedOutcome o;
    o.pattern.clicks = static_cast<std::uint8_t>(gkey & 0xF);
    o.pattern.memory_alice = (gkey >> 4) & 1;
    o.pattern.memory_bob = (gkey >> 5) & 1;
    o.probability = g.prob;
    o.post_state = g.prob > 0.0 ? g.post.normalized() : g.post;
    switch (o.pattern.clicks) {
      case 0b0011: case 0b1100: o.bell_label = BellLabel::psi_plus; break;
      case 0b0110: case 0b1001: o.bell_label = BellLabel::psi_minus; break;
      default: o.bell_label = BellLabel::none; break;
    }
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

DistributionResult distribute_entanglement(double transmittance,
                                           double eta_t_prime) {
  check_unit_interval(transmittance, "VBS transmittance");
  check_unit_interval(eta_t_prime, "half-link transmission efficiency");

  FockState s = prepare_sources();
  s = apply_vbs(s, Side::alice, transmittance);
  s = apply_vbs(s, Side::bob, transmittance);
  s = apply_loss(s, {kA1H, kA1V, kB1H, kB1V}, eta_t_prime);
  s = apply_hwp_bob(s);

  DistributionResult res;
  res.outcomes = bsm_circuit(s);
  for (const HeraldedOutcome& o : res.outcomes) {
    const bool psi = o.bell_label == BellLabel::psi_plus ||
                     o.bell_label == BellLabel::psi_minus;
    if (!psi || !o.pattern.memory_alice || !o.pattern.memory_bob) continue;
    if (o.bell_label == BellLabel::psi_plus) {
      res.success_probability += o.probability;
    } else {
      res.psi_minus_probability += o.probability;
    }
    FockState post = o.post_state;
    if (o.bell_label == BellLabel::psi_minus) {
      // Phase-flip correction: sigma_z on Bob's stored photon turns the
      // half-wave-plate output phi- back into phi+.
      post = post.apply_element(kB3V, {{kB3V, -1.0}});
    }
    res.post_states.emplace(o.bell_label, std::move(post));
  }
  res.combined_probability =
      res.success_probability + res.psi_minus_probability;
  return res;
}

double fidelity_phi_plus(const FockState& state) {
  OccKey hh = 0;
  hh = with_occupancy(hh, kA2H, 1);
  hh = with_occupancy(hh, kB3H, 1);
  OccKey vv = 0;
  vv = with_occupancy(vv, kA2V, 1);
  vv = with_occupancy(vv, kB3V, 1);
  const Complex o = (state.amplitude(hh) + state.amplitude(vv)) * kInvSqrt2;
  return std::norm(o);
}

double correlation_oracle(BellLabel label, double angle_a, double angle_b) {
  // Statevector in the |H/V> ⊗ |H/V> basis (index 2*qa + qb).
  Complex v[4] = {};
  switch (label) {
    case BellLabel::phi_plus:  v[0] = kInvSqrt2; v[3] = kInvSqrt2; break;
    case BellLabel::phi_minus: v[0] = kInvSqrt2; v[3] = -kInvSqrt2; break;
    case BellLabel::psi_plus:  v[1] = kInvSqrt2; v[2] = kInvSqrt2; break;
    case BellLabel::psi_minus: v[1] = kInvSqrt2; v[2] = -kInvSqrt2; break;
    case BellLabel::none:
      throw std::invalid_argument("correlation_oracle: not a Bell state");
  }

  const auto sigma = [](double t) {
    return std::array<std::array<double, 2>, 2>{
        {{std::cos(t), std::sin(t)}, {std::sin(t), -std::cos(t)}}};
  };
  const auto sa = sigma(angle_a);
  const auto sb = sigma(angle_b);

  // rho = |v><v|, M = sigma(a) ⊗ sigma(b), E = tr(rho · M).
  Complex e = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Complex rho_ij = v[i] * std::conj(v[j]);
      const double m_ji = sa[j >> 1][i >> 1] * sb[j & 1][i & 1];
      e += rho_ij * m_ji;
    }
  }
  return e.real();
}

}  // namespace diqsdc::optics
