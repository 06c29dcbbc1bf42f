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

#include "diqsdc/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "diqsdc/fock_optics.hpp"

namespace diqsdc::protocol {

namespace {

constexpr std::uint8_t kRoleCheck1 = 0;
constexpr std::uint8_t kRoleCheck2 = 1;
constexpr std::uint8_t kRoleMessage = 2;

double effective_correlator(const CheckContext& ctx, double angle_a,
                            double angle_b, rng::Stream& stream) {
  if (ctx.corrupted) return 0.0;
  if (ctx.eve_touched) {
    // Intercept-resend leaves a product state correlated along the
    // measured axis: E = <sigma(a)>_k <sigma(b)>_k averaged over the two
    // outcomes, i.e. cos·cos for Z and sin·sin for X.
    const bool use_x = ctx.eve_strategy == EveStrategy::intercept_random_zx &&
                       stream.bernoulli(0.5);
    return use_x ? std::sin(angle_a) * std::sin(angle_b)
                 : std::cos(angle_a) * std::cos(angle_b);
  }
  return optics::correlation_oracle(optics::BellLabel::phi_plus, angle_a,
                                    angle_b);
}

void tally_correlator(const Tally& tally, int ba, int bb, double* value,
                      double* variance, std::uint64_t* count) {
  const std::uint64_t eq = tally[ba][bb][1][1] + tally[ba][bb][0][0];
  const std::uint64_t neq = tally[ba][bb][1][0] + tally[ba][bb][0][1];
  const std::uint64_t n = eq + neq;
  if (n == 0) {
    throw std::runtime_error("estimate_chsh: empty correlator cell");
  }
  const double c = (static_cast<double>(eq) - static_cast<double>(neq)) /
                   static_cast<double>(n);
  *value = c;
  *variance = (1.0 - c * c) / static_cast<double>(n);
  *count = n;
}

double mismatch_fraction(const Tally& tally, int ba, int bb, double* se) {
  const std::uint64_t eq = tally[ba][bb][1][1] + tally[ba][bb][0][0];
  const std::uint64_t neq = tally[ba][bb][1][0] + tally[ba][bb][0][1];
  const std::uint64_t n = eq + neq;
  if (n == 0) {
    throw std::runtime_error("estimate_error_rates: empty estimator cell");
  }
  const double q = static_cast<double>(neq) / static_cast<double>(n);
  *se = std::sqrt(q * (1.0 - q) / static_cast<double>(n));
  return q;
}

// Per-pair record of one security-check measurement.
struct CheckSample {
  std::uint8_t used = 0;
  std::uint8_t basis_a = 0;
  std::uint8_t basis_b = 0;
  std::int8_t a = 0;
  std::int8_t b = 0;
  std::uint8_t error_event = 0;
};

SecurityCheckStats reduce_check_samples(const std::vector<CheckSample>& s) {
  SecurityCheckStats st;
  for (const CheckSample& c : s) {
    if (!c.used) continue;
    ++st.tally[c.basis_a][c.basis_b][c.a > 0][c.b > 0];
    ++st.n_checks;
    st.error_events += c.error_event;
    const bool discarded = (c.basis_a == 0 && c.basis_b == 1) ||
                           (c.basis_a == 3 && c.basis_b == 0);
    st.n_discarded += discarded;
  }
  try {
    estimate_chsh(st);
    estimate_error_rates(st);
    st.sufficient = true;
  } catch (const std::runtime_error&) {
    st.sufficient = false;
  }
  return st;
}

}  // namespace

void ProtocolConfig::validate() const {
  params.validate();
  if (!(check_fraction > 0.0 && check_fraction < 1.0)) {
    throw std::invalid_argument("check_fraction must lie in (0, 1)");
  }
  if (eve.round1_fraction < 0.0 || eve.round1_fraction > 1.0 ||
      eve.round2_fraction < 0.0 || eve.round2_fraction > 1.0) {
    throw std::invalid_argument("eavesdropper fractions must lie in [0, 1]");
  }
  if (eve.strategy == EveStrategy::none &&
      (eve.round1_fraction > 0.0 || eve.round2_fraction > 0.0)) {
    throw std::invalid_argument(
        "eavesdropper fractions require an interception strategy");
  }
}

bool sample_heralding(const analytics::SystemParams& params,
                      rng::Stream& stream) {
  const double p1 = analytics::heralding_success_probability(
      params.vbs_transmittance, params.eta_total());
  return stream.bernoulli(p1);
}

std::pair<int, int> sample_check_outcome(const CheckContext& ctx,
                                         double angle_a, double angle_b,
                                         rng::Stream& stream) {
  const int a = stream.bernoulli(0.5) ? 1 : -1;
  if (!ctx.present_a || !ctx.present_b) {
    // Missing photon: the inconclusive arm is filled with a fair coin, and
    // a Bell-state marginal is uniform anyway.
    const int b = stream.bernoulli(0.5) ? 1 : -1;
    return {a, b};
  }
  const double e = effective_correlator(ctx, angle_a, angle_b, stream);
  const int b = stream.bernoulli(0.5 * (1.0 + e)) ? a : -a;
  return {a, b};
}

void estimate_chsh(SecurityCheckStats& stats) {
  double c[2][2], var[2][2];
  std::uint64_t n[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      tally_correlator(stats.tally, 1 + i, j, &c[i][j], &var[i][j], &n[i][j]);
    }
  }
  stats.s_hat = c[0][0] + c[0][1] + c[1][0] - c[1][1];
  stats.s_se =
      std::sqrt(var[0][0] + var[0][1] + var[1][0] + var[1][1]);
}

void estimate_error_rates(SecurityCheckStats& stats) {
  stats.qb_hat = mismatch_fraction(stats.tally, 0, 0, &stats.qb_se);
  stats.qp_hat = mismatch_fraction(stats.tally, 3, 1, &stats.qp_se);
  if (stats.n_checks == 0) {
    throw std::runtime_error("estimate_error_rates: no check samples");
  }
  const double n = static_cast<double>(stats.n_checks);
  stats.q_sum_hat = static_cast<double>(stats.error_events) / n;
  stats.q_sum_se = std::sqrt(stats.q_sum_hat * (1.0 - stats.q_sum_hat) / n);
}

std::vector<std::uint32_t> random_permutation(std::size_t n,
                                              rng::Stream&& stream) {
  std::vector<std::uint32_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t j = stream.next_below(i);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

TransmitOutcome sample_transmission(const analytics::SystemParams& params,
                                    rng::Stream& stream) {
  TransmitOutcome out;
  out.survived = stream.bernoulli(params.eta_total());
  out.corrupted = stream.bernoulli(1.0 - params.fidelity);
  return out;
}

DecodeResult bsm_decode(const DecodeInputs& in, rng::Stream& stream) {
  DecodeResult res;
  if (!in.detected) {
    res.lost = true;
    return res;
  }
  if (in.eve_touched) {
    // The resent product state carries no psi+/psi- phase distinction.
    res.bit = stream.bernoulli(0.5) ? 1 : 0;
  } else if (in.corrupted) {
    res.bit = in.encoded_bit ^ 1u;
  } else {
    res.bit = in.encoded_bit;
  }
  res.error = res.bit != in.encoded_bit;
  return res;
}

RunReport run_protocol(const ProtocolConfig& cfg, Exec exec) {
  cfg.validate();
  const analytics::SystemParams& prm = cfg.params;
  const double eta_l = prm.eta_local();
  const double eta_t = prm.eta_total();
  const double fidelity = prm.fidelity;
  const double p1 =
      analytics::heralding_success_probability(prm.vbs_transmittance, eta_t);
  const double eve_f = cfg.eve.round1_fraction;
  const double eve_g = cfg.eve.round2_fraction;
  const std::uint64_t n_pulses = prm.pulses;

  RunReport rep;
  rep.pulses = n_pulses;

  // Step 1: heralded distribution, one Bernoulli per pulse.
  std::vector<std::uint8_t> heralded(n_pulses);
  for_each_index(n_pulses, exec, [&](std::size_t i) {
    rng::Stream s(cfg.seed, rng::Domain::herald, i);
    heralded[i] = s.bernoulli(p1);
  });
  std::vector<std::uint64_t> pulse_of;
  pulse_of.reserve(static_cast<std::size_t>(
      static_cast<double>(n_pulses) * p1 * 1.2 + 64.0));
  for (std::uint64_t i = 0; i < n_pulses; ++i) {
    if (heralded[i]) pulse_of.push_back(i);
  }
  heralded.clear();
  heralded.shrink_to_fit();
  const std::size_t n1 = pulse_of.size();
  rep.heralded = n1;

  // Pair lifecycle flags: role, first-round decoherence and interception.
  std::vector<std::uint8_t> role(n1), corrupted1(n1), eve1(n1);
  for_each_index(n1, exec, [&](std::size_t k) {
    const std::uint64_t id = pulse_of[k];
    rng::Stream rs(cfg.seed, rng::Domain::role, id);
    if (rs.next_double() < cfg.check_fraction) {
      role[k] = kRoleCheck1;
    } else {
      role[k] = rs.next_double() < cfg.check_fraction ? kRoleCheck2
                                                      : kRoleMessage;
    }
    rng::Stream ps(cfg.seed, rng::Domain::pair_state, id);
    corrupted1[k] = ps.bernoulli(1.0 - fidelity);
    rng::Stream es(cfg.seed, rng::Domain::eve_round1, id);
    eve1[k] = es.bernoulli(eve_f);
  });
  for (std::size_t k = 0; k < n1; ++k) {
    rep.check1_count += role[k] == kRoleCheck1;
    rep.check2_count += role[k] == kRoleCheck2;
    rep.message_count += role[k] == kRoleMessage;
  }

  // Step 2: first DI security check on the check1 pairs.
  std::vector<CheckSample> samples(n1);
  for_each_index(n1, exec, [&](std::size_t k) {
    if (role[k] != kRoleCheck1) return;
    rng::Stream s(cfg.seed, rng::Domain::check_round1, pulse_of[k]);
    CheckSample& cs = samples[k];
    cs.basis_a = static_cast<std::uint8_t>(s.next_below(4));
    cs.basis_b = static_cast<std::uint8_t>(s.next_below(2));
    CheckContext ctx;
    ctx.present_a = s.bernoulli(eta_l);
    ctx.present_b = s.bernoulli(eta_l);
    ctx.corrupted = corrupted1[k];
    ctx.eve_touched = eve1[k];
    ctx.eve_strategy = cfg.eve.strategy;
    const auto [a, b] = sample_check_outcome(ctx, kAliceBasisAngles[cs.basis_a],
                                             kBobBasisAngles[cs.basis_b], s);
    cs.a = static_cast<std::int8_t>(a);
    cs.b = static_cast<std::int8_t>(b);
    const bool present = ctx.present_a && ctx.present_b;
    cs.error_event = present ? ctx.corrupted : s.bernoulli(0.5);
    cs.used = 1;
  });
  rep.round1 = reduce_check_samples(samples);
  rep.aborted_round1 = !rep.round1.sufficient || rep.round1.s_hat <= 2.0;
  if (rep.aborted_round1 && !cfg.continue_on_abort) return rep;

  // Step 3: encoding and shuffling. The transmitted sequence holds the
  // message pairs and the reserved second-round check pairs.
  std::vector<std::uint32_t> sent;
  sent.reserve(n1 - rep.check1_count);
  std::vector<std::uint8_t> encoded(n1, 0);
  std::size_t message_rank = 0;
  if (!cfg.message_bits.empty() &&
      cfg.message_bits.size() > rep.message_count) {
    throw std::invalid_argument(
        "message is longer than the available message pairs");
  }
  for (std::size_t k = 0; k < n1; ++k) {
    if (role[k] == kRoleCheck1) continue;
    sent.push_back(static_cast<std::uint32_t>(k));
    if (role[k] != kRoleMessage) continue;
    if (message_rank < cfg.message_bits.size()) {
      encoded[k] = cfg.message_bits[message_rank] ? 1 : 0;
    } else {
      rng::Stream ms(cfg.seed, rng::Domain::message_bit, pulse_of[k]);
      encoded[k] = ms.bernoulli(0.5);
    }
    ++message_rank;
  }
  const std::size_t n_sent = sent.size();
  const std::vector<std::uint32_t> position_of = random_permutation(
      n_sent, rng::Stream(cfg.seed, rng::Domain::shuffle, 0));

  // Step 4: transmission. Fiber loss and a second decoherence pass are
  // drawn per pair; the eavesdropper picks positions in the shuffled
  // sequence, so her hits are uniform over the original identities. The
  // position announcement afterwards lets Bob restore the order.
  std::vector<std::uint8_t> eve_at_position(n_sent);
  for_each_index(n_sent, exec, [&](std::size_t j) {
    rng::Stream s(cfg.seed, rng::Domain::eve_round2, j);
    eve_at_position[j] = s.bernoulli(eve_g);
  });
  std::vector<std::uint8_t> survived2(n1, 0), corrupted2(n1, 0), eve2(n1, 0);
  for_each_index(n_sent, exec, [&](std::size_t j) {
    const std::uint32_t k = sent[j];
    rng::Stream s(cfg.seed, rng::Domain::transmit, pulse_of[k]);
    const TransmitOutcome out = sample_transmission(prm, s);
    survived2[k] = out.survived;
    corrupted2[k] = out.corrupted;
    eve2[k] = eve_at_position[position_of[j]];
  });

  // Second DI security check, performed by Bob on both arms.
  std::fill(samples.begin(), samples.end(), CheckSample{});
  for_each_index(n1, exec, [&](std::size_t k) {
    if (role[k] != kRoleCheck2) return;
    rng::Stream s(cfg.seed, rng::Domain::check_round2, pulse_of[k]);
    CheckSample& cs = samples[k];
    cs.basis_a = static_cast<std::uint8_t>(s.next_below(4));
    cs.basis_b = static_cast<std::uint8_t>(s.next_below(2));
    CheckContext ctx;
    ctx.present_a = survived2[k] && s.bernoulli(eta_l);
    ctx.present_b = s.bernoulli(eta_l);
    ctx.corrupted = corrupted1[k] || corrupted2[k];
    ctx.eve_touched = eve1[k] || eve2[k];
    ctx.eve_strategy = cfg.eve.strategy;
    const auto [a, b] = sample_check_outcome(ctx, kAliceBasisAngles[cs.basis_a],
                                             kBobBasisAngles[cs.basis_b], s);
    cs.a = static_cast<std::int8_t>(a);
    cs.b = static_cast<std::int8_t>(b);
    const bool present = ctx.present_a && ctx.present_b;
    cs.error_event = present ? ctx.corrupted : s.bernoulli(0.5);
    cs.used = 1;
  });
  rep.round2 = reduce_check_samples(samples);
  rep.aborted_round2 = !rep.round2.sufficient || rep.round2.s_hat <= 2.0;

  // Step 5: BSM decoding of the message pairs.
  if (!rep.aborted_round2 || cfg.continue_on_abort) {
    struct MsgOutcome {
      std::uint8_t is_message = 0;
      std::uint8_t lost = 0;
      std::uint8_t bit = 0;
      std::uint8_t error = 0;
    };
    std::vector<MsgOutcome> outcomes(n1);
    for_each_index(n1, exec, [&](std::size_t k) {
      if (role[k] != kRoleMessage) return;
      rng::Stream s(cfg.seed, rng::Domain::decode, pulse_of[k]);
      DecodeInputs in;
      in.detected = survived2[k] && s.bernoulli(eta_l) && s.bernoulli(eta_l);
      in.eve_touched = eve1[k] || eve2[k];
      in.corrupted = corrupted1[k] || corrupted2[k];
      in.encoded_bit = encoded[k];
      const DecodeResult res = bsm_decode(in, s);
      MsgOutcome& out = outcomes[k];
      out.is_message = 1;
      out.lost = res.lost;
      out.bit = res.bit;
      out.error = res.error;
    });
    rep.decoded_bits.reserve(rep.message_count);
    for (const MsgOutcome& out : outcomes) {
      if (!out.is_message) continue;
      if (out.lost) {
        ++rep.lost_messages;
      } else {
        rep.decoded_bits.push_back(out.bit);
        rep.bit_errors += out.error;
      }
    }
  }

  // Leakage audit: the eavesdropper reads a message bit only when she held
  // both photons of the pair.
  for (std::size_t k = 0; k < n1; ++k) {
    if (role[k] != kRoleMessage) continue;
    rep.leak.eve_round1_hits += eve1[k];
    rep.leak.eve_round2_hits += eve2[k];
    rep.leak.matched_pairs += eve1[k] && eve2[k];
  }
  rep.leak.matched_fraction =
      rep.message_count == 0
          ? 0.0
          : static_cast<double>(rep.leak.matched_pairs) /
                static_cast<double>(rep.message_count);
  const double s1 = rep.round1.sufficient ? rep.round1.s_hat : 0.0;
  rep.leak.chi_bound =
      s1 > 2.0 ? analytics::holevo_bound(std::min(s1, 2.0 * std::sqrt(2.0)))
               : 1.0;
  return rep;
}

}  // namespace diqsdc::protocol
