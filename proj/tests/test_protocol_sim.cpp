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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "diqsdc/protocol_sim.hpp"
#include "doctest.h"

using namespace diqsdc::protocol;
using diqsdc::Exec;
using diqsdc::analytics::SystemParams;
using diqsdc::rng::Domain;
using diqsdc::rng::Stream;

namespace {

const double kChshMax = 2.0 * std::sqrt(2.0);

ProtocolConfig default_config(std::uint64_t pulses = 200'000,
                              std::uint64_t seed = 11) {
  ProtocolConfig cfg;
  cfg.params.pulses = pulses;
  cfg.params.distance_km = 0.0;
  cfg.seed = seed;
  return cfg;
}

ProtocolConfig ideal_config(std::uint64_t pulses = 200'000) {
  ProtocolConfig cfg = default_config(pulses);
  cfg.params.fidelity = 1.0;
  cfg.params.eta_coupling = 1.0;
  return cfg;
}

}  // namespace

TEST_CASE("runs are deterministic and policy-independent") {
  ProtocolConfig cfg = default_config(100'000, 77);
  cfg.eve.strategy = EveStrategy::intercept_fixed_z;
  cfg.eve.round1_fraction = 0.05;
  cfg.eve.round2_fraction = 0.1;

  const RunReport serial_a = run_protocol(cfg, Exec::serial);
  const RunReport serial_b = run_protocol(cfg, Exec::serial);
  const RunReport parallel = run_protocol(cfg, Exec::parallel);
  CHECK(serial_a == serial_b);
  CHECK(serial_a == parallel);

  // A different seed gives a different transcript.
  cfg.seed = 78;
  CHECK_FALSE(run_protocol(cfg) == serial_a);
}

TEST_CASE("aborted runs compare equal across policies too") {
  ProtocolConfig cfg = default_config(20'000);
  cfg.eve.strategy = EveStrategy::intercept_fixed_z;
  cfg.eve.round1_fraction = 1.0;
  const RunReport serial = run_protocol(cfg, Exec::serial);
  const RunReport parallel = run_protocol(cfg, Exec::parallel);
  CHECK(serial == parallel);
  CHECK(serial.aborted_round1);
}

TEST_CASE("heralded count follows the binomial prediction") {
  const ProtocolConfig cfg = ideal_config(1'000'000);
  const RunReport rep = run_protocol(cfg);
  const double p1 = 1.0 / 16.0;
  const double expected = static_cast<double>(cfg.params.pulses) * p1;
  const double sigma = std::sqrt(expected * (1.0 - p1));
  CHECK(std::fabs(static_cast<double>(rep.heralded) - expected) <
        5.0 * sigma);
}

TEST_CASE("ideal run: maximal violation, no errors, no losses") {
  const RunReport rep = run_protocol(ideal_config(400'000));
  REQUIRE(rep.round1.sufficient);
  CHECK_FALSE(rep.aborted_round1);
  CHECK_FALSE(rep.aborted_round2);
  CHECK(std::fabs(rep.round1.s_hat - kChshMax) < 5.0 * rep.round1.s_se);
  CHECK(rep.round1.qb_hat == 0.0);
  CHECK(rep.round1.qp_hat == 0.0);
  CHECK(rep.round1.q_sum_hat == 0.0);
  CHECK(rep.bit_errors == 0);
  CHECK(rep.lost_messages == 0);
  CHECK(rep.leak.matched_fraction == 0.0);
}

TEST_CASE("pairs partition into roles exactly and messages are conserved") {
  for (const double cf : {0.5, 0.25}) {
    ProtocolConfig cfg = default_config(300'000, 5);
    cfg.check_fraction = cf;
    const RunReport rep = run_protocol(cfg);
    CHECK(rep.check1_count + rep.check2_count + rep.message_count ==
          rep.heralded);
    CHECK(rep.decoded_bits.size() + rep.lost_messages == rep.message_count);
    // check1 : check2 : message converge to cf : cf(1-cf) : (1-cf)^2.
    const double n1 = static_cast<double>(rep.heralded);
    CHECK(static_cast<double>(rep.check1_count) / n1 ==
          doctest::Approx(cf).epsilon(0.05));
    CHECK(static_cast<double>(rep.message_count) / n1 ==
          doctest::Approx((1.0 - cf) * (1.0 - cf)).epsilon(0.05));
  }
}

TEST_CASE("estimators converge to the closed forms") {
  ProtocolConfig cfg = default_config(1'000'000, 3);
  cfg.params.distance_km = 1.0;
  const RunReport rep = run_protocol(cfg);
  const auto r1 = diqsdc::analytics::round1_metrics(cfg.params.eta_local(),
                                                    cfg.params.fidelity);
  const auto r2 = diqsdc::analytics::round2_metrics(
      cfg.params.eta_total(), cfg.params.eta_local(), cfg.params.fidelity);
  REQUIRE(rep.round1.sufficient);
  REQUIRE(rep.round2.sufficient);
  CHECK(std::fabs(rep.round1.s_hat - r1.chsh_s) < 5.0 * rep.round1.s_se);
  CHECK(std::fabs(rep.round1.q_sum_hat - r1.q_sum) <
        5.0 * rep.round1.q_sum_se);
  CHECK(std::fabs(rep.round2.s_hat - r2.chsh_s) < 5.0 * rep.round2.s_se);
  CHECK(std::fabs(rep.round2.q_sum_hat - r2.q_sum) <
        5.0 * rep.round2.q_sum_se);
}

TEST_CASE("round-2 error estimator tracks the channel at the range limit") {
  ProtocolConfig cfg = default_config(1'000'000, 29);
  cfg.params.distance_km = 6.68;
  const RunReport rep = run_protocol(cfg);
  // At this distance S2_hat sits below 2, so the run ends flagged, but the
  // second-round statistics are still gathered first.
  CHECK(rep.aborted_round2);
  REQUIRE(rep.round2.sufficient);
  const double expected =
      diqsdc::analytics::round2_metrics(cfg.params.eta_total(),
                                        cfg.params.eta_local(),
                                        cfg.params.fidelity)
          .q_sum;
  CHECK(expected == doctest::Approx(0.17492).epsilon(1e-3));
  CHECK(std::fabs(rep.round2.q_sum_hat - expected) <
        5.0 * rep.round2.q_sum_se);
}

TEST_CASE("a run too small to fill the estimator cells aborts cleanly") {
  ProtocolConfig cfg = default_config(64, 1);
  const RunReport rep = run_protocol(cfg);
  CHECK_FALSE(rep.round1.sufficient);
  CHECK(rep.aborted_round1);
  CHECK(rep.decoded_bits.empty());
  CHECK(run_protocol(cfg, Exec::serial) == rep);
}

TEST_CASE("loss and error bookkeeping match the channel rates") {
  ProtocolConfig cfg = default_config(1'000'000, 9);
  cfg.params.distance_km = 1.0;
  const RunReport rep = run_protocol(cfg);
  const double eta_l2 = cfg.params.eta_local() * cfg.params.eta_local();
  const double loss_expected = 1.0 - eta_l2 * cfg.params.eta_total();
  const double loss_emp = static_cast<double>(rep.lost_messages) /
                          static_cast<double>(rep.message_count);
  const double loss_sigma = std::sqrt(loss_expected * (1.0 - loss_expected) /
                                      static_cast<double>(rep.message_count));
  CHECK(std::fabs(loss_emp - loss_expected) < 5.0 * loss_sigma);

  const double err_expected = 1.0 - cfg.params.fidelity * cfg.params.fidelity;
  const auto decoded = static_cast<double>(rep.decoded_bits.size());
  const double err_emp = static_cast<double>(rep.bit_errors) / decoded;
  const double err_sigma =
      std::sqrt(err_expected * (1.0 - err_expected) / decoded);
  CHECK(std::fabs(err_emp - err_expected) < 5.0 * err_sigma);
}

TEST_CASE("long-haul transmission survival follows the fiber law") {
  ProtocolConfig cfg = default_config(1'000'000, 21);
  cfg.params.distance_km = 50.0;  // eta_t = 0.1
  cfg.continue_on_abort = true;   // S2 is deep in the classical regime here
  const RunReport rep = run_protocol(cfg);
  const double expected = 1.0 - cfg.params.eta_local() *
                                    cfg.params.eta_local() * 0.1;
  const double emp = static_cast<double>(rep.lost_messages) /
                     static_cast<double>(rep.message_count);
  const double sigma = std::sqrt(expected * (1.0 - expected) /
                                 static_cast<double>(rep.message_count));
  CHECK(std::fabs(emp - expected) < 5.0 * sigma);
  CHECK(rep.aborted_round2);
}

TEST_CASE("full intercept-resend trips the first security check") {
  for (const auto strategy :
       {EveStrategy::intercept_fixed_z, EveStrategy::intercept_random_zx}) {
    ProtocolConfig cfg = default_config(100'000, 31);
    cfg.eve.strategy = strategy;
    cfg.eve.round1_fraction = 1.0;
    const RunReport rep = run_protocol(cfg);
    REQUIRE(rep.round1.sufficient);
    CHECK(rep.aborted_round1);
    const double eta_l2 = cfg.params.eta_local() * cfg.params.eta_local();
    const double expected = std::sqrt(2.0) * eta_l2 * cfg.params.fidelity;
    CHECK(std::fabs(rep.round1.s_hat - expected) < 5.0 * rep.round1.s_se);
    CHECK(rep.decoded_bits.empty());  // protocol stopped before decoding
  }
}

TEST_CASE("partial interception leaks at the product of the hit rates") {
  ProtocolConfig cfg = default_config(1'000'000, 13);
  cfg.eve.strategy = EveStrategy::intercept_fixed_z;
  cfg.eve.round1_fraction = 0.1;
  cfg.eve.round2_fraction = 0.1;
  const RunReport rep = run_protocol(cfg);
  CHECK_FALSE(rep.aborted_round1);
  const double expected = 0.01;
  const double sigma = std::sqrt(expected * (1.0 - expected) /
                                 static_cast<double>(rep.message_count));
  CHECK(std::fabs(rep.leak.matched_fraction - expected) < 5.0 * sigma);
  CHECK(rep.leak.chi_bound > 0.0);
}

TEST_CASE("total interception of both rounds is fully matched") {
  ProtocolConfig cfg = default_config(50'000, 17);
  cfg.eve.strategy = EveStrategy::intercept_fixed_z;
  cfg.eve.round1_fraction = 1.0;
  cfg.eve.round2_fraction = 1.0;
  cfg.continue_on_abort = true;
  const RunReport rep = run_protocol(cfg);
  CHECK(rep.aborted_round1);
  CHECK(rep.aborted_round2);
  CHECK(rep.leak.matched_fraction == 1.0);
  CHECK(rep.leak.eve_round1_hits == rep.message_count);
  CHECK(rep.leak.eve_round2_hits == rep.message_count);
}

TEST_CASE("second-round interception randomizes the decoded bits") {
  ProtocolConfig cfg = default_config(400'000, 19);
  cfg.eve.strategy = EveStrategy::intercept_fixed_z;
  cfg.eve.round2_fraction = 1.0;
  cfg.continue_on_abort = true;
  const RunReport rep = run_protocol(cfg);
  const auto decoded = static_cast<double>(rep.decoded_bits.size());
  REQUIRE(decoded > 1000);
  const double err = static_cast<double>(rep.bit_errors) / decoded;
  CHECK(std::fabs(err - 0.5) < 5.0 * std::sqrt(0.25 / decoded));
}

TEST_CASE("explicit message bits round-trip through an ideal channel") {
  ProtocolConfig cfg = ideal_config(40'000);
  cfg.message_bits = {1, 0, 1, 1, 0, 0, 1, 0, 1, 1};
  const RunReport rep = run_protocol(cfg);
  REQUIRE(rep.decoded_bits.size() >= cfg.message_bits.size());
  for (std::size_t i = 0; i < cfg.message_bits.size(); ++i) {
    CHECK(rep.decoded_bits[i] == cfg.message_bits[i]);
  }

  ProtocolConfig too_long = ideal_config(20'000);
  too_long.message_bits.assign(20'000, 1);  // far beyond the message pairs
  CHECK_THROWS_AS(run_protocol(too_long), std::invalid_argument);
}

TEST_CASE("discarded basis combinations never enter the estimators") {
  const RunReport rep = run_protocol(default_config(400'000, 23));
  const auto cell_count = [&](int ba, int bb) {
    std::uint64_t n = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) n += rep.round1.tally[ba][bb][a][b];
    return n;
  };
  CHECK(rep.round1.n_discarded == cell_count(0, 1) + cell_count(3, 0));
  CHECK(rep.round1.n_discarded > 0);

  // Zeroing the discarded cells does not move any estimate.
  SecurityCheckStats stripped = rep.round1;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      stripped.tally[0][1][a][b] = 0;
      stripped.tally[3][0][a][b] = 0;
    }
  }
  estimate_chsh(stripped);
  estimate_error_rates(stripped);
  CHECK(stripped.s_hat == rep.round1.s_hat);
  CHECK(stripped.qb_hat == rep.round1.qb_hat);
  CHECK(stripped.qp_hat == rep.round1.qp_hat);
}

TEST_CASE("chsh estimator arithmetic on synthetic tallies") {
  SecurityCheckStats st;
  const auto fill = [&](int ba, int bb, std::uint64_t eq, std::uint64_t neq) {
    st.tally[ba][bb][1][1] = eq / 2;
    st.tally[ba][bb][0][0] = eq - eq / 2;
    st.tally[ba][bb][1][0] = neq / 2;
    st.tally[ba][bb][0][1] = neq - neq / 2;
  };

  SUBCASE("perfect correlators give the algebraic maximum") {
    fill(1, 0, 1000, 0);
    fill(1, 1, 1000, 0);
    fill(2, 0, 1000, 0);
    fill(2, 1, 0, 1000);
    estimate_chsh(st);
    CHECK(st.s_hat == doctest::Approx(4.0));
    CHECK(st.s_se == doctest::Approx(0.0));
  }
  SUBCASE("flat correlators give zero") {
    for (int i = 1; i <= 2; ++i)
      for (int j = 0; j <= 1; ++j) fill(i, j, 500, 500);
    estimate_chsh(st);
    CHECK(st.s_hat == doctest::Approx(0.0));
    CHECK(st.s_se == doctest::Approx(std::sqrt(4.0 / 1000.0)));
  }
  SUBCASE("half correlators sum to the classical bound") {
    fill(1, 0, 750, 250);
    fill(1, 1, 750, 250);
    fill(2, 0, 750, 250);
    fill(2, 1, 250, 750);
    estimate_chsh(st);
    CHECK(st.s_hat == doctest::Approx(2.0));
  }
  SUBCASE("an empty cell is an error") {
    fill(1, 0, 10, 10);
    CHECK_THROWS_AS(estimate_chsh(st), std::runtime_error);
  }
}

TEST_CASE("error-rate estimator arithmetic on synthetic tallies") {
  SecurityCheckStats st;
  st.tally[0][0][1][1] = 90;
  st.tally[0][0][1][0] = 10;  // Qb = 0.1
  st.tally[3][1][0][0] = 60;
  st.tally[3][1][0][1] = 40;  // Qp = 0.4
  st.n_checks = 200;
  st.error_events = 30;
  estimate_error_rates(st);
  CHECK(st.qb_hat == doctest::Approx(0.1));
  CHECK(st.qp_hat == doctest::Approx(0.4));
  CHECK(st.q_sum_hat == doctest::Approx(0.15));

  SecurityCheckStats empty;
  CHECK_THROWS_AS(estimate_error_rates(empty), std::runtime_error);
}

TEST_CASE("heralding sampler hits the configured rate") {
  SystemParams params;
  params.distance_km = 0.0;

  SUBCASE("balanced splitter, lossless") {
    int hits = 0;
    const int n = 200'000;
    for (int i = 0; i < n; ++i) {
      Stream s(99, Domain::herald, static_cast<std::uint64_t>(i));
      hits += sample_heralding(params, s);
    }
    const double rate = static_cast<double>(hits) / n;
    CHECK(std::fabs(rate - 1.0 / 16.0) <
          5.0 * std::sqrt((1.0 / 16.0) * (15.0 / 16.0) / n));
  }
  SUBCASE("blocked splitter never heralds") {
    params.vbs_transmittance = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Stream s(99, Domain::herald, static_cast<std::uint64_t>(i));
      CHECK_FALSE(sample_heralding(params, s));
    }
  }
  SUBCASE("half transmission scales the rate") {
    params.distance_km = 15.051499783199059;  // eta_t = 0.5
    int hits = 0;
    const int n = 400'000;
    for (int i = 0; i < n; ++i) {
      Stream s(7, Domain::herald, static_cast<std::uint64_t>(i));
      hits += sample_heralding(params, s);
    }
    const double rate = static_cast<double>(hits) / n;
    CHECK(std::fabs(rate - 1.0 / 32.0) <
          5.0 * std::sqrt((1.0 / 32.0) * (31.0 / 32.0) / n));
  }
}

TEST_CASE("check outcome sampler: correlations and marginals") {
  const int n = 200'000;

  SUBCASE("aligned bases on an intact pair always agree") {
    CheckContext ctx;
    for (int i = 0; i < 2000; ++i) {
      Stream s(1, Domain::generic, static_cast<std::uint64_t>(i));
      const auto [a, b] = sample_check_outcome(ctx, 0.0, 0.0, s);
      CHECK(a == b);
    }
  }
  SUBCASE("diagonal basis gives the Bell-state agreement rate") {
    CheckContext ctx;
    int agree = 0;
    for (int i = 0; i < n; ++i) {
      Stream s(2, Domain::generic, static_cast<std::uint64_t>(i));
      const auto [a, b] = sample_check_outcome(ctx, M_PI / 4, 0.0, s);
      agree += a == b;
    }
    const double expected = 0.5 * (1.0 + std::sqrt(0.5));
    const double rate = static_cast<double>(agree) / n;
    CHECK(std::fabs(rate - expected) <
          5.0 * std::sqrt(expected * (1.0 - expected) / n));
  }
  SUBCASE("missing photons decorrelate and keep marginals uniform") {
    CheckContext ctx;
    ctx.present_a = false;
    ctx.present_b = false;
    long sum_a = 0, sum_b = 0, sum_ab = 0;
    for (int i = 0; i < n; ++i) {
      Stream s(3, Domain::generic, static_cast<std::uint64_t>(i));
      const auto [a, b] = sample_check_outcome(ctx, M_PI / 4, 0.0, s);
      sum_a += a;
      sum_b += b;
      sum_ab += a * b;
    }
    const double bound = 5.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(sum_a / static_cast<double>(n)) < bound);
    CHECK(std::fabs(sum_b / static_cast<double>(n)) < bound);
    CHECK(std::fabs(sum_ab / static_cast<double>(n)) < bound);
  }
}

TEST_CASE("bsm decode unit behaviour") {
  Stream s(4, Domain::generic, 0);

  DecodeInputs in;
  in.detected = true;
  in.encoded_bit = 1;
  CHECK(bsm_decode(in, s).bit == 1);
  CHECK_FALSE(bsm_decode(in, s).error);

  in.corrupted = true;
  const DecodeResult flipped = bsm_decode(in, s);
  CHECK(flipped.bit == 0);
  CHECK(flipped.error);

  in.detected = false;
  CHECK(bsm_decode(in, s).lost);
}

TEST_CASE("shuffle produces a uniform-looking bijection") {
  for (const std::size_t n : {1ul, 2ul, 17ul, 1000ul}) {
    const auto perm = random_permutation(n, Stream(6, Domain::shuffle, 0));
    REQUIRE(perm.size() == n);
    std::vector<std::uint32_t> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(sorted[i] == static_cast<std::uint32_t>(i));
    }
  }
  // Mean displacement of a uniform permutation of n elements is ~n/3.
  const std::size_t n = 10'000;
  const auto perm = random_permutation(n, Stream(8, Domain::shuffle, 0));
  double displacement = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    displacement += std::fabs(static_cast<double>(perm[i]) -
                              static_cast<double>(i));
  }
  displacement /= static_cast<double>(n) * static_cast<double>(n);
  CHECK(displacement > 0.30);
  CHECK(displacement < 0.37);
}

TEST_CASE("config validation") {
  ProtocolConfig cfg = default_config();
  cfg.check_fraction = 0.0;
  CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
  cfg = default_config();
  cfg.check_fraction = 1.0;
  CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
  cfg = default_config();
  cfg.eve.round1_fraction = 0.3;  // fraction without a strategy
  CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
  cfg = default_config();
  cfg.eve.strategy = EveStrategy::intercept_fixed_z;
  cfg.eve.round2_fraction = 1.3;
  CHECK_THROWS_AS(run_protocol(cfg), std::invalid_argument);
}
