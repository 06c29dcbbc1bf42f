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

namespace diqsdc::rng {

// Threefry2x64 with 20 rounds: a stateless counter-based generator mapping
// (key, counter) to two 64-bit words. Every Monte Carlo draw in the
// simulator is addressed as (seed, domain, item index, draw number), which
// is what makes parallel runs reproduce serial runs bit for bit.
struct Threefry2x64 {
  static constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ull;

  static std::array<std::uint64_t, 2> block(std::array<std::uint64_t, 2> key,
                                            std::array<std::uint64_t, 2> ctr) {
    constexpr int kRot[8] = {16, 42, 12, 31, 16, 32, 24, 21};
    const std::uint64_t ks[3] = {key[0], key[1], kParity ^ key[0] ^ key[1]};
    std::uint64_t x0 = ctr[0] + ks[0];
    std::uint64_t x1 = ctr[1] + ks[1];
    for (int r = 0; r < 20; ++r) {
      x0 += x1;
      const int rot = kRot[r % 8];
      x1 = (x1 << rot) | (x1 >> (64 - rot));
      x1 ^= x0;
      if (r % 4 == 3) {
        const std::uint64_t d = static_cast<std::uint64_t>(r / 4 + 1);
        x0 += ks[d % 3];
        x1 += ks[(d + 1) % 3] + d;
      }
    }
    return {x0, x1};
  }
};

// Substream domains keep unrelated parts of a simulation decorrelated.
enum class Domain : std::uint64_t {
  herald = 1,
  role,
  pair_state,
  eve_round1,
  check_round1,
  message_bit,
  shuffle,
  transmit,
  eve_round2,
  check_round2,
  decode,
  generic,
};

// One logical substream: key = (seed, domain), counter = (index, draw#).
class Stream {
 public:
  Stream(std::uint64_t seed, Domain domain, std::uint64_t index)
      : key_{seed, static_cast<std::uint64_t>(domain)}, index_(index) {}

  std::uint64_t next_u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto out = Threefry2x64::block(key_, {index_, draw_++});
    spare_ = out[1];
    have_spare_ = true;
    return out[0];
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform in [0, n) without modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t index_;
  std::uint64_t draw_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

}  // namespace diqsdc::rng
