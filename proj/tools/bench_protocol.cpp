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

// Benchmark of the OpenMP kernels against the serial reference path. The two
// must produce identical outputs; this also re-checks that while timing.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "diqsdc/channel_analytics.hpp"
#include "diqsdc/protocol_sim.hpp"

namespace {

using diqsdc::Exec;

double seconds(const std::chrono::steady_clock::time_point t0) {
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

template <typename Fn>
double time_best_of(int repeats, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, seconds(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t pulses =
      argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 2'000'000ull;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;

#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel == serial\n");
#endif

  diqsdc::protocol::ProtocolConfig cfg;
  cfg.params.pulses = pulses;
  cfg.params.distance_km = 1.0;
  cfg.seed = 42;

  diqsdc::protocol::RunReport serial_report, parallel_report;
  const double t_serial = time_best_of(repeats, [&] {
    serial_report = diqsdc::protocol::run_protocol(cfg, Exec::serial);
  });
  const double t_parallel = time_best_of(repeats, [&] {
    parallel_report = diqsdc::protocol::run_protocol(cfg, Exec::parallel);
  });
  if (!(serial_report == parallel_report)) {
    std::printf("FAIL: serial and parallel protocol reports differ\n");
    return 1;
  }
  std::printf("run_protocol  pulses=%llu  serial %.3fs  parallel %.3fs  "
              "speedup %.2fx  (reports identical)\n",
              static_cast<unsigned long long>(pulses), t_serial, t_parallel,
              t_serial / t_parallel);

  diqsdc::analytics::SystemParams params;
  std::vector<diqsdc::analytics::CurveRow> rows_serial, rows_parallel;
  const double grid_step = 1e-4;
  const double t_sweep_serial = time_best_of(repeats, [&] {
    rows_serial =
        diqsdc::analytics::sweep_curves(params, 0.0, 8.0, grid_step,
                                        Exec::serial);
  });
  const double t_sweep_parallel = time_best_of(repeats, [&] {
    rows_parallel =
        diqsdc::analytics::sweep_curves(params, 0.0, 8.0, grid_step,
                                        Exec::parallel);
  });
  bool same = rows_serial.size() == rows_parallel.size();
  for (std::size_t i = 0; same && i < rows_serial.size(); ++i) {
    same = rows_serial[i].cs == rows_parallel[i].cs &&
           rows_serial[i].es == rows_parallel[i].es &&
           rows_serial[i].qt == rows_parallel[i].qt;
  }
  if (!same) {
    std::printf("FAIL: serial and parallel sweep rows differ\n");
    return 1;
  }
  std::printf("sweep_curves  rows=%zu     serial %.3fs  parallel %.3fs  "
              "speedup %.2fx  (rows identical)\n",
              rows_serial.size(), t_sweep_serial, t_sweep_parallel,
              t_sweep_serial / t_sweep_parallel);
  return 0;
}
