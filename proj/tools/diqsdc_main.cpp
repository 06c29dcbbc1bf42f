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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "diqsdc/cli.hpp"
#include "diqsdc/report_io.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed, pulses;
  std::optional<double> distance, fidelity, eta_c, eta_m, eta_d, vbs_t, alpha,
      rep_rate, spdc_p, eve_f, eve_g, check_fraction, l_min, l_max, l_step,
      tol_km;
  std::optional<std::string> out_dir, eve_strategy;
  std::optional<int> purify_rounds;
  bool svg = false;
};

int apply_flags(const Flags& f, diqsdc::cli::CliConfig& cfg,
                std::ostream& err) {
  try {
    if (!f.config_path.empty()) {
      diqsdc::cli::apply_config_file(cfg, f.config_path);
    }
  } catch (const diqsdc::io::IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return diqsdc::cli::kExitIoError;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return diqsdc::cli::kExitBadConfig;
  }
  auto& p = cfg.run.params;
  if (f.seed) cfg.run.seed = *f.seed;
  if (f.pulses) p.pulses = *f.pulses;
  if (f.distance) p.distance_km = *f.distance;
  if (f.fidelity) p.fidelity = *f.fidelity;
  if (f.eta_c) p.eta_coupling = *f.eta_c;
  if (f.eta_m) p.eta_memory = *f.eta_m;
  if (f.eta_d) p.eta_detector = *f.eta_d;
  if (f.vbs_t) p.vbs_transmittance = *f.vbs_t;
  if (f.alpha) p.alpha_db_per_km = *f.alpha;
  if (f.rep_rate) p.rep_rate_hz = *f.rep_rate;
  if (f.spdc_p) p.spdc_pair_probability = *f.spdc_p;
  if (f.check_fraction) cfg.run.check_fraction = *f.check_fraction;
  if (f.eve_f) cfg.run.eve.round1_fraction = *f.eve_f;
  if (f.eve_g) cfg.run.eve.round2_fraction = *f.eve_g;
  if (f.eve_strategy) {
    if (*f.eve_strategy == "none") {
      cfg.run.eve.strategy = diqsdc::protocol::EveStrategy::none;
    } else if (*f.eve_strategy == "fixed-z") {
      cfg.run.eve.strategy = diqsdc::protocol::EveStrategy::intercept_fixed_z;
    } else if (*f.eve_strategy == "random-zx") {
      cfg.run.eve.strategy = diqsdc::protocol::EveStrategy::intercept_random_zx;
    } else {
      err << "invalid configuration: unknown eve strategy " << *f.eve_strategy
          << "\n";
      return diqsdc::cli::kExitBadConfig;
    }
  }
  // Attack fractions imply interception; default to the fixed-Z attacker.
  if (cfg.run.eve.strategy == diqsdc::protocol::EveStrategy::none &&
      (cfg.run.eve.round1_fraction > 0.0 ||
       cfg.run.eve.round2_fraction > 0.0)) {
    cfg.run.eve.strategy = diqsdc::protocol::EveStrategy::intercept_fixed_z;
  }
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.svg) cfg.write_svg = true;
  if (f.l_min) cfg.l_min = *f.l_min;
  if (f.l_max) cfg.l_max = *f.l_max;
  if (f.l_step) cfg.l_step = *f.l_step;
  if (f.purify_rounds) cfg.purify_rounds = *f.purify_rounds;
  if (f.tol_km) cfg.maxdist_tol_km = *f.tol_km;
  return diqsdc::cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "diqsdc: simulator and numerical toolkit for heralded "
      "device-independent quantum secure direct communication"};
  app.require_subcommand(1);

  Flags f;
  app.add_option("--config", f.config_path, "key=value parameter file");
  app.add_option("--seed", f.seed, "root seed of the run");
  app.add_option("--pulses", f.pulses, "source pulses per run");
  app.add_option("--distance-km", f.distance, "Alice-Bob distance");
  app.add_option("--fidelity", f.fidelity, "post-distribution |phi+> fidelity");
  app.add_option("--eta-coupling", f.eta_c, "photon-fiber coupling efficiency");
  app.add_option("--eta-memory", f.eta_m, "quantum memory efficiency");
  app.add_option("--eta-detector", f.eta_d, "detector efficiency");
  app.add_option("--vbs-t", f.vbs_t, "variable beam splitter transmittance");
  app.add_option("--alpha", f.alpha, "fiber attenuation, dB/km");
  app.add_option("--rep-rate", f.rep_rate, "source repetition rate, Hz");
  app.add_option("--spdc-p", f.spdc_p,
                 "pair probability of the SPDC baseline source");
  app.add_option("--check-fraction", f.check_fraction,
                 "fraction of pairs used per security check");
  app.add_option("--eve-f", f.eve_f, "attacked fraction, distribution round");
  app.add_option("--eve-g", f.eve_g, "attacked fraction, encoded round");
  app.add_option("--eve-strategy", f.eve_strategy,
                 "none, fixed-z or random-zx");
  app.add_option("--out", f.out_dir, "output directory for files");
  app.add_flag("--svg", f.svg, "also write SVG plots (curves)");
  app.add_option("--l-min", f.l_min, "distance grid start, km");
  app.add_option("--l-max", f.l_max, "distance grid end, km");
  app.add_option("--l-step", f.l_step, "distance grid step, km");
  app.add_option("--rounds", f.purify_rounds, "purification rounds (purify)");
  app.add_option("--tol-km", f.tol_km, "bisection tolerance (maxdist)");

  const char* kCommands[] = {"oracle", "curves", "simulate",
                             "sweep",  "maxdist", "purify"};
  const char* kDescriptions[] = {
      "compare the exact optics oracle with the heralding formula",
      "closed-form capacity/efficiency curves over distance (CSV/SVG)",
      "one Monte Carlo protocol run with a full report",
      "Monte Carlo runs over a distance grid (CSV)",
      "solve for the zero-capacity distance of both protocol variants",
      "entanglement-purification schedule and purified capacity"};
  for (std::size_t i = 0; i < std::size(kCommands); ++i) {
    app.add_subcommand(kCommands[i], kDescriptions[i])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return diqsdc::cli::kExitBadConfig;
  }

  diqsdc::cli::CliConfig cfg;
  const int rc = apply_flags(f, cfg, std::cerr);
  if (rc != diqsdc::cli::kExitOk) return rc;
  const std::string command = app.get_subcommands().front()->get_name();
  return diqsdc::cli::dispatch(command, cfg, std::cout, std::cerr);
}
