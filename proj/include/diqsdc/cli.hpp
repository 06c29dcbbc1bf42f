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

#include <optional>
#include <ostream>
#include <string>

#include "diqsdc/protocol_sim.hpp"

namespace diqsdc::cli {

// Exit codes: 0 success, 1 protocol abort, 2 invalid configuration,
// 3 I/O failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAborted = 1;
inline constexpr int kExitBadConfig = 2;
inline constexpr int kExitIoError = 3;

struct CliConfig {
  protocol::ProtocolConfig run;
  std::string out_dir;  // empty: print-only commands write no files
  bool write_svg = false;
  double svg_log_floor = -2.0;  // clip for log-scale plots
  // Distance grid; subcommands fall back to their own defaults when unset.
  std::optional<double> l_min, l_max, l_step;
  int purify_rounds = 5;
  double maxdist_tol_km = 1e-3;
};

// Applies a flat key=value file on top of `config`. Unknown keys and
// malformed values throw std::invalid_argument.
void apply_config_file(CliConfig& config, const std::string& path);
void apply_config_text(CliConfig& config, const std::string& text);

// Subcommand bodies. Normal output goes to `out`; files go under
// config.out_dir when set.
int cmd_oracle(const CliConfig& config, std::ostream& out);
int cmd_curves(const CliConfig& config, std::ostream& out);
int cmd_simulate(const CliConfig& config, std::ostream& out);
int cmd_sweep(const CliConfig& config, std::ostream& out);
int cmd_maxdist(const CliConfig& config, std::ostream& out);
int cmd_purify(const CliConfig& config, std::ostream& out);

// Runs one subcommand with error mapping: invalid parameters exit 2, I/O
// failures exit 3. Unknown names exit 2.
int dispatch(const std::string& command, const CliConfig& config,
             std::ostream& out, std::ostream& err);

}  // namespace diqsdc::cli
