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

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "diqsdc/channel_analytics.hpp"
#include "diqsdc/protocol_sim.hpp"

namespace diqsdc::io {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numeric table with a header row. CSV serialization uses 12 significant
// digits; zero-capacity logarithms come through as the sentinel "-inf".
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_number(double value);  // %.12g
std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);  // throws IoError on shape errors

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Flat key=value configuration text. '#' starts a comment; blank lines are
// ignored. Returns pairs in file order; duplicate keys are allowed, last one
// wins at application time.
std::vector<std::pair<std::string, std::string>> parse_key_value(
    const std::string& text);

// Minimal static line plot.
struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;  // non-finite y are skipped
};

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          std::span<const Series> series);

// Structured-text serialization of a protocol run.
std::string format_run_report(const protocol::RunReport& report,
                              const protocol::ProtocolConfig& config);

}  // namespace diqsdc::io
