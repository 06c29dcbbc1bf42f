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

#include "diqsdc/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace diqsdc::io {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw IoError("csv: missing header row");
  table.header = split(trim(line), ',');
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != table.header.size()) {
      throw IoError("csv: row width differs from header");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw IoError("csv: non-numeric cell '" + cell + "'");
      row.push_back(v);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<std::pair<std::string, std::string>> parse_key_value(
    const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw IoError("config line " + std::to_string(line_no) +
                    ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw IoError("config line " + std::to_string(line_no) +
                    ": empty key or value");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::string line_plot_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label,
                          std::span<const Series> series) {
  constexpr double kWidth = 720.0, kHeight = 480.0;
  constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!(x_min < x_max)) { x_min = 0.0; x_max = 1.0; }
  if (!(y_min < y_max)) { y_min -= 0.5; y_max += 0.5; }

  const auto px = [&](double x) {
    return kLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  const auto py = [&](double y) {
    return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // Axes and ticks.
  out << "<g stroke=\"black\" fill=\"none\">"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h << "\"/>"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\"/></g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double fx = x_min + (x_max - x_min) * t / 5.0;
    const double fy = y_min + (y_max - y_min) * t / 5.0;
    out << "<text x=\"" << px(fx) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << format_number(fx) << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\">" << format_number(fy) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kTop + plot_h / 2 << ")\">" << y_label << "</text>\n</g>\n";

  double legend_y = kTop + 10.0;
  for (const Series& s : series) {
    bool pen_down = false;
    std::string path;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      path += pen_down ? " L " : " M ";
      path += format_number(px(x)) + " " + format_number(py(y));
      pen_down = true;
    }
    out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\"/>\n";
    out << "<line x1=\"" << kLeft + plot_w - 150 << "\" y1=\"" << legend_y
        << "\" x2=\"" << kLeft + plot_w - 126 << "\" y2=\"" << legend_y
        << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"/>"
        << "<text x=\"" << kLeft + plot_w - 120 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label
        << "</text>\n";
    legend_y += 18.0;
  }
  out << "</svg>\n";
  return out.str();
}

namespace {

void check_section(std::ostream& out, const char* name,
                   const protocol::SecurityCheckStats& st, bool aborted) {
  out << name << ":\n"
      << "  samples: " << st.n_checks << "\n"
      << "  discarded_basis_rounds: " << st.n_discarded << "\n"
      << "  sufficient: " << (st.sufficient ? "true" : "false") << "\n";
  if (st.sufficient) {
    out << "  s_hat: " << format_number(st.s_hat) << "\n"
        << "  s_se: " << format_number(st.s_se) << "\n"
        << "  qb_hat: " << format_number(st.qb_hat) << "\n"
        << "  qb_se: " << format_number(st.qb_se) << "\n"
        << "  qp_hat: " << format_number(st.qp_hat) << "\n"
        << "  qp_se: " << format_number(st.qp_se) << "\n"
        << "  q_sum_hat: " << format_number(st.q_sum_hat) << "\n"
        << "  q_sum_se: " << format_number(st.q_sum_se) << "\n";
  }
  out << "  aborted: " << (aborted ? "true" : "false") << "\n";
}

}  // namespace

std::string format_run_report(const protocol::RunReport& report,
                              const protocol::ProtocolConfig& config) {
  const analytics::SystemParams& p = config.params;
  std::ostringstream out;
  out << "run_report:\n"
      << "  pulses: " << report.pulses << "\n"
      << "  seed: " << config.seed << "\n"
      << "  check_fraction: " << format_number(config.check_fraction) << "\n";
  out << "channel:\n"
      << "  fidelity: " << format_number(p.fidelity) << "\n"
      << "  eta_local: " << format_number(p.eta_local()) << "\n"
      << "  eta_transmission: " << format_number(p.eta_total()) << "\n"
      << "  distance_km: " << format_number(p.distance_km) << "\n"
      << "  vbs_transmittance: " << format_number(p.vbs_transmittance) << "\n";
  out << "eve:\n  strategy: ";
  switch (config.eve.strategy) {
    case protocol::EveStrategy::none: out << "none\n"; break;
    case protocol::EveStrategy::intercept_fixed_z:
      out << "intercept-fixed-z\n";
      break;
    case protocol::EveStrategy::intercept_random_zx:
      out << "intercept-random-zx\n";
      break;
  }
  out << "  round1_fraction: " << format_number(config.eve.round1_fraction)
      << "\n  round2_fraction: " << format_number(config.eve.round2_fraction)
      << "\n";
  out << "distribution:\n"
      << "  heralded_pairs: " << report.heralded << "\n"
      << "  expected_heralded: "
      << format_number(static_cast<double>(report.pulses) *
                       analytics::heralding_success_probability(
                           p.vbs_transmittance, p.eta_total()))
      << "\n"
      << "  check1: " << report.check1_count << "\n"
      << "  check2: " << report.check2_count << "\n"
      << "  message: " << report.message_count << "\n";
  check_section(out, "round1_check", report.round1, report.aborted_round1);
  check_section(out, "round2_check", report.round2, report.aborted_round2);
  const std::uint64_t decoded = report.decoded_bits.size();
  out << "message_transfer:\n"
      << "  decoded: " << decoded << "\n"
      << "  lost: " << report.lost_messages << "\n"
      << "  bit_errors: " << report.bit_errors << "\n";
  if (decoded > 0) {
    out << "  survivor_error_rate: "
        << format_number(static_cast<double>(report.bit_errors) /
                         static_cast<double>(decoded))
        << "\n";
  }
  if (report.message_count > 0) {
    out << "  loss_rate: "
        << format_number(static_cast<double>(report.lost_messages) /
                         static_cast<double>(report.message_count))
        << "\n";
  }
  out << "leakage_audit:\n"
      << "  eve_round1_hits: " << report.leak.eve_round1_hits << "\n"
      << "  eve_round2_hits: " << report.leak.eve_round2_hits << "\n"
      << "  matched_pairs: " << report.leak.matched_pairs << "\n"
      << "  matched_fraction: " << format_number(report.leak.matched_fraction)
      << "\n"
      << "  chi_bound: " << format_number(report.leak.chi_bound) << "\n";
  const char* status = report.aborted_round1   ? "aborted_round1"
                       : report.aborted_round2 ? "aborted_round2"
                                               : "ok";
  out << "summary: status=" << status;
  if (report.round1.sufficient) {
    out << " s1_hat=" << format_number(report.round1.s_hat);
  }
  if (report.round2.sufficient) {
    out << " s2_hat=" << format_number(report.round2.s_hat);
  }
  out << " heralded=" << report.heralded << "\n";
  return out.str();
}

}  // namespace diqsdc::io
