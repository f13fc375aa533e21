// Copyright 2026 The hrtf-forge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV, SVG and JSON emission for LSD comparisons. Everything is formatted
// with fixed precision so identical inputs give identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/mesh_io.hpp"
#include "hrtf_forge/metrics.hpp"
#include "json.hpp"

namespace hforge::metrics {

namespace {

std::string num(double v, const char* fmt = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string label_of(const ComparisonReport& r, std::size_t i) {
  const auto it = r.metadata.find("label");
  return it != r.metadata.end() ? it->second : "condition " + std::to_string(i + 1);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void check_reports(const std::vector<ComparisonReport>& reports) {
  if (reports.empty()) throw InvalidArgument("report: at least one comparison required");
  for (const ComparisonReport& r : reports)
    if (r.lsd.frequencies != reports[0].lsd.frequencies)
      throw InvalidArgument("report: conditions must share one frequency grid");
}

}  // namespace

std::string format_lsd_csv(const std::vector<ComparisonReport>& reports) {
  check_reports(reports);
  std::string out = "frequency_hz";
  for (std::size_t i = 0; i < reports.size(); ++i) out += "," + csv_field(label_of(reports[i], i));
  out += "\n";
  const auto& freqs = reports[0].lsd.frequencies;
  for (std::size_t f = 0; f < freqs.size(); ++f) {
    out += num(freqs[f]);
    for (const ComparisonReport& r : reports) out += "," + num(r.lsd.lsd_db[f]);
    out += "\n";
  }
  return out;
}

std::string format_lsd_svg(const std::vector<ComparisonReport>& reports) {
  check_reports(reports);
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  const double x0 = 90, x1 = 960, y0 = 40, y1 = 520;  // plot area
  const auto& freqs = reports[0].lsd.frequencies;
  double fmin = freqs.front(), fmax = freqs.back();
  if (fmax <= fmin) fmin /= 1.5, fmax *= 1.5;
  double ymax = 0.0;
  for (const ComparisonReport& r : reports)
    for (double v : r.lsd.lsd_db) ymax = std::max(ymax, v);
  const double ystep = ymax <= 5 ? 1.0 : ymax <= 20 ? 2.0 : 5.0;
  ymax = std::max(1.0, std::ceil(ymax / ystep) * ystep);
  const double lmin = std::log10(fmin), lmax = std::log10(fmax);
  auto px = [&](double f) { return x0 + (std::log10(f) - lmin) / (lmax - lmin) * (x1 - x0); };
  auto py = [&](double v) { return y1 - v / ymax * (y1 - y0); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 1000 600\" width=\"1000\" height=\"600\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"1000\" height=\"600\" fill=\"white\"/>\n";
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y1) + "\"/>\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) + "\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
  // Decade ticks with 2 and 5 subdivisions.
  for (int dec = static_cast<int>(std::floor(lmin)); dec <= static_cast<int>(std::ceil(lmax)); ++dec)
    for (int m : {1, 2, 5}) {
      const double f = m * std::pow(10.0, dec);
      if (f < fmin * (1 - 1e-9) || f > fmax * (1 + 1e-9)) continue;
      const std::string x = num(px(f), "%.2f");
      s += "<line x1=\"" + x + "\" y1=\"" + num(y1) + "\" x2=\"" + x + "\" y2=\"" + num(y1 + 6) + "\" stroke=\"black\"/>\n";
      s += "<text x=\"" + x + "\" y=\"" + num(y1 + 20) + "\" text-anchor=\"middle\">" + num(f, "%g") + "</text>\n";
    }
  for (double v = 0.0; v <= ymax + 1e-9; v += ystep) {
    const std::string y = num(py(v), "%.2f");
    s += "<line x1=\"" + num(x0 - 6) + "\" y1=\"" + y + "\" x2=\"" + num(x0) + "\" y2=\"" + y + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x0 - 10) + "\" y=\"" + y + "\" text-anchor=\"end\" dominant-baseline=\"middle\">" +
         num(v, "%g") + "</text>\n";
  }
  s += "<text x=\"" + num(0.5 * (x0 + x1)) + "\" y=\"570\" text-anchor=\"middle\" font-size=\"14\">Frequency (Hz)</text>\n";
  s += "<text x=\"25\" y=\"" + num(0.5 * (y0 + y1)) +
       "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 25 " + num(0.5 * (y0 + y1)) +
       ")\">LSD (dB)</text>\n";
  s += "</g>\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const char* color = colors[i % 8];
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"";
    for (std::size_t f = 0; f < freqs.size(); ++f) {
      if (f) s += " ";
      s += num(px(freqs[f]), "%.2f") + "," + num(py(reports[i].lsd.lsd_db[f]), "%.2f");
    }
    s += "\"/>\n";
    const double ly = y0 + 10 + 20.0 * static_cast<double>(i);
    s += "<line x1=\"" + num(x1 - 190) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(x1 - 160) + "\" y2=\"" + num(ly) +
         "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(x1 - 150) + "\" y=\"" + num(ly) +
         "\" font-family=\"sans-serif\" font-size=\"12\" dominant-baseline=\"middle\">" +
         xml_escape(label_of(reports[i], i)) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string format_report_json(const std::vector<ComparisonReport>& reports) {
  check_reports(reports);
  using Json = nlohmann::ordered_json;
  Json arr = Json::array();
  for (const ComparisonReport& r : reports) {
    Json j;
    j["metadata"] = Json::object();
    for (const auto& [k, v] : r.metadata) j["metadata"][k] = v;
    j["lsd_summary_db"] = r.lsd.summary_db;
    j["frequencies_hz"] = r.lsd.frequencies;
    j["lsd_db"] = r.lsd.lsd_db;
    Json dirs = Json::array();
    for (std::size_t d = 0; d < r.directions.size(); ++d) {
      Json e;
      e["az"] = r.directions[d].azimuth_deg;
      e["el"] = r.directions[d].elevation_deg;
      e["lsd_mean_db"] = r.direction_lsd[d].mean_db;
      e["lsd_max_db"] = r.direction_lsd[d].max_db;
      if (d < r.ild_delta_db.size()) e["ild_delta_db"] = r.ild_delta_db[d];
      if (d < r.itd_delta_s.size()) e["itd_delta_s"] = r.itd_delta_s[d];
      dirs.push_back(std::move(e));
    }
    j["directions"] = std::move(dirs);
    arr.push_back(std::move(j));
  }
  return arr.dump(1) + "\n";
}

void emit_report(const std::vector<ComparisonReport>& reports, const std::filesystem::path& out_dir) {
  check_reports(reports);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error("report: cannot create " + out_dir.string() + ": " + ec.message());
  write_file(out_dir / "lsd.csv", format_lsd_csv(reports));
  write_file(out_dir / "lsd.svg", format_lsd_svg(reports));
  write_file(out_dir / "report.json", format_report_json(reports));
}

}  // namespace hforge::metrics
