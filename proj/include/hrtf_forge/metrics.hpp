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

#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hrtf_forge/hrtf.hpp"

namespace hforge::metrics {

struct LsdCurve {
  std::vector<double> frequencies;  // band bins with at least one usable value
  std::vector<double> lsd_db;       // RMS over directions and ears
  // Band RMS per (direction, ear): row = direction, column = ear.
  std::vector<std::array<double, 2>> per_direction;
  double summary_db = 0.0;          // RMS of lsd_db over the band
  std::size_t excluded_values = 0;  // (direction, ear, bin) entries with |H| < 1e-12
};

/// Log-spectral distortion on bins in [f_lo, f_hi]. Grids must match
/// exactly (InvalidArgument); use resample_to_common_grid first.
LsdCurve lsd(const HrtfSet& test, const HrtfSet& ref, double f_lo = 200.0, double f_hi = 15000.0);

/// Pointwise mean over curves on identical grids. Bitwise independent of
/// the input order.
LsdCurve average_lsd(const std::vector<LsdCurve>& curves);

enum class ItdMethod { CrossCorrelation, ThresholdOnset };

struct ItdResult {
  std::vector<double> seconds;  // positive: left leads
  std::vector<bool> reliable;   // false when the correlation peaks at the lag window edge
};

/// Needs impulse responses (hrtf_to_hrir). Cross-correlation uses a
/// zero-phase 4th-order Butterworth low-pass (2nd order, forward and
/// backward), a +-1 ms lag window and parabolic peak refinement.
ItdResult itd(const HrtfSet& set, ItdMethod method = ItdMethod::CrossCorrelation, double lowpass_hz = 3000.0);

/// 10 log10(sum |H_L|^2 / sum |H_R|^2) over bins in [f_lo, f_hi].
/// InvalidArgument when the grid does not cover the band, NumericalError on
/// zero energy.
std::vector<double> ild(const HrtfSet& set, double f_lo, double f_hi);

struct ResampleResult {
  HrtfSet a, b;  // shared directions (a's order) and frequencies
  std::size_t unmatched_a = 0, unmatched_b = 0;
  std::size_t dropped_bins_a = 0, dropped_bins_b = 0;  // bins outside the common grid
};

/// Linear interpolation of real and imaginary parts onto the coarser
/// grid's bins inside the overlap; directions paired by great-circle
/// nearest neighbour within `tolerance_deg`. Impulse responses of matched
/// directions are carried over unchanged. InvalidArgument when no band or
/// no direction overlaps.
ResampleResult resample_to_common_grid(const HrtfSet& a, const HrtfSet& b, double tolerance_deg = 2.0);

struct CompareConfig {
  double lsd_lo = 200.0, lsd_hi = 15000.0;
  double ild_lo = 200.0, ild_hi = 15000.0;
  ItdMethod itd_method = ItdMethod::CrossCorrelation;
  double lowpass_hz = 3000.0;
  double direction_tolerance_deg = 2.0;
};

struct DirectionStats {
  double mean_db = 0.0, max_db = 0.0;  // over ears, band RMS values
};

struct ComparisonReport {
  LsdCurve lsd;
  std::vector<Direction> directions;  // matched directions
  std::vector<DirectionStats> direction_lsd;
  std::vector<double> itd_delta_s;    // test - ref; empty without impulse responses
  std::vector<double> ild_delta_db;   // test - ref
  std::map<std::string, std::string> metadata;
};

/// Bands are clipped to the common frequency range.
ComparisonReport compare(const HrtfSet& test, const HrtfSet& ref, const CompareConfig& cfg = {},
                         const std::map<std::string, std::string>& metadata = {});

/// Writes lsd.csv, lsd.svg and report.json into out_dir. Conditions are
/// named by metadata "label" (else "condition N"); curves must share one
/// frequency grid. Throws InvalidArgument or Error on I/O failure.
void emit_report(const std::vector<ComparisonReport>& reports, const std::filesystem::path& out_dir);

std::string format_lsd_csv(const std::vector<ComparisonReport>& reports);
std::string format_lsd_svg(const std::vector<ComparisonReport>& reports);
std::string format_report_json(const std::vector<ComparisonReport>& reports);

}  // namespace hforge::metrics
