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

#include "hrtf_forge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hrtf_forge/error.hpp"

namespace hforge::metrics {

namespace {

constexpr double kTiny = 1e-12;

bool in_band(double f, double lo, double hi) { return f >= lo * (1 - 1e-12) && f <= hi * (1 + 1e-12); }

// Mean of offsets from the minimum, summed in sorted order: independent of
// input order and exact when all inputs are equal.
double ordered_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x - v.front();
  return v.front() + s / static_cast<double>(v.size());
}

// RBJ biquad low-pass with Q = 1/sqrt(2) (2nd-order Butterworth).
void lowpass_inplace(std::vector<double>& x, double cutoff, double fs) {
  const double w0 = 2.0 * std::numbers::pi * cutoff / fs;
  const double alpha = std::sin(w0) / std::sqrt(2.0), cw = std::cos(w0);
  const double a0 = 1.0 + alpha;
  const double b0 = (1.0 - cw) / 2.0 / a0, b1 = (1.0 - cw) / a0, b2 = b0;
  const double a1 = -2.0 * cw / a0, a2 = (1.0 - alpha) / a0;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (double& v : x) {
    const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

std::vector<double> zero_phase_lowpass(const double* h, int n, double cutoff, double fs) {
  std::vector<double> x(h, h + n);
  if (cutoff <= 0.0 || cutoff >= 0.5 * fs) return x;
  lowpass_inplace(x, cutoff, fs);
  std::reverse(x.begin(), x.end());
  lowpass_inplace(x, cutoff, fs);
  std::reverse(x.begin(), x.end());
  return x;
}

double angle_between_deg(const Direction& a, const Direction& b) {
  const double c = std::clamp(direction_vector(a).dot(direction_vector(b)), -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

Complex interpolate(const HrtfSet& s, std::size_t d, Ear e, double f) {
  const auto& fr = s.frequencies;
  const auto it = std::lower_bound(fr.begin(), fr.end(), f);
  const std::size_t i = static_cast<std::size_t>(it - fr.begin());
  if (it != fr.end() && *it == f) return s.at(d, e, i);
  if (i == 0 || i == fr.size()) throw InvalidArgument("resample: frequency outside the grid");
  const double t = (f - fr[i - 1]) / (fr[i] - fr[i - 1]);
  const Complex lo = s.at(d, e, i - 1), hi = s.at(d, e, i);
  return lo + t * (hi - lo);
}

}  // namespace

LsdCurve lsd(const HrtfSet& test, const HrtfSet& ref, double f_lo, double f_hi) {
  if (test.frequencies != ref.frequencies || test.directions != ref.directions)
    throw InvalidArgument("lsd: sets must share frequency and direction grids (resample first)");
  if (!(f_lo < f_hi)) throw InvalidArgument("lsd: f_lo must be below f_hi");
  test.check();
  ref.check();
  const std::size_t dirs = test.direction_count();
  LsdCurve out;
  std::vector<std::array<double, 2>> sum_sq(dirs, {0.0, 0.0});
  std::vector<std::array<std::size_t, 2>> counts(dirs, {0, 0});
  for (std::size_t f = 0; f < test.frequency_count(); ++f) {
    if (!in_band(test.frequencies[f], f_lo, f_hi)) continue;
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t d = 0; d < dirs; ++d)
      for (Ear e : {Ear::Left, Ear::Right}) {
        const double a = std::abs(test.at(d, e, f)), b = std::abs(ref.at(d, e, f));
        if (b < kTiny || a < kTiny) {
          ++out.excluded_values;
          continue;
        }
        const double db = 20.0 * std::log10(a / b);
        acc += db * db;
        ++used;
        sum_sq[d][static_cast<int>(e)] += db * db;
        ++counts[d][static_cast<int>(e)];
      }
    if (used == 0) continue;
    out.frequencies.push_back(test.frequencies[f]);
    out.lsd_db.push_back(std::sqrt(acc / static_cast<double>(used)));
  }
  if (out.frequencies.empty()) throw InvalidArgument("lsd: no usable bins in the band");
  out.per_direction.resize(dirs);
  for (std::size_t d = 0; d < dirs; ++d)
    for (int e = 0; e < 2; ++e)
      out.per_direction[d][e] = counts[d][e] ? std::sqrt(sum_sq[d][e] / static_cast<double>(counts[d][e])) : 0.0;
  double s = 0.0;
  for (double v : out.lsd_db) s += v * v;
  out.summary_db = std::sqrt(s / static_cast<double>(out.lsd_db.size()));
  return out;
}

LsdCurve average_lsd(const std::vector<LsdCurve>& curves) {
  if (curves.empty()) throw InvalidArgument("average_lsd: no curves");
  for (const LsdCurve& c : curves)
    if (c.frequencies != curves[0].frequencies) throw InvalidArgument("average_lsd: frequency grids differ");
  LsdCurve out;
  out.frequencies = curves[0].frequencies;
  std::vector<double> column(curves.size());
  for (std::size_t f = 0; f < out.frequencies.size(); ++f) {
    for (std::size_t i = 0; i < curves.size(); ++i) column[i] = curves[i].lsd_db[f];
    out.lsd_db.push_back(ordered_mean(column));
  }
  bool same_dirs = true;
  for (const LsdCurve& c : curves) same_dirs &= c.per_direction.size() == curves[0].per_direction.size();
  if (same_dirs) {
    out.per_direction.resize(curves[0].per_direction.size());
    for (std::size_t d = 0; d < out.per_direction.size(); ++d)
      for (int e = 0; e < 2; ++e) {
        for (std::size_t i = 0; i < curves.size(); ++i) column[i] = curves[i].per_direction[d][e];
        out.per_direction[d][e] = ordered_mean(column);
      }
  }
  for (const LsdCurve& c : curves) out.excluded_values += c.excluded_values;
  double s = 0.0;
  for (double v : out.lsd_db) s += v * v;
  out.summary_db = std::sqrt(s / static_cast<double>(out.lsd_db.size()));
  return out;
}

ItdResult itd(const HrtfSet& set, ItdMethod method, double lowpass_hz) {
  if (!set.has_hrir()) throw InvalidArgument("itd: impulse responses missing (run hrtf_to_hrir)");
  set.check();
  const int n = set.taps;
  const double fs = set.sample_rate;
  ItdResult out;
  for (std::size_t d = 0; d < set.direction_count(); ++d) {
    const double* hl = set.impulse(d, Ear::Left);
    const double* hr = set.impulse(d, Ear::Right);
    if (method == ItdMethod::ThresholdOnset) {
      auto onset = [&](const double* h) {
        double peak = 0.0;
        for (int t = 0; t < n; ++t) peak = std::max(peak, std::abs(h[t]));
        for (int t = 0; t < n; ++t)
          if (std::abs(h[t]) >= 0.1 * peak && peak > 0.0) return t;
        return 0;
      };
      out.seconds.push_back((onset(hr) - onset(hl)) / fs);
      out.reliable.push_back(true);
      continue;
    }
    const std::vector<double> l = zero_phase_lowpass(hl, n, lowpass_hz, fs);
    const std::vector<double> r = zero_phase_lowpass(hr, n, lowpass_hz, fs);
    const int window = std::min(n - 1, static_cast<int>(std::ceil(1e-3 * fs)));
    // c[lag] = sum_t l[t] r[t + lag]; right delayed by +lag means left leads.
    std::vector<double> c(2 * window + 1, 0.0);
    for (int lag = -window; lag <= window; ++lag) {
      double s = 0.0;
      for (int t = std::max(0, -lag); t < std::min(n, n - lag); ++t) s += l[t] * r[t + lag];
      c[lag + window] = s;
    }
    const int best = static_cast<int>(std::max_element(c.begin(), c.end()) - c.begin());
    double offset = 0.0;
    if (best > 0 && best < 2 * window) {
      const double y0 = c[best - 1], y1 = c[best], y2 = c[best + 1];
      const double denom = y0 - 2.0 * y1 + y2;
      if (denom < 0.0) offset = 0.5 * (y0 - y2) / denom;
    }
    const bool degenerate = c[best] <= 0.0;
    out.seconds.push_back(degenerate ? 0.0 : (best - window + offset) / fs);
    out.reliable.push_back(!degenerate && best != 0 && best != 2 * window);
  }
  return out;
}

std::vector<double> ild(const HrtfSet& set, double f_lo, double f_hi) {
  set.check();
  if (set.frequencies.empty() || !(f_lo <= f_hi)) throw InvalidArgument("ild: empty band");
  if (f_lo < set.frequencies.front() * (1 - 1e-12) || f_hi > set.frequencies.back() * (1 + 1e-12))
    throw InvalidArgument("ild: frequency grid does not cover the band");
  std::vector<double> out;
  for (std::size_t d = 0; d < set.direction_count(); ++d) {
    double el = 0.0, er = 0.0;
    for (std::size_t f = 0; f < set.frequency_count(); ++f) {
      if (!in_band(set.frequencies[f], f_lo, f_hi)) continue;
      el += std::norm(set.at(d, Ear::Left, f));
      er += std::norm(set.at(d, Ear::Right, f));
    }
    if (el <= 0.0 || er <= 0.0) throw NumericalError("ild: zero energy in band at direction " + std::to_string(d));
    out.push_back(10.0 * std::log10(el / er));
  }
  return out;
}

ResampleResult resample_to_common_grid(const HrtfSet& a, const HrtfSet& b, double tolerance_deg) {
  a.check();
  b.check();
  if (a.frequencies.empty() || b.frequencies.empty()) throw InvalidArgument("resample: empty frequency grid");
  const double lo = std::max(a.frequencies.front(), b.frequencies.front());
  const double hi = std::min(a.frequencies.back(), b.frequencies.back());
  if (lo > hi) throw InvalidArgument("resample: frequency ranges do not overlap");
  auto bins_in = [&](const HrtfSet& s) {
    std::vector<double> f;
    for (double x : s.frequencies)
      if (x >= lo && x <= hi) f.push_back(x);
    return f;
  };
  const std::vector<double> fa = bins_in(a), fb = bins_in(b);
  const std::vector<double> target = fb.size() < fa.size() ? fb : fa;  // coarser grid, a on ties
  if (target.empty()) throw InvalidArgument("resample: no bins in the overlapping band");

  ResampleResult out;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<bool> used(b.direction_count(), false);
  for (std::size_t i = 0; i < a.direction_count(); ++i) {
    std::size_t best = b.direction_count();
    double best_angle = tolerance_deg;
    for (std::size_t j = 0; j < b.direction_count(); ++j) {
      if (used[j]) continue;
      const double ang = angle_between_deg(a.directions[i], b.directions[j]);
      if (ang <= best_angle) {
        if (best == b.direction_count() || ang < best_angle) best = j;
        best_angle = ang;
      }
    }
    if (best == b.direction_count()) {
      ++out.unmatched_a;
      continue;
    }
    used[best] = true;
    pairs.emplace_back(i, best);
  }
  out.unmatched_b = b.direction_count() - pairs.size();
  if (pairs.empty()) throw InvalidArgument("resample: no directions matched within tolerance");

  auto count_dropped = [&](const HrtfSet& s) {
    std::size_t kept = 0;
    for (double f : s.frequencies) kept += std::binary_search(target.begin(), target.end(), f);
    return s.frequencies.size() - kept;
  };
  out.dropped_bins_a = count_dropped(a);
  out.dropped_bins_b = count_dropped(b);

  auto build = [&](const HrtfSet& src, bool is_a) {
    HrtfSet s;
    s.radius = src.radius;
    s.frequencies = target;
    for (const auto& [i, j] : pairs) s.directions.push_back(a.directions[i]);
    s.resize_values();
    if (src.has_hrir()) {
      s.sample_rate = src.sample_rate;
      s.taps = src.taps;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const std::size_t d = is_a ? pairs[k].first : pairs[k].second;
      for (Ear e : {Ear::Left, Ear::Right}) {
        for (std::size_t f = 0; f < target.size(); ++f) s.at(k, e, f) = interpolate(src, d, e, target[f]);
        if (src.has_hrir()) s.hrir.insert(s.hrir.end(), src.impulse(d, e), src.impulse(d, e) + src.taps);
      }
    }
    return s;
  };
  out.a = build(a, true);
  out.b = build(b, false);
  return out;
}

ComparisonReport compare(const HrtfSet& test, const HrtfSet& ref, const CompareConfig& cfg,
                         const std::map<std::string, std::string>& metadata) {
  const ResampleResult rs = resample_to_common_grid(test, ref, cfg.direction_tolerance_deg);
  const double f0 = rs.a.frequencies.front(), f1 = rs.a.frequencies.back();
  const double lsd_lo = std::max(cfg.lsd_lo, f0), lsd_hi = std::min(cfg.lsd_hi, f1);
  const double ild_lo = std::max(cfg.ild_lo, f0), ild_hi = std::min(cfg.ild_hi, f1);

  ComparisonReport rep;
  rep.metadata = metadata;
  rep.lsd = lsd(rs.a, rs.b, lsd_lo, std::max(lsd_hi, lsd_lo * (1 + 1e-9)));
  rep.directions = rs.a.directions;
  for (const auto& pd : rep.lsd.per_direction)
    rep.direction_lsd.push_back({0.5 * (pd[0] + pd[1]), std::max(pd[0], pd[1])});
  const std::vector<double> ild_t = ild(rs.a, ild_lo, ild_hi), ild_r = ild(rs.b, ild_lo, ild_hi);
  for (std::size_t d = 0; d < ild_t.size(); ++d) rep.ild_delta_db.push_back(ild_t[d] - ild_r[d]);
  if (rs.a.has_hrir() && rs.b.has_hrir()) {
    const ItdResult it = itd(rs.a, cfg.itd_method, cfg.lowpass_hz), ir = itd(rs.b, cfg.itd_method, cfg.lowpass_hz);
    for (std::size_t d = 0; d < it.seconds.size(); ++d) rep.itd_delta_s.push_back(it.seconds[d] - ir.seconds[d]);
    rep.metadata["itd_method"] = cfg.itd_method == ItdMethod::CrossCorrelation ? "cross-correlation" : "threshold-onset";
  } else {
    rep.metadata["itd_method"] = "unavailable (no impulse responses)";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", rep.lsd.summary_db);
  rep.metadata["lsd_summary_db"] = buf;
  std::snprintf(buf, sizeof buf, "%.10g-%.10g", lsd_lo, lsd_hi);
  rep.metadata["lsd_band_hz"] = buf;
  std::snprintf(buf, sizeof buf, "%.10g-%.10g", ild_lo, ild_hi);
  rep.metadata["ild_band_hz"] = buf;
  rep.metadata["direction_weighting"] = "uniform";
  rep.metadata["matched_directions"] = std::to_string(rep.directions.size());
  rep.metadata["unmatched_test_directions"] = std::to_string(rs.unmatched_a);
  rep.metadata["unmatched_ref_directions"] = std::to_string(rs.unmatched_b);
  rep.metadata["dropped_test_bins"] = std::to_string(rs.dropped_bins_a);
  rep.metadata["dropped_ref_bins"] = std::to_string(rs.dropped_bins_b);
  rep.metadata["excluded_values"] = std::to_string(rep.lsd.excluded_values);
  return rep;
}

}  // namespace hforge::metrics
