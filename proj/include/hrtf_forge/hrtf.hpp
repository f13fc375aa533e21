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

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hrtf_forge/bem.hpp"
#include "hrtf_forge/mesh.hpp"

// Head-related transfer functions on a spherical evaluation grid.
//
// Values use the signal-processing convention: H is the complex conjugate
// of the e^{-i omega t} field ratio p / p_ref, so a pure delay tau appears as
// exp(-i omega tau) and an inverse DFT yields a causal impulse response.
namespace hforge {

using Complex = std::complex<double>;

/// Azimuth counterclockwise from +x (90 deg = +y = left), elevation
/// towards +z.
struct Direction {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  bool operator==(const Direction&) const = default;
};

Vec3 direction_vector(const Direction& d);

struct EvalGrid {
  std::vector<Direction> directions;
  double radius = 1.2;  // m

  /// 5 deg azimuth steps at elevations -30, -15, 0, 15 and 30 deg.
  static EvalGrid default_grid();
  /// Full azimuth ring at one elevation.
  static EvalGrid ring(double step_deg, double elevation_deg, double radius);
  /// Throws ConfigError (azimuth outside [0, 360), elevation outside
  /// [-90, 90], radius <= 0, empty).
  void check() const;
  std::vector<Vec3> points() const;
};

/// {"radius": r, "directions": [{"az": .., "el": ..}, ...]} or
/// {"radius": r, "azimuth_step_deg": s, "elevations_deg": [...]}.
/// Unknown keys are rejected. Throws ConfigError.
EvalGrid parse_eval_grid(std::string_view json_text);

enum class Ear { Left = 0, Right = 1 };

struct HrtfSet {
  std::vector<Direction> directions;
  double radius = 1.2;
  std::vector<double> frequencies;  // Hz, ascending
  std::vector<Complex> values;      // direction-major, ear-middle, frequency-minor
  std::vector<double> failed_frequencies_hz;

  // Optional impulse responses, same ordering with taps innermost.
  double sample_rate = 0.0;
  int taps = 0;
  std::vector<double> hrir;

  std::size_t direction_count() const { return directions.size(); }
  std::size_t frequency_count() const { return frequencies.size(); }
  bool has_hrir() const { return taps > 0; }

  std::size_t index(std::size_t d, Ear e, std::size_t f) const {
    return (d * 2 + static_cast<std::size_t>(e)) * frequencies.size() + f;
  }
  Complex& at(std::size_t d, Ear e, std::size_t f) { return values[index(d, e, f)]; }
  const Complex& at(std::size_t d, Ear e, std::size_t f) const { return values[index(d, e, f)]; }
  const double* impulse(std::size_t d, Ear e) const {
    return hrir.data() + (d * 2 + static_cast<std::size_t>(e)) * static_cast<std::size_t>(taps);
  }

  /// Allocates zeroed values for the current directions and frequencies.
  void resize_values();
  /// Throws InvalidArgument on inconsistent sizes or non-finite values.
  void check() const;
};

/// Reciprocal synthesis: for each frequency, unit normal velocity on the
/// left- and right-ear faces, solve, evaluate at the grid, normalize by the
/// free-field pressure of a point source with the same volume velocity at
/// the origin. Frequencies whose solve fails are logged, listed in
/// failed_frequencies_hz and left out; if all fail, NumericalError.
HrtfSet synthesize_hrtf(const TriangleMesh& mesh, const bem::AcousticConfig& cfg, const EvalGrid& grid);

/// Rigid sphere at the origin with vibrating caps at the ears.
struct SphereOracleConfig {
  double radius = 0.0875;
  double patch_half_angle_deg = 15.0;
  Vec3 left = Vec3::UnitY();
  Vec3 right = -Vec3::UnitY();
  int terms = 0;  // 0: ceil(ka) + 30 per frequency
};

/// The series counterpart of synthesize_hrtf on a sphere. Propagates
/// NumericalError from the series (too few terms).
HrtfSet analytic_sphere_hrtf(const SphereOracleConfig& sphere, const bem::AcousticConfig& cfg, const EvalGrid& grid);

/// Requires frequencies (i + 1) * sample_rate / taps for i = 0..K-1 with
/// K <= taps / 2 (InvalidArgument otherwise). Bins above K are zero, DC is
/// |H| at the first bin, the Nyquist bin keeps the real part, and the
/// responses are circularly shifted by taps / 4.
HrtfSet hrtf_to_hrir(const HrtfSet& set, double sample_rate, int taps);

// --- HRTF-JSON ----------------------------------------------------------------

enum class DataEncoding { Base64, Inline };

std::string format_hrtf_json(const HrtfSet& set, DataEncoding encoding = DataEncoding::Base64);
/// Throws ParseError.
HrtfSet parse_hrtf_json(std::string_view text);
void save_hrtf(const std::filesystem::path& path, const HrtfSet& set, DataEncoding encoding = DataEncoding::Base64);
HrtfSet load_hrtf(const std::filesystem::path& path);

std::string base64_encode(std::string_view bytes);
/// Throws ParseError on invalid characters or length.
std::string base64_decode(std::string_view text);

}  // namespace hforge
