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

#include <cmath>
#include <set>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/mesh_io.hpp"
#include "hrtf_forge/pipeline.hpp"
#include "json.hpp"

namespace hforge::pipeline {

namespace {

using Json = nlohmann::json;

// A JSON object whose keys must all be consumed before finish().
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: " + name() + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string key_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const Json* get(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const Json& require(const char* key) {
    const Json* v = get(key);
    if (!v) throw ConfigError("config: missing key " + key_path(key));
    return *v;
  }
  Section child(const char* key) { return Section(require(key), key_path(key)); }

  void real(const char* key, double& dst) {
    if (const Json* v = get(key)) dst = as_real(*v, key_path(key));
  }
  void integer(const char* key, int& dst) {
    if (const Json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError("config: " + key_path(key) + " must be an integer");
      dst = v->get<int>();
    }
  }
  void boolean(const char* key, bool& dst) {
    if (const Json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError("config: " + key_path(key) + " must be true or false");
      dst = v->get<bool>();
    }
  }
  void string(const char* key, std::string& dst) {
    if (const Json* v = get(key)) {
      if (!v->is_string()) throw ConfigError("config: " + key_path(key) + " must be a string");
      dst = v->get<std::string>();
    }
  }
  void vec3(const char* key, Vec3& dst) {
    if (const Json* v = get(key)) {
      if (!v->is_array() || v->size() != 3) throw ConfigError("config: " + key_path(key) + " must be [x, y, z]");
      for (int i = 0; i < 3; ++i) dst[i] = as_real((*v)[i], key_path(key));
    }
  }
  std::vector<double> reals(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError("config: " + where + " must be an array of numbers");
    std::vector<double> out;
    for (const Json& e : v) out.push_back(as_real(e, where));
    return out;
  }
  void band(const char* key, double& lo, double& hi) {
    if (const Json* v = get(key)) {
      const std::vector<double> b = reals(*v, key_path(key));
      if (b.size() != 2 || !(b[0] < b[1])) throw ConfigError("config: " + key_path(key) + " must be [lo, hi] with lo < hi");
      lo = b[0];
      hi = b[1];
    }
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError("config: unknown key " + key_path(k.c_str()));
  }

 private:
  std::string name() const { return path_.empty() ? "document" : path_; }
  static double as_real(const Json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError("config: " + where + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError("config: " + where + " must be finite");
    return d;
  }

  const Json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Json parse_json(std::string_view text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string(what) + ": invalid JSON: " + e.what(), e.byte);
  }
}

PrepSection parse_prep(Section s) {
  PrepSection p;
  {
    Section c = s.child("cut_plane");
    c.vec3("point", p.cut_plane.point);
    c.require("normal");
    c.vec3("normal", p.cut_plane.normal);
    c.finish();
    if (p.cut_plane.normal.norm() == 0.0) throw ConfigError("config: prep.cut_plane.normal must be nonzero");
    p.cut_plane.normal.normalize();
  }
  {
    Section e = s.child("ear_markers");
    e.require("left");
    e.require("right");
    e.require("radius");
    e.vec3("left", p.ear_markers.left);
    e.vec3("right", p.ear_markers.right);
    e.real("radius", p.ear_markers.radius);
    e.finish();
    if (!(p.ear_markers.radius > 0.0)) throw ConfigError("config: prep.ear_markers.radius must be > 0");
  }
  if (s.has("grading")) {
    Section g = s.child("grading");
    g.boolean("enabled", p.grade);
    g.real("alpha", p.grading.alpha);
    g.real("h_min", p.grading.h_min);
    g.real("h_max", p.grading.h_max);
    g.real("kappa_floor", p.grading.kappa_floor);
    g.integer("iterations", p.grading.iterations);
    g.real("smoothing_lambda", p.grading.smoothing_lambda);
    g.finish();
    try {
      p.grading.check();
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("config: prep.grading: ") + e.what());
    }
  }
  if (s.has("cleanup")) {
    Section c = s.child("cleanup");
    c.real("weld_tol", p.weld_tol);
    c.real("area_eps", p.area_eps);
    c.finish();
  }
  if (s.has("icp")) {
    Section c = s.child("icp");
    c.integer("max_iters", p.icp_max_iters);
    c.real("convergence_eps", p.icp_eps);
    c.finish();
    if (p.icp_max_iters < 1) throw ConfigError("config: prep.icp.max_iters must be >= 1");
  }
  s.finish();
  return p;
}

ModelSection parse_model(Section s, std::uint64_t seed) {
  ModelSection m;
  s.integer("feature_dim", m.feature_dim);
  s.integer("levels", m.levels);
  s.real("max_normal_angle_deg", m.max_normal_angle_deg);
  if (const Json* h = s.get("hidden")) {
    if (!h->is_array()) throw ConfigError("config: model.hidden must be an array of widths");
    m.hidden.clear();
    for (const Json& w : *h) {
      if (!w.is_number_integer() || w.get<int>() < 1) throw ConfigError("config: model.hidden widths must be positive integers");
      m.hidden.push_back(w.get<int>());
    }
  }
  if (s.has("train")) {
    Section t = s.child("train");
    t.real("learning_rate", m.train.learning_rate);
    t.real("beta1", m.train.beta1);
    t.real("beta2", m.train.beta2);
    t.real("eps_adam", m.train.eps_adam);
    t.integer("epochs", m.train.epochs);
    t.integer("batch_size", m.train.batch_size);
    t.real("soft_hausdorff_temperature", m.train.soft_hausdorff_temperature);
    t.real("chamfer_weight", m.train.chamfer_weight);
    t.real("hausdorff_weight", m.train.hausdorff_weight);
    t.finish();
  }
  s.finish();
  m.train.seed = seed;
  if (m.feature_dim < 1) throw ConfigError("config: model.feature_dim must be >= 1");
  if (m.levels < 1) throw ConfigError("config: model.levels must be >= 1");
  if (!(m.max_normal_angle_deg > 0.0 && m.max_normal_angle_deg <= 180.0))
    throw ConfigError("config: model.max_normal_angle_deg must be in (0, 180]");
  m.train.check();
  return m;
}

BemSection parse_bem(Section s, std::uint64_t seed) {
  BemSection b;
  bem::AcousticConfig& a = b.acoustic;
  s.real("sound_speed", a.sound_speed);
  s.real("density", a.density);
  s.integer("quadrature_order", a.quadrature_order);
  s.integer("chief_point_count", a.chief_point_count);
  a.chief_seed = seed;

  double max_hz = 0.0;
  if (s.has("hrir")) {
    Section h = s.child("hrir");
    h.require("sample_rate");
    h.require("taps");
    h.real("sample_rate", b.hrir_sample_rate);
    h.integer("taps", b.hrir_taps);
    max_hz = 0.5 * b.hrir_sample_rate;
    h.real("max_hz", max_hz);
    h.finish();
    if (!(b.hrir_sample_rate > 0.0) || b.hrir_taps < 4 || b.hrir_taps % 2)
      throw ConfigError("config: bem.hrir needs sample_rate > 0 and an even taps >= 4");
  }
  if (const Json* f = s.get("frequencies")) {
    if (f->is_object()) {
      Section r(*f, s.key_path("frequencies"));
      double start = 0.0, stop = 0.0, step = 0.0;
      r.require("start");
      r.require("stop");
      r.require("step");
      r.real("start", start);
      r.real("stop", stop);
      r.real("step", step);
      r.finish();
      if (!(step > 0.0) || !(start > 0.0) || stop < start)
        throw ConfigError("config: bem.frequencies range needs 0 < start <= stop and step > 0");
      const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
      for (long i = 0; i <= n; ++i) a.frequencies.push_back(start + static_cast<double>(i) * step);
    } else {
      a.frequencies = s.reals(*f, s.key_path("frequencies"));
    }
  } else if (b.hrir_taps > 0) {
    // The HRIR grid: bins (i + 1) fs / taps up to max_hz.
    for (int i = 1; i <= b.hrir_taps / 2; ++i) {
      const double hz = i * b.hrir_sample_rate / b.hrir_taps;
      if (hz > max_hz * (1 + 1e-12)) break;
      a.frequencies.push_back(hz);
    }
  } else {
    throw ConfigError("config: missing key bem.frequencies");
  }
  if (const Json* g = s.get("grid")) b.grid = parse_eval_grid(g->dump());
  if (s.has("sphere")) {
    Section p = s.child("sphere");
    p.real("radius", b.sphere.radius);
    p.real("patch_half_angle_deg", b.sphere.patch_half_angle_deg);
    p.integer("terms", b.sphere.terms);
    p.vec3("left", b.sphere.left);
    p.vec3("right", b.sphere.right);
    p.integer("level", b.sphere_level);
    p.finish();
    if (!(b.sphere.radius > 0.0)) throw ConfigError("config: bem.sphere.radius must be > 0");
    if (!(b.sphere.patch_half_angle_deg > 0.0 && b.sphere.patch_half_angle_deg < 90.0))
      throw ConfigError("config: bem.sphere.patch_half_angle_deg must be in (0, 90)");
    if (b.sphere.terms < 0) throw ConfigError("config: bem.sphere.terms must be >= 0");
    if (b.sphere_level < 0 || b.sphere_level > 6) throw ConfigError("config: bem.sphere.level must be in [0, 6]");
  }
  std::string enc = "base64";
  s.string("encoding", enc);
  if (enc == "base64") b.encoding = DataEncoding::Base64;
  else if (enc == "inline") b.encoding = DataEncoding::Inline;
  else throw ConfigError("config: bem.encoding must be \"base64\" or \"inline\"");
  s.finish();
  a.check();
  b.grid.check();
  return b;
}

MetricsSection parse_metrics(Section s) {
  MetricsSection m;
  metrics::CompareConfig& c = m.compare;
  s.band("lsd_band_hz", c.lsd_lo, c.lsd_hi);
  s.band("ild_band_hz", c.ild_lo, c.ild_hi);
  s.real("lowpass_hz", c.lowpass_hz);
  s.real("direction_tolerance_deg", c.direction_tolerance_deg);
  std::string method = "cross_correlation";
  s.string("itd_method", method);
  if (method == "cross_correlation") c.itd_method = metrics::ItdMethod::CrossCorrelation;
  else if (method == "threshold_onset") c.itd_method = metrics::ItdMethod::ThresholdOnset;
  else throw ConfigError("config: metrics.itd_method must be \"cross_correlation\" or \"threshold_onset\"");
  s.finish();
  if (!(c.lowpass_hz > 0.0)) throw ConfigError("config: metrics.lowpass_hz must be > 0");
  if (!(c.direction_tolerance_deg >= 0.0)) throw ConfigError("config: metrics.direction_tolerance_deg must be >= 0");
  if (!(c.lsd_lo > 0.0) || !(c.ild_lo > 0.0)) throw ConfigError("config: metrics bands must start above 0 Hz");
  return m;
}

}  // namespace

PipelineConfig parse_config(std::string_view json_text) {
  const Json doc = parse_json(json_text, "config");
  Section root(doc, "");
  PipelineConfig cfg;
  if (const Json* s = root.get("seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<std::int64_t>() >= 0))
      throw ConfigError("config: seed must be a non-negative integer");
    cfg.seed = s->get<std::uint64_t>();
  }
  if (root.has("io")) {
    Section io = root.child("io");
    io.real("unit_scale", cfg.io.unit_scale);
    io.string("reference_mesh", cfg.io.reference_mesh);
    io.finish();
    if (!(cfg.io.unit_scale > 0.0)) throw ConfigError("config: io.unit_scale must be > 0");
  }
  if (root.has("prep")) cfg.prep = parse_prep(root.child("prep"));
  if (root.has("model")) cfg.model = parse_model(root.child("model"), cfg.seed);
  if (root.has("bem")) cfg.bem = parse_bem(root.child("bem"), cfg.seed);
  if (root.has("metrics")) cfg.metrics = parse_metrics(root.child("metrics"));
  root.finish();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config: no such file " + path.string());
  return parse_config(read_file(path));
}

DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir) {
  const Json doc = parse_json(json_text, "manifest");
  Section root(doc, "");
  const Json& list = root.require("subjects");
  root.finish();
  if (!list.is_array()) throw ConfigError("manifest: subjects must be an array");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base_dir / path;
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("manifest: no such file " + path.string());
    return path;
  };
  DatasetManifest m;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i) {
    Section s(list[i], "subjects[" + std::to_string(i) + "]");
    ManifestEntry e;
    std::string low, high, hrtf, split = "train";
    s.require("id");
    s.require("low_res_mesh_path");
    s.string("id", e.id);
    s.string("low_res_mesh_path", low);
    s.string("high_res_mesh_path", high);
    s.string("measured_hrtf_path", hrtf);
    s.string("split", split);
    s.finish();
    if (e.id.empty()) throw ConfigError("manifest: empty subject id");
    if (!ids.insert(e.id).second) throw ConfigError("manifest: duplicate subject id " + e.id);
    if (split == "train") e.split = Split::Train;
    else if (split == "val") e.split = Split::Val;
    else if (split == "test") e.split = Split::Test;
    else throw ConfigError("manifest: split of " + e.id + " must be train, val or test");
    e.low_res_mesh = resolve(low);
    if (s.has("high_res_mesh_path")) e.high_res_mesh = resolve(high);
    if (s.has("measured_hrtf_path")) e.measured_hrtf = resolve(hrtf);
    m.subjects.push_back(std::move(e));
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("manifest: no such file " + path.string());
  return parse_manifest(read_file(path), path.parent_path());
}

}  // namespace hforge::pipeline
