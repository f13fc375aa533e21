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

// HRTF-JSON container and EvalGrid documents.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <set>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/hrtf.hpp"
#include "hrtf_forge/mesh_io.hpp"
#include "json.hpp"

namespace hforge {

namespace {

using Json = nlohmann::ordered_json;

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr const char* kSchema = "hrtf-json/1";

static_assert(std::endian::native == std::endian::little, "HRTF-JSON packing assumes a little-endian host");

std::string pack(const std::vector<double>& v) {
  std::string out(v.size() * 8, '\0');
  if (!v.empty()) std::memcpy(out.data(), v.data(), out.size());
  return out;
}

std::vector<double> unpack(const std::string& bytes) {
  if (bytes.size() % 8 != 0) throw ParseError("HRTF-JSON: packed data is not a whole number of f64 values", 0);
  std::vector<double> v(bytes.size() / 8);
  if (!v.empty()) std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

std::vector<double> interleave(const std::vector<Complex>& values) {
  std::vector<double> out;
  out.reserve(values.size() * 2);
  for (const Complex& c : values) {
    out.push_back(c.real());
    out.push_back(c.imag());
  }
  return out;
}

Json encode_doubles(const std::vector<double>& v, DataEncoding enc, bool pairs) {
  if (enc == DataEncoding::Base64) return base64_encode(pack(v));
  Json arr = Json::array();
  if (pairs)
    for (std::size_t i = 0; i + 1 < v.size(); i += 2) arr.push_back(Json::array({v[i], v[i + 1]}));
  else
    for (double x : v) arr.push_back(x);
  return arr;
}

std::vector<double> decode_doubles(const Json& data, const std::string& encoding, bool pairs) {
  if (encoding == "base64") {
    if (!data.is_string()) throw ParseError("HRTF-JSON: base64 data must be a string", 0);
    return unpack(base64_decode(data.get<std::string>()));
  }
  if (encoding != "inline") throw ParseError("HRTF-JSON: unknown encoding '" + encoding + "'", 0);
  if (!data.is_array()) throw ParseError("HRTF-JSON: inline data must be an array", 0);
  std::vector<double> out;
  for (const Json& item : data) {
    if (pairs) {
      if (!item.is_array() || item.size() != 2 || !item[0].is_number() || !item[1].is_number())
        throw ParseError("HRTF-JSON: inline values must be [re, im] pairs", 0);
      out.push_back(item[0].get<double>());
      out.push_back(item[1].get<double>());
    } else {
      if (!item.is_number()) throw ParseError("HRTF-JSON: inline samples must be numbers", 0);
      out.push_back(item.get<double>());
    }
  }
  return out;
}

const Json& require(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(std::string("HRTF-JSON: missing field '") + key + "'", 0);
  return *it;
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok |= it.key() == k;
    if (!ok) throw ParseError(std::string(where) + ": unknown field '" + it.key() + "'", 0);
  }
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string("HRTF-JSON: ") + what + " must be a number", 0);
  return j.get<double>();
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (std::uint8_t(bytes[i]) << 16) | (std::uint8_t(bytes[i + 1]) << 8) | std::uint8_t(bytes[i + 2]);
    for (int s = 18; s >= 0; s -= 6) out.push_back(kAlphabet[(v >> s) & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = std::uint8_t(bytes[i]) << 16;
    if (rest == 2) v |= std::uint8_t(bytes[i + 1]) << 8;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(rest == 2 ? kAlphabet[(v >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ParseError("base64: length is not a multiple of 4", text.size());
  auto value = [&](std::size_t pos) -> int {
    const char c = text[pos];
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    throw ParseError("base64: invalid character", pos);
  };
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    const int pad = last ? (text[i + 3] == '=') + (text[i + 2] == '=') : 0;
    if (pad == 1 && text[i + 2] == '=') throw ParseError("base64: misplaced padding", i + 2);
    std::uint32_t v = (value(i) << 18) | (value(i + 1) << 12);
    if (pad < 2) v |= value(i + 2) << 6;
    if (pad < 1) v |= value(i + 3);
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<char>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<char>(v & 0xff));
  }
  return out;
}

std::string format_hrtf_json(const HrtfSet& set, DataEncoding encoding) {
  set.check();
  Json doc;
  doc["schema"] = kSchema;
  doc["frequencies_hz"] = set.frequencies;
  Json dirs = Json::array();
  for (const Direction& d : set.directions)
    dirs.push_back(Json{{"az", d.azimuth_deg}, {"el", d.elevation_deg}, {"r", set.radius}});
  doc["directions"] = std::move(dirs);
  doc["ears"] = Json::array({"left", "right"});
  doc["encoding"] = encoding == DataEncoding::Base64 ? "base64" : "inline";
  doc["data"] = encode_doubles(interleave(set.values), encoding, true);
  doc["failed_frequencies_hz"] = set.failed_frequencies_hz;
  if (set.has_hrir()) {
    Json h;
    h["sample_rate"] = set.sample_rate;
    h["taps"] = set.taps;
    h["data"] = encode_doubles(set.hrir, encoding, false);
    doc["hrir"] = std::move(h);
  }
  return doc.dump() + "\n";
}

HrtfSet parse_hrtf_json(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("HRTF-JSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("HRTF-JSON: top level must be an object", 0);
  reject_unknown(doc, {"schema", "frequencies_hz", "directions", "ears", "encoding", "data", "failed_frequencies_hz", "hrir"},
                 "HRTF-JSON");
  const Json& schema = require(doc, "schema");
  if (!schema.is_string() || schema.get<std::string>() != kSchema)
    throw ParseError("HRTF-JSON: unsupported schema (expected hrtf-json/1)", 0);

  HrtfSet set;
  for (const Json& f : require(doc, "frequencies_hz")) set.frequencies.push_back(number(f, "frequency"));
  bool first = true;
  for (const Json& d : require(doc, "directions")) {
    if (!d.is_object()) throw ParseError("HRTF-JSON: direction entries must be objects", 0);
    reject_unknown(d, {"az", "el", "r"}, "HRTF-JSON direction");
    set.directions.push_back({number(require(d, "az"), "az"), number(require(d, "el"), "el")});
    const double r = number(require(d, "r"), "r");
    if (first) set.radius = r;
    else if (std::abs(r - set.radius) > 1e-9 * std::max(1.0, std::abs(r)))
      throw ParseError("HRTF-JSON: directions must share one radius", 0);
    first = false;
  }
  const Json& ears = require(doc, "ears");
  if (ears != Json::array({"left", "right"})) throw ParseError("HRTF-JSON: ears must be [\"left\", \"right\"]", 0);
  const Json& enc = require(doc, "encoding");
  if (!enc.is_string()) throw ParseError("HRTF-JSON: encoding must be a string", 0);
  const std::vector<double> flat = decode_doubles(require(doc, "data"), enc.get<std::string>(), true);
  if (flat.size() != set.directions.size() * 2 * set.frequencies.size() * 2)
    throw ParseError("HRTF-JSON: data length does not match directions x ears x frequencies", 0);
  set.values.resize(flat.size() / 2);
  for (std::size_t i = 0; i < set.values.size(); ++i) set.values[i] = Complex(flat[2 * i], flat[2 * i + 1]);
  if (doc.contains("failed_frequencies_hz"))
    for (const Json& f : doc["failed_frequencies_hz"]) set.failed_frequencies_hz.push_back(number(f, "frequency"));
  if (doc.contains("hrir")) {
    const Json& h = doc["hrir"];
    reject_unknown(h, {"sample_rate", "taps", "data"}, "HRTF-JSON hrir");
    set.sample_rate = number(require(h, "sample_rate"), "sample_rate");
    const Json& taps = require(h, "taps");
    if (!taps.is_number_integer() || taps.get<long long>() <= 0)
      throw ParseError("HRTF-JSON: taps must be a positive integer", 0);
    set.taps = taps.get<int>();
    set.hrir = decode_doubles(require(h, "data"), enc.get<std::string>(), false);
  }
  try {
    set.check();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("HRTF-JSON: ") + e.what(), 0);
  }
  return set;
}

void save_hrtf(const std::filesystem::path& path, const HrtfSet& set, DataEncoding encoding) {
  write_file(path, format_hrtf_json(set, encoding));
}

HrtfSet load_hrtf(const std::filesystem::path& path) { return parse_hrtf_json(read_file(path)); }

EvalGrid parse_eval_grid(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("eval grid: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("eval grid: expected an object");
  EvalGrid g;
  g.directions.clear();
  const std::set<std::string> known{"radius", "directions", "azimuth_step_deg", "elevations_deg"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ConfigError("eval grid: unknown key '" + it.key() + "'");
  try {
    if (doc.contains("radius")) g.radius = doc["radius"].get<double>();
    if (doc.contains("directions")) {
      if (doc.contains("azimuth_step_deg") || doc.contains("elevations_deg"))
        throw ConfigError("eval grid: give either 'directions' or 'azimuth_step_deg' + 'elevations_deg'");
      for (const Json& d : doc["directions"]) {
        for (auto it = d.begin(); it != d.end(); ++it)
          if (it.key() != "az" && it.key() != "el") throw ConfigError("eval grid: unknown key '" + it.key() + "'");
        g.directions.push_back({d.at("az").get<double>(), d.at("el").get<double>()});
      }
    } else if (doc.contains("azimuth_step_deg")) {
      const double step = doc["azimuth_step_deg"].get<double>();
      if (!(step > 0.0)) throw ConfigError("eval grid: azimuth_step_deg must be > 0");
      const std::vector<double> els = doc.contains("elevations_deg")
                                          ? doc["elevations_deg"].get<std::vector<double>>()
                                          : std::vector<double>{0.0};
      for (double el : els)
        for (const Direction& d : EvalGrid::ring(step, el, g.radius).directions) g.directions.push_back(d);
    } else {
      const double r = g.radius;
      g = EvalGrid::default_grid();
      g.radius = r;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("eval grid: ") + e.what());
  }
  g.check();
  return g;
}

}  // namespace hforge
