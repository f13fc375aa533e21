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

#include "hrtf_forge/mesh_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/log.hpp"

namespace hforge {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

namespace {

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    v = std::bit_cast<T>(bytes);
  }
  return v;
}

template <typename T>
void store_le(std::string& out, T v) {
  auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.append(bytes.data(), bytes.size());
}

// Welds facet corners with identical coordinates, in order of appearance.
class Welder {
 public:
  explicit Welder(double scale) : scale_(scale) {}

  int add(const std::array<double, 3>& c) {
    std::array<double, 3> key = c;
    for (double& x : key)
      if (x == 0.0) x = 0.0;  // fold -0 into +0
    auto [it, inserted] = index_.try_emplace(key, static_cast<int>(mesh.vertices.size()));
    if (inserted) mesh.vertices.emplace_back(c[0] * scale_, c[1] * scale_, c[2] * scale_);
    return it->second;
  }

  void add_face(int a, int b, int c) {
    if (a == b || b == c || a == c) {
      ++dropped;
      return;
    }
    mesh.faces.push_back({a, b, c});
  }

  TriangleMesh finish() {
    if (dropped > 0) log::warn("io", "dropped facets that collapse after welding", "count=" + std::to_string(dropped));
    if (mesh.faces.empty()) throw MeshError("STL contains no usable facets");
    return std::move(mesh);
  }

  TriangleMesh mesh;
  int dropped = 0;

 private:
  double scale_;
  std::map<std::array<double, 3>, int> index_;
};

TriangleMesh parse_binary_stl(const std::string& bytes, double unit_scale) {
  const auto count = load_le<std::uint32_t>(bytes.data() + 80);
  Welder welder(unit_scale);
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t rec = 84 + static_cast<std::size_t>(i) * 50;
    int idx[3];
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> c;
      for (int j = 0; j < 3; ++j) {
        const std::size_t off = rec + 12 + 12 * k + 4 * j;
        const float v = load_le<float>(bytes.data() + off);
        if (!std::isfinite(v)) throw ParseError("non-finite vertex coordinate", off);
        c[j] = static_cast<double>(v);
      }
      idx[k] = welder.add(c);
    }
    welder.add_face(idx[0], idx[1], idx[2]);
  }
  return welder.finish();
}

class AsciiScanner {
 public:
  explicit AsciiScanner(const std::string& s) : s_(s) {}

  std::size_t offset() const { return pos_; }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  std::string word() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return s_.substr(start, pos_ - start);
  }
  void expect(const char* keyword) {
    const std::size_t at = (skip_ws(), pos_);
    const std::string w = word();
    if (w != keyword) throw ParseError(std::string("expected '") + keyword + "', found '" + w + "'", at);
  }
  double number() {
    skip_ws();
    const std::size_t at = pos_;
    const std::string w = word();
    double v = 0.0;
    auto [end, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
    if (ec != std::errc() || end != w.data() + w.size() || !std::isfinite(v))
      throw ParseError("malformed number '" + w + "'", at);
    return v;
  }
  void skip_line() {
    while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  const std::string& s_;
  std::size_t pos_ = 0;
};

TriangleMesh parse_ascii_stl(const std::string& text, double unit_scale) {
  AsciiScanner sc(text);
  sc.expect("solid");
  sc.skip_line();
  Welder welder(unit_scale);
  for (;;) {
    if (sc.done()) throw ParseError("missing 'endsolid'", sc.offset());
    const std::size_t at = sc.offset();
    const std::string w = sc.word();
    if (w == "endsolid") break;
    if (w != "facet") throw ParseError("expected 'facet', found '" + w + "'", at);
    sc.expect("normal");
    for (int j = 0; j < 3; ++j) sc.number();
    sc.expect("outer");
    sc.expect("loop");
    int idx[3];
    for (int k = 0; k < 3; ++k) {
      sc.expect("vertex");
      std::array<double, 3> c{sc.number(), sc.number(), sc.number()};
      idx[k] = welder.add(c);
    }
    sc.expect("endloop");
    sc.expect("endfacet");
    welder.add_face(idx[0], idx[1], idx[2]);
  }
  return welder.finish();
}

bool looks_ascii(const std::string& bytes) {
  std::size_t i = 0;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  return bytes.compare(i, 5, "solid") == 0;
}

}  // namespace

TriangleMesh parse_stl(const std::string& bytes, double unit_scale) {
  if (!(unit_scale > 0.0) || !std::isfinite(unit_scale)) throw InvalidArgument("unit_scale must be positive");
  if (bytes.size() >= 84) {
    const auto count = load_le<std::uint32_t>(bytes.data() + 80);
    if (bytes.size() == 84 + 50ull * count) {
      if (count == 0) throw MeshError("STL contains no facets");
      return parse_binary_stl(bytes, unit_scale);
    }
  }
  if (looks_ascii(bytes)) return parse_ascii_stl(bytes, unit_scale);
  if (bytes.size() < 84) throw ParseError("truncated binary STL header", bytes.size());
  throw ParseError("binary STL size does not match facet count", 80);
}

TriangleMesh load_stl(const std::filesystem::path& path, double unit_scale) {
  return parse_stl(read_file(path), unit_scale);
}

std::string format_stl(const TriangleMesh& mesh, double unit_scale) {
  check_indices(mesh);
  std::string out;
  out.reserve(84 + 50 * mesh.faces.size());
  std::string header = "hrtf-forge binary STL";
  header.resize(80, ' ');
  out += header;
  store_le<std::uint32_t>(out, static_cast<std::uint32_t>(mesh.faces.size()));
  const double inv = 1.0 / unit_scale;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 n = face_normal(mesh, f);
    for (int j = 0; j < 3; ++j) store_le<float>(out, static_cast<float>(n[j]));
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) store_le<float>(out, static_cast<float>(mesh.corner(f, k)[j] * inv));
    store_le<std::uint16_t>(out, 0);
  }
  return out;
}

void save_stl(const TriangleMesh& mesh, const std::filesystem::path& path, double unit_scale) {
  write_file(path, format_stl(mesh, unit_scale));
}

TriangleMesh parse_obj(const std::string& text) {
  TriangleMesh mesh;
  std::vector<Region> labels;
  bool any_label = false;
  Region current = Region::Skin;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double c[3];
      for (double& x : c) {
        std::string tok;
        if (!(ls >> tok)) throw ParseError("vertex record needs three coordinates", lineno, "line");
        auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
        if (ec != std::errc() || end != tok.data() + tok.size() || !std::isfinite(x))
          throw ParseError("non-numeric coordinate '" + tok + "'", lineno, "line");
      }
      mesh.vertices.emplace_back(c[0], c[1], c[2]);
    } else if (tag == "f") {
      std::vector<int> poly;
      std::string tok;
      while (ls >> tok) {
        const std::string head = tok.substr(0, tok.find('/'));
        long idx = 0;
        auto [end, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
        if (ec != std::errc() || end != head.data() + head.size() || idx == 0)
          throw ParseError("malformed face index '" + tok + "'", lineno, "line");
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = idx > 0 ? idx - 1 : n + idx;
        if (resolved < 0 || resolved >= n)
          throw ParseError("face index '" + tok + "' out of range", lineno, "line");
        poly.push_back(static_cast<int>(resolved));
      }
      if (poly.size() < 3) throw ParseError("face with fewer than three vertices", lineno, "line");
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
        labels.push_back(current);
      }
    } else if (tag == "g") {
      std::string name;
      ls >> name;
      const auto r = region_from_name(name);
      if (r) any_label = true;
      current = r.value_or(Region::Skin);
    }
  }
  if (any_label) mesh.labels = std::move(labels);
  check_indices(mesh);
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path) { return parse_obj(read_file(path)); }

std::string format_obj(const TriangleMesh& mesh) {
  check_indices(mesh);
  std::string out = "# hrtf-forge mesh, units: meters\n";
  for (const Vec3& v : mesh.vertices) {
    out += "v " + format_double(v.x()) + ' ' + format_double(v.y()) + ' ' + format_double(v.z()) + '\n';
  }
  std::optional<Region> current;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    if (mesh.has_labels() && current != mesh.labels[f]) {
      current = mesh.labels[f];
      out += "g ";
      out += region_name(*current);
      out += '\n';
    }
    const Face& t = mesh.faces[f];
    out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' + std::to_string(t[2] + 1) + '\n';
  }
  return out;
}

void save_obj(const TriangleMesh& mesh, const std::filesystem::path& path) { write_file(path, format_obj(mesh)); }

namespace {
std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}
}  // namespace

TriangleMesh load_mesh(const std::filesystem::path& path, double stl_unit_scale) {
  const std::string ext = lower_extension(path);
  if (ext == ".stl") return load_stl(path, stl_unit_scale);
  if (ext == ".obj") return load_obj(path);
  throw InvalidArgument("unsupported mesh extension '" + ext + "' (expected .stl or .obj)");
}

void save_mesh(const TriangleMesh& mesh, const std::filesystem::path& path, double stl_unit_scale) {
  const std::string ext = lower_extension(path);
  if (ext == ".stl") return save_stl(mesh, path, stl_unit_scale);
  if (ext == ".obj") return save_obj(mesh, path);
  throw InvalidArgument("unsupported mesh extension '" + ext + "' (expected .stl or .obj)");
}

}  // namespace hforge
