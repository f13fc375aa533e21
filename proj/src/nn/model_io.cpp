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

#include <bit>
#include <cstring>

#include "hrtf_forge/error.hpp"
#include "hrtf_forge/mesh_io.hpp"
#include "hrtf_forge/nn/train.hpp"

namespace hforge::nn {

namespace {

constexpr char kMagic[] = "NSUBDIV1";
constexpr std::size_t kMagicLen = 8;
constexpr std::uint32_t kMaxDim = 1u << 20;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

void put_f64(std::string& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  std::uint64_t take(int n) {
    if (pos_ + static_cast<std::size_t>(n) > bytes_.size()) throw ParseError("model: truncated file", pos_);
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
  double f64() { return std::bit_cast<double>(take(8)); }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void skip(std::size_t n) { pos_ += n; }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_model(const SubdivNetParams& params) {
  params.check();
  std::string out(kMagic, kMagicLen);
  put_u32(out, static_cast<std::uint32_t>(params.feature_dim));
  put_u32(out, static_cast<std::uint32_t>(params.levels));
  put_u32(out, 3);
  for (const Mlp* m : {&params.init_net, &params.vertex_net, &params.edge_net}) {
    put_u32(out, static_cast<std::uint32_t>(m->dims().size()));
    for (int d : m->dims()) put_u32(out, static_cast<std::uint32_t>(d));
  }
  for (double v : params.flatten()) put_f64(out, v);
  return out;
}

SubdivNetParams parse_model(const std::string& bytes) {
  if (bytes.size() < kMagicLen || std::memcmp(bytes.data(), kMagic, kMagicLen) != 0)
    throw ParseError("model: bad magic (expected NSUBDIV1)", 0);
  Reader in(bytes);
  in.skip(kMagicLen);
  SubdivNetParams p;
  const std::uint32_t feature_dim = in.u32();
  const std::uint32_t levels = in.u32();
  if (feature_dim == 0 || feature_dim > kMaxDim || levels > 16) throw ParseError("model: bad header", in.pos());
  p.feature_dim = static_cast<int>(feature_dim);
  p.levels = static_cast<int>(levels);
  if (in.u32() != 3) throw ParseError("model: expected 3 networks", in.pos());
  for (Mlp* m : {&p.init_net, &p.vertex_net, &p.edge_net}) {
    const std::uint32_t n = in.u32();
    if (n < 2 || n > 64) throw ParseError("model: bad layer count", in.pos());
    std::vector<int> dims(n);
    for (int& d : dims) {
      const std::uint32_t v = in.u32();
      if (v == 0 || v > kMaxDim) throw ParseError("model: bad layer width", in.pos());
      d = static_cast<int>(v);
    }
    *m = Mlp(dims);
  }
  try {
    p.check();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model: dimension mismatch: ") + e.what(), in.pos());
  }
  const std::size_t count = p.parameter_count();
  if (in.remaining() != 8 * count)
    throw ParseError("model: expected " + std::to_string(8 * count) + " parameter bytes, found " +
                     std::to_string(in.remaining()),
                     in.pos());
  std::vector<double> values(count);
  for (double& v : values) v = in.f64();
  p.unflatten(values);
  return p;
}

void save_model(const std::filesystem::path& path, const SubdivNetParams& params) {
  write_file(path, serialize_model(params));
}

SubdivNetParams load_model(const std::filesystem::path& path) { return parse_model(read_file(path)); }

}  // namespace hforge::nn
