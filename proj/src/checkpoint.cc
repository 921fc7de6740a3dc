// src/checkpoint.cc

// Copyright 2026  ctcdistill authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "ctcd/checkpoint.h"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>

namespace ctcd {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian; big-endian hosts need byte swaps");

namespace {

constexpr char kMagic[8] = {'C', 'T', 'C', 'D', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

void write_raw(std::ostream& os, const void* p, size_t n) {
  os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_le(std::ostream& os, T v) {
  write_raw(os, &v, sizeof(T));
}

void read_raw(std::istream& is, void* p, size_t n, const char* what) {
  is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(is.gcount()) != n)
    throw FormatError(std::string("truncated checkpoint while reading ") + what);
}

template <typename T>
T read_le(std::istream& is, const char* what) {
  T v;
  read_raw(is, &v, sizeof(T), what);
  return v;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  ckpt.spec.validate();
  std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    write_raw(os, kMagic, sizeof(kMagic));
    write_le<uint32_t>(os, kVersion);
    write_le<uint8_t>(os, ckpt.spec.family == EncoderFamily::kTdnn ? 0 : 1);
    write_le<uint8_t>(os, ckpt.spec.bidirectional ? 1 : 0);
    write_le<uint32_t>(os, static_cast<uint32_t>(ckpt.spec.input_dim));
    write_le<uint32_t>(os, static_cast<uint32_t>(ckpt.spec.num_classes));
    write_le<uint32_t>(os, static_cast<uint32_t>(ckpt.spec.layer_widths.size()));
    for (int w : ckpt.spec.layer_widths) write_le<uint32_t>(os, static_cast<uint32_t>(w));
    if (ckpt.spec.family == EncoderFamily::kTdnn)
      for (int k : ckpt.spec.kernel_widths) write_le<uint32_t>(os, static_cast<uint32_t>(k));
    write_le<uint32_t>(os, ckpt.stage);
    write_le<uint32_t>(os, ckpt.epoch);
    write_le<uint64_t>(os, ckpt.seed);
    write_le<uint32_t>(os, static_cast<uint32_t>(ckpt.params.size()));
    for (const NamedParam& p : ckpt.params) {
      write_le<uint32_t>(os, static_cast<uint32_t>(p.name.size()));
      write_raw(os, p.name.data(), p.name.size());
      write_le<uint32_t>(os, static_cast<uint32_t>(p.value.shape().rank()));
      for (int i = 0; i < p.value.shape().rank(); ++i)
        write_le<uint64_t>(os, static_cast<uint64_t>(p.value.shape().dim(i)));
      write_raw(os, p.value.data().data(), p.value.data().size() * sizeof(double));
    }
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint " + path);
  char magic[8];
  read_raw(is, magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw FormatError("bad magic in " + path + ": not a checkpoint file");
  Checkpoint ckpt;
  ckpt.format_version = read_le<uint32_t>(is, "version");
  if (ckpt.format_version != kVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(ckpt.format_version) +
                      " (this build reads version " + std::to_string(kVersion) + ")");
  uint8_t family = read_le<uint8_t>(is, "family");
  if (family > 1) throw FormatError("unknown encoder family code " + std::to_string(family));
  ckpt.spec.family = family == 0 ? EncoderFamily::kTdnn : EncoderFamily::kRnn;
  ckpt.spec.bidirectional = read_le<uint8_t>(is, "bidirectional") != 0;
  ckpt.spec.input_dim = static_cast<int>(read_le<uint32_t>(is, "input_dim"));
  ckpt.spec.num_classes = static_cast<int>(read_le<uint32_t>(is, "num_classes"));
  uint32_t n_layers = read_le<uint32_t>(is, "layer count");
  for (uint32_t l = 0; l < n_layers; ++l)
    ckpt.spec.layer_widths.push_back(static_cast<int>(read_le<uint32_t>(is, "layer width")));
  if (ckpt.spec.family == EncoderFamily::kTdnn)
    for (uint32_t l = 0; l < n_layers; ++l)
      ckpt.spec.kernel_widths.push_back(static_cast<int>(read_le<uint32_t>(is, "kernel width")));
  ckpt.stage = read_le<uint32_t>(is, "stage");
  ckpt.epoch = read_le<uint32_t>(is, "epoch");
  ckpt.seed = read_le<uint64_t>(is, "seed");
  uint32_t n_params = read_le<uint32_t>(is, "param count");
  for (uint32_t i = 0; i < n_params; ++i) {
    uint32_t name_len = read_le<uint32_t>(is, "param name length");
    std::string name(name_len, '\0');
    read_raw(is, name.data(), name_len, "param name");
    uint32_t rank = read_le<uint32_t>(is, "param rank");
    if (rank < 1 || rank > 3)
      throw FormatError("parameter " + name + " has rank " + std::to_string(rank));
    std::vector<int64_t> dims;
    for (uint32_t d = 0; d < rank; ++d)
      dims.push_back(static_cast<int64_t>(read_le<uint64_t>(is, "param dim")));
    Shape shape = Shape::of(dims);
    std::vector<double> data(static_cast<size_t>(shape.numel()));
    read_raw(is, data.data(), data.size() * sizeof(double), ("data of " + name).c_str());
    ckpt.params.push_back({name, Array::from(shape, std::move(data))});
  }
  // Detect trailing garbage early.
  char extra;
  is.read(&extra, 1);
  if (is.gcount() != 0) throw FormatError("trailing bytes after checkpoint payload in " + path);
  return ckpt;
}

Checkpoint checkpoint_of(const Encoder& enc, uint32_t stage, uint32_t epoch, uint64_t seed) {
  Checkpoint c;
  c.spec = enc.spec();
  for (const NamedParam& p : enc.params()) c.params.push_back({p.name, p.value.detached()});
  c.stage = stage;
  c.epoch = epoch;
  c.seed = seed;
  return c;
}

Encoder encoder_from_checkpoint(const Checkpoint& ckpt, bool trainable) {
  std::vector<NamedParam> params;
  for (const NamedParam& p : ckpt.params) params.push_back({p.name, p.value.detached()});
  return Encoder::from_params(ckpt.spec, std::move(params), trainable);
}

}  // namespace ctcd
