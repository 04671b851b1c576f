// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/checkpoint.hpp"

#include "cdlab/binary_io.hpp"

namespace cdlab {

namespace {
constexpr std::string_view kMagic = "CDCK";
constexpr std::uint32_t kVersion = 1;
}  // namespace

const Tensor* Checkpoint::find(std::string_view name) const {
  for (const auto& a : arrays) {
    if (a.name == name) return &a.value;
  }
  return nullptr;
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kVersion);
  w.u64(ckpt.manifest.size());
  w.bytes(ckpt.manifest);
  w.u32(static_cast<std::uint32_t>(ckpt.arrays.size()));
  for (const auto& a : ckpt.arrays) {
    w.u32(static_cast<std::uint32_t>(a.name.size()));
    w.bytes(a.name);
    w.u32(static_cast<std::uint32_t>(a.value.rank()));
    for (std::size_t d : a.value.shape()) w.u64(d);
    w.f64s(a.value.data());
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes, "checkpoint");
  if (r.bytes(4) != kMagic) throw FormatError("checkpoint: bad magic");
  if (auto v = r.u32(); v != kVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(v));
  Checkpoint ckpt;
  ckpt.manifest = std::string(r.bytes(r.u64()));
  const std::uint32_t count = r.u32();
  ckpt.arrays.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedArray a;
    a.name = std::string(r.bytes(r.u32()));
    Shape shape(r.u32());
    if (shape.empty()) throw FormatError("checkpoint: array '" + a.name + "' has rank 0");
    for (auto& d : shape) {
      d = r.u64();
      if (d == 0 || d > (std::uint64_t{1} << 32)) throw FormatError("checkpoint: bad dimension in '" + a.name + "'");
    }
    if (numel(shape) * 8 > r.remaining()) throw FormatError("checkpoint: truncated payload for '" + a.name + "'");
    a.value = Tensor(shape);
    r.f64s(a.value.data());
    ckpt.arrays.push_back(std::move(a));
  }
  r.expect_end();
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_atomic(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

void append_parameters(Checkpoint& ckpt, const ParameterSet& params, std::string_view prefix) {
  for (const auto& p : params) ckpt.arrays.push_back({std::string(prefix) + p.name, p.value});
}

void restore_parameters(const Checkpoint& ckpt, ParameterSet& params, std::string_view prefix) {
  for (auto& p : params) {
    const Tensor* t = ckpt.find(std::string(prefix) + p.name);
    if (!t) throw FormatError("checkpoint: missing array '" + std::string(prefix) + p.name + "'");
    if (t->shape() != p.value.shape()) {
      throw FormatError("checkpoint: '" + p.name + "' has shape " + to_string(t->shape()) + ", model expects " +
                        to_string(p.value.shape()));
    }
    p.value = *t;
  }
}

}  // namespace cdlab
