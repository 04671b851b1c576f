// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/sim/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cdlab/binary_io.hpp"
#include "cdlab/config.hpp"
#include "cdlab/parallel.hpp"
#include "cdlab/rng.hpp"
#include "cdlab/tensor.hpp"

namespace cdlab::sim {
namespace {

constexpr std::string_view kMagic = "CDS1";

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Splits on single spaces; the metadata writer never emits anything else.
std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  while (!line.empty()) {
    const auto sp = line.find(' ');
    out.push_back(line.substr(0, sp));
    if (sp == std::string_view::npos) break;
    line = line.substr(sp + 1);
  }
  return out;
}

template <class T>
T parse_num(std::string_view s) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw FormatError("dataset metadata: bad number '" + std::string(s) + "'");
  }
  return v;
}

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xffffffffu) throw FormatError(std::string("dataset: ") + what + " exceeds 32 bits");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void ChannelSequence::validate() const {
  if (slots.empty()) throw ContractError("channel sequence: empty");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].slot != slots[0].slot + static_cast<std::int64_t>(i)) {
      throw ContractError("channel sequence: slot indices are not consecutive at position " + std::to_string(i));
    }
    if (slots[i].H.rows() != slots[0].H.rows() || slots[i].H.cols() != slots[0].H.cols()) {
      throw ContractError("channel sequence: slot shapes differ");
    }
    if (!slots[i].H.all_finite()) throw ContractError("channel sequence: non-finite entry in slot " + std::to_string(i));
  }
  if (!positions.empty() && positions.size() != slots.size()) {
    throw ContractError("channel sequence: positions do not align with slots");
  }
}

void Dataset::validate() const {
  for (const auto& s : sequences) {
    s.validate();
    if (s.slots[0].H.rows() != num_antennas || s.slots[0].H.cols() != num_subcarriers) {
      throw ContractError("dataset: sequence shape disagrees with header");
    }
  }
  for (const auto& n : notes) {
    if (n.find('\n') != std::string::npos) throw ContractError("dataset: note contains a newline");
  }
}

std::string encode_dataset(const Dataset& ds) {
  ds.validate();
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(checked_u32(ds.num_antennas, "N_t"));
  w.u32(checked_u32(ds.num_subcarriers, "N_c"));
  w.u32(checked_u32(ds.sequences.size(), "sequence count"));
  for (const auto& s : ds.sequences) {
    w.u32(checked_u32(s.size(), "sequence length"));
    w.u32(static_cast<std::uint32_t>(s.mobility));
    w.u64(static_cast<std::uint64_t>(s.slots[0].slot));
  }
  for (const auto& s : ds.sequences) {
    for (const auto& m : s.slots) {
      for (const cplx& v : m.H.data()) {
        w.f64(v.real());
        w.f64(v.imag());
      }
    }
  }
  std::ostringstream meta;
  for (const auto& n : ds.notes) meta << "note " << n << '\n';
  for (std::size_t i = 0; i < ds.sequences.size(); ++i) {
    const auto& s = ds.sequences[i];
    meta << "seq " << i << " seed " << s.seed << " positions " << s.positions.size() << '\n';
    for (const auto& p : s.positions) meta << fmt17(p.x) << ' ' << fmt17(p.y) << ' ' << fmt17(p.z) << '\n';
  }
  const std::string text = meta.str();
  w.u64(text.size());
  w.bytes(text);
  return w.take();
}

Dataset decode_dataset(std::string_view bytes) {
  ByteReader r(bytes, "dataset");
  if (r.bytes(4) != kMagic) throw FormatError("dataset: bad magic (expected CDS1)");
  Dataset ds;
  ds.num_antennas = r.u32();
  ds.num_subcarriers = r.u32();
  const std::uint32_t count = r.u32();
  if (ds.num_antennas == 0 || ds.num_subcarriers == 0) throw FormatError("dataset: zero dimension in header");
  ds.sequences.resize(count);
  for (auto& s : ds.sequences) {
    const std::uint32_t len = r.u32();
    const std::uint32_t mob = r.u32();
    const auto first = static_cast<std::int64_t>(r.u64());
    if (len == 0) throw FormatError("dataset: empty sequence");
    if (mob > 1) throw FormatError("dataset: unknown mobility tag " + std::to_string(mob));
    s.mobility = static_cast<Mobility>(mob);
    s.slots.resize(len);
    for (std::uint32_t k = 0; k < len; ++k) s.slots[k].slot = first + k;
  }
  for (auto& s : ds.sequences) {
    for (auto& m : s.slots) {
      m.H = CMatrix(ds.num_antennas, ds.num_subcarriers);
      for (cplx& v : m.H.data()) {
        const double re = r.f64();
        const double im = r.f64();
        v = {re, im};
      }
    }
  }
  const std::uint64_t meta_len = r.u64();
  const std::string_view text = r.bytes(meta_len);
  r.expect_end();

  std::size_t pos = 0;
  auto next_line = [&]() -> std::string_view {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) throw FormatError("dataset metadata: truncated");
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  std::size_t seq_index = 0;
  while (pos < text.size()) {
    const auto line = next_line();
    if (line.starts_with("note ")) {
      ds.notes.emplace_back(line.substr(5));
      continue;
    }
    const auto f = fields(line);
    if (f.size() != 6 || f[0] != "seq" || f[2] != "seed" || f[4] != "positions" ||
        parse_num<std::size_t>(f[1]) != seq_index || seq_index >= ds.sequences.size()) {
      throw FormatError("dataset metadata: malformed line '" + std::string(line) + "'");
    }
    auto& s = ds.sequences[seq_index++];
    s.seed = parse_num<std::uint64_t>(f[3]);
    const auto npos = parse_num<std::size_t>(f[5]);
    for (std::size_t k = 0; k < npos; ++k) {
      const auto c = fields(next_line());
      if (c.size() != 3) throw FormatError("dataset metadata: bad position line");
      s.positions.push_back({parse_num<double>(c[0]), parse_num<double>(c[1]), parse_num<double>(c[2])});
    }
  }
  if (seq_index != ds.sequences.size()) throw FormatError("dataset metadata: missing sequence records");
  try {
    ds.validate();
  } catch (const ContractError& e) {
    throw FormatError(e.what());
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) { write_file_atomic(path, encode_dataset(ds)); }

Dataset load_dataset(const std::filesystem::path& path) { return decode_dataset(read_file(path)); }

ChannelSequence generate_sequence(const Scene& scene, const ScenarioConfig& cfg, Mobility kind, std::size_t length,
                                  const Region& region, std::uint64_t seed) {
  const ArrayGeometry array = make_array(cfg);
  const auto freqs = subcarrier_frequencies(cfg);
  ChannelSequence seq;
  seq.mobility = kind;
  seq.seed = seed;
  seq.positions = generate_trajectory(kind, length, region, cfg.motion, cfg.user_height, seed);
  seq.slots.reserve(length);
  for (std::size_t t = 0; t < length; ++t) {
    const auto paths = scene_to_paths(scene, seq.positions[t], cfg.speed_of_light);
    seq.slots.push_back({assemble_channel(paths, array, freqs, cfg.speed_of_light), static_cast<std::int64_t>(t)});
  }
  return seq;
}

ChannelSequence augment_with_indices(const ChannelSequence& seq, std::span<const std::size_t> indices) {
  if (seq.slots.empty()) throw ContractError("augment_sequence: empty source");
  if (indices.empty()) throw ContractError("augment_sequence: out_len must be at least 1");
  ChannelSequence out;
  out.mobility = seq.mobility;
  out.seed = seq.seed;
  const std::int64_t first = seq.slots[0].slot;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= seq.size()) throw ContractError("augment_sequence: index out of range");
    out.slots.push_back({seq.slots[indices[k]].H, first + static_cast<std::int64_t>(k)});
    if (!seq.positions.empty()) out.positions.push_back(seq.positions[indices[k]]);
  }
  return out;
}

ChannelSequence augment_sequence(const ChannelSequence& seq, std::size_t out_len, std::uint64_t seed) {
  if (seq.slots.empty()) throw ContractError("augment_sequence: empty source");
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, seq.size() - 1);
  std::vector<std::size_t> idx(out_len);
  for (auto& i : idx) i = pick(rng);
  return augment_with_indices(seq, idx);
}

void DatasetPlan::validate() const {
  if (train_length < 1 || test_length < 1) throw ContractError("dataset plan: sequence lengths must be at least 1");
  if (!(train_static_fraction >= 0.0 && train_static_fraction <= 1.0)) {
    throw ContractError("dataset plan: train_static_fraction must lie in [0, 1]");
  }
}

DatasetFiles DatasetFiles::in(const std::filesystem::path& dir) {
  return {dir / "train.cds", dir / "test_mobile.cds", dir / "test_static.cds", dir / "dataset_manifest.txt"};
}

GeneratedData generate_datasets(const ScenarioConfig& cfg, const DatasetPlan& plan, std::uint64_t seed,
                                std::size_t jobs) {
  cfg.validate();
  plan.validate();
  const std::uint64_t scene_seed = derive_seed(seed, "scene");
  const Scene scene = make_scene(cfg, scene_seed);
  const std::size_t nt = cfg.antenna_count();
  const std::size_t nc = cfg.num_subcarriers;

  auto build = [&](std::string_view label, std::size_t count, std::size_t length, const Region& region,
                   auto mobility_of) {
    Dataset ds;
    ds.num_antennas = nt;
    ds.num_subcarriers = nc;
    ds.sequences.resize(count);
    parallel_for(count, jobs, [&](std::size_t i) {
      ds.sequences[i] = generate_sequence(scene, cfg, mobility_of(i), length, region, derive_seed(seed, label, i));
    });
    ds.notes.push_back("split=" + std::string(label));
    ds.notes.push_back("root_seed=" + std::to_string(seed));
    ds.notes.push_back("scene_seed=" + std::to_string(scene_seed));
    return ds;
  };

  const auto train_static = static_cast<std::size_t>(
      std::llround(plan.train_static_fraction * static_cast<double>(plan.train_count)));
  const std::size_t train_mobile = plan.train_count - train_static;

  GeneratedData out;
  out.train = build("train", plan.train_count, plan.train_length, cfg.train_region, [&](std::size_t i) {
    return i < train_mobile ? Mobility::mobile : Mobility::quasi_static;
  });
  out.test_mobile = build("test_mobile", plan.test_mobile_count, plan.test_length, cfg.test_region,
                          [](std::size_t) { return Mobility::mobile; });
  out.test_static = build("test_static", plan.test_static_count, plan.test_length, cfg.test_region,
                          [](std::size_t) { return Mobility::quasi_static; });

  ConfigMap m;
  write_config(m, cfg);
  write_config(m, plan);
  m.set("seed", std::to_string(seed));
  m.set("scene_seed", std::to_string(scene_seed));
  m.set("num_antennas_effective", std::to_string(nt));
  out.manifest = m.to_text();
  return out;
}

DatasetFiles build_dataset(const ScenarioConfig& cfg, const DatasetPlan& plan, std::uint64_t seed,
                           const std::filesystem::path& out_dir, std::size_t jobs) {
  const GeneratedData data = generate_datasets(cfg, plan, seed, jobs);
  const DatasetFiles files = DatasetFiles::in(out_dir);
  save_dataset(files.train, data.train);
  save_dataset(files.test_mobile, data.test_mobile);
  save_dataset(files.test_static, data.test_static);
  write_file_atomic(files.manifest, data.manifest);
  return files;
}

}  // namespace cdlab::sim
