// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cdlab {

/// Flat key=value configuration. Lines starting with '#' and blank lines are
/// ignored. Typed reads consume keys so leftovers can be reported.
class ConfigMap {
 public:
  static ConfigMap parse(std::string_view text, std::string_view source = "config");

  void set(std::string key, std::string value);
  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;

  /// Returns the value and marks the key consumed.
  std::optional<std::string> take(std::string_view key);

  /// Later entries win.
  void merge(const ConfigMap& other);

  std::vector<std::string> unconsumed() const;
  /// Throws ContractError naming every key not consumed by a reader.
  void reject_unconsumed() const;

  /// Sorted key=value lines.
  std::string to_text() const;
  const std::map<std::string, std::string, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
  std::set<std::string, std::less<>> consumed_;
};

void parse_value(std::string_view text, double& out);
void parse_value(std::string_view text, unsigned long& out);
void parse_value(std::string_view text, unsigned long long& out);
void parse_value(std::string_view text, bool& out);
void parse_value(std::string_view text, std::string& out);

/// Round-trip exact for doubles (%.17g).
std::string format_value(double v);
std::string format_value(unsigned long v);
std::string format_value(unsigned long long v);
std::string format_value(bool v);
std::string format_value(const std::string& v);

/// Visitor that fills fields from a ConfigMap.
class ConfigReader {
 public:
  explicit ConfigReader(ConfigMap& map) : map_(map) {}

  template <class T>
  void operator()(std::string_view key, T& field) {
    if (auto text = map_.take(key)) parse_field(key, *text, field);
  }

 private:
  template <class T>
  void parse_field(std::string_view key, const std::string& text, T& field);
  ConfigMap& map_;
};

/// Visitor that writes fields into a ConfigMap.
class ConfigWriter {
 public:
  explicit ConfigWriter(ConfigMap& map) : map_(map) {}

  template <class T>
  void operator()(std::string_view key, T& field) {
    map_.set(std::string(key), format_value(field));
  }

 private:
  ConfigMap& map_;
};

[[noreturn]] void throw_unknown_key(const std::string& key);
[[noreturn]] void throw_bad_value(std::string_view key, const std::string& text, const char* what);

template <class T>
void ConfigReader::parse_field(std::string_view key, const std::string& text, T& field) {
  try {
    parse_value(text, field);
  } catch (const std::exception& e) {
    throw_bad_value(key, text, e.what());
  }
}

/// Reads every field a config struct exposes through `visit(V&)`.
template <class Config>
void read_config(ConfigMap& map, Config& cfg) {
  ConfigReader r(map);
  cfg.visit(r);
}

template <class Config>
void write_config(ConfigMap& map, Config cfg) {
  ConfigWriter w(map);
  cfg.visit(w);
}

/// Writes the fields of `cfg` as `<prefix><key>` entries.
template <class Config>
void write_prefixed(ConfigMap& out, std::string_view prefix, Config cfg) {
  ConfigMap m;
  write_config(m, cfg);
  for (const auto& [k, v] : m.entries()) out.set(std::string(prefix) + k, v);
}

/// Overlays every `<prefix>` entry of `map` onto `cfg` and marks it consumed.
/// Throws ContractError on keys `cfg` does not have.
template <class Config>
void read_prefixed(ConfigMap& map, std::string_view prefix, Config& cfg) {
  ConfigMap sub;
  std::vector<std::string> keys;
  for (const auto& [k, v] : map.entries()) {
    if (k.starts_with(prefix)) keys.push_back(k);
  }
  for (const auto& k : keys) sub.set(k.substr(prefix.size()), *map.take(k));
  read_config(sub, cfg);
  for (const auto& k : sub.unconsumed()) throw_unknown_key(std::string(prefix) + k);
}

/// Fresh `Config` from the `<prefix>` entries of a const map.
template <class Config>
Config read_prefixed(const ConfigMap& map, std::string_view prefix) {
  ConfigMap copy = map;
  Config cfg;
  read_prefixed(copy, prefix, cfg);
  return cfg;
}

}  // namespace cdlab
