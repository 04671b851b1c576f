// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "cdlab/tensor.hpp"

namespace cdlab {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
void parse_integer(std::string_view text, T& out) {
  text = trim(text);
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw ContractError("not a nonnegative integer");
  out = v;
}

}  // namespace

ConfigMap ConfigMap::parse(std::string_view text, std::string_view source) {
  ConfigMap m;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ContractError(std::string(source) + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ContractError(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
    m.set(std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return m;
}

void ConfigMap::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

bool ConfigMap::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

std::optional<std::string> ConfigMap::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> ConfigMap::take(std::string_view key) {
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  consumed_.insert(it->first);
  return it->second;
}

void ConfigMap::merge(const ConfigMap& other) {
  for (const auto& [k, v] : other.entries_) entries_[k] = v;
}

std::vector<std::string> ConfigMap::unconsumed() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (!consumed_.contains(k)) out.push_back(k);
  }
  return out;
}

void ConfigMap::reject_unconsumed() const {
  const auto left = unconsumed();
  if (left.empty()) return;
  std::string msg = "unknown config key";
  msg += left.size() > 1 ? "s: " : ": ";
  for (std::size_t i = 0; i < left.size(); ++i) msg += (i ? ", " : "") + left[i];
  throw ContractError(msg);
}

std::string ConfigMap::to_text() const {
  std::ostringstream os;
  for (const auto& [k, v] : entries_) os << k << '=' << v << '\n';
  return os.str();
}

void parse_value(std::string_view text, double& out) {
  text = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw ContractError("not a number");
  out = v;
}

void parse_value(std::string_view text, unsigned long& out) { parse_integer(text, out); }
void parse_value(std::string_view text, unsigned long long& out) { parse_integer(text, out); }

void parse_value(std::string_view text, bool& out) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "on" || text == "yes") {
    out = true;
  } else if (text == "0" || text == "false" || text == "off" || text == "no") {
    out = false;
  } else {
    throw ContractError("not a boolean");
  }
}

void parse_value(std::string_view text, std::string& out) { out = std::string(trim(text)); }

// Shortest text that parses back to the same double.
std::string format_value(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_value(unsigned long v) { return std::to_string(v); }
std::string format_value(unsigned long long v) { return std::to_string(v); }
std::string format_value(bool v) { return v ? "true" : "false"; }
std::string format_value(const std::string& v) { return v; }

void throw_bad_value(std::string_view key, const std::string& text, const char* what) {
  throw ContractError("config key '" + std::string(key) + "': bad value '" + text + "' (" + what + ")");
}

void throw_unknown_key(const std::string& key) { throw ContractError("unknown config key '" + key + "'"); }

}  // namespace cdlab
