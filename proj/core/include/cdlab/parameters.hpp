// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <string_view>

#include "cdlab/tensor.hpp"

namespace cdlab {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;  // same shape as value
};

/// Named, ordered collection of learnable tensors. Element addresses are
/// stable for the lifetime of the set, so tapes may hold pointers into it.
class ParameterSet {
 public:
  ParameterSet() = default;
  ParameterSet(const ParameterSet& other);
  ParameterSet& operator=(const ParameterSet& other);
  ParameterSet(ParameterSet&&) noexcept = default;
  ParameterSet& operator=(ParameterSet&&) noexcept = default;

  Parameter& add(std::string name, Tensor value);

  bool contains(std::string_view name) const;
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;

  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;

  auto begin() { return items_.begin(); }
  auto end() { return items_.end(); }
  auto begin() const { return items_.begin(); }
  auto end() const { return items_.end(); }

  void zero_grad();

  std::uint64_t init_seed = 0;

 private:
  std::deque<Parameter> items_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

/// Layer-group key of a parameter name: everything before the first '.'.
std::string_view layer_group(std::string_view name);

}  // namespace cdlab
