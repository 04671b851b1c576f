// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cdlab Authors

#include "cdlab/parameters.hpp"

namespace cdlab {

ParameterSet::ParameterSet(const ParameterSet& other)
    : init_seed(other.init_seed), items_(other.items_), index_(other.index_) {}

ParameterSet& ParameterSet::operator=(const ParameterSet& other) {
  if (this != &other) {
    items_ = other.items_;
    index_ = other.index_;
    init_seed = other.init_seed;
  }
  return *this;
}

Parameter& ParameterSet::add(std::string name, Tensor value) {
  if (index_.contains(name)) throw ContractError("parameters: duplicate name '" + name + "'");
  index_.emplace(name, items_.size());
  Tensor grad(value.shape(), 0.0);
  items_.push_back(Parameter{std::move(name), std::move(value), std::move(grad)});
  return items_.back();
}

bool ParameterSet::contains(std::string_view name) const { return index_.find(name) != index_.end(); }

Parameter& ParameterSet::at(std::string_view name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw ContractError("parameters: no parameter named '" + std::string(name) + "'");
  return items_[it->second];
}

const Parameter& ParameterSet::at(std::string_view name) const {
  return const_cast<ParameterSet*>(this)->at(name);
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p.value.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& p : items_) p.grad.fill(0.0);
}

std::string_view layer_group(std::string_view name) {
  auto dot = name.find('.');
  return dot == std::string_view::npos ? name : name.substr(0, dot);
}

}  // namespace cdlab
