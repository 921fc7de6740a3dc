// src/dense_array.cc

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

#include "ctcd/dense_array.h"

#include <sstream>

namespace ctcd {

Shape::Shape(std::initializer_list<int64_t> dims) : rank_(0), dims_{0, 0, 0} {
  if (dims.size() < 1 || dims.size() > 3)
    throw ConfigError("Shape: rank must be 1..3, got " + std::to_string(dims.size()));
  for (int64_t d : dims) {
    if (d < 0) throw ConfigError("Shape: negative dim");
    dims_[static_cast<size_t>(rank_++)] = d;
  }
}

Shape Shape::of(const std::vector<int64_t>& dims) {
  Shape s;
  if (dims.size() < 1 || dims.size() > 3)
    throw ConfigError("Shape: rank must be 1..3, got " + std::to_string(dims.size()));
  for (int64_t d : dims) {
    if (d < 0) throw ConfigError("Shape: negative dim");
    s.dims_[static_cast<size_t>(s.rank_++)] = d;
  }
  return s;
}

int64_t Shape::numel() const {
  int64_t n = 1;
  for (int i = 0; i < rank_; ++i) n *= dims_[static_cast<size_t>(i)];
  return rank_ == 0 ? 0 : n;
}

bool Shape::operator==(const Shape& o) const {
  if (rank_ != o.rank_) return false;
  for (int i = 0; i < rank_; ++i)
    if (dims_[static_cast<size_t>(i)] != o.dims_[static_cast<size_t>(i)]) return false;
  return true;
}

std::string Shape::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rank_; ++i) os << (i ? "x" : "") << dim(i);
  os << "]";
  return os.str();
}

Array Array::from(Shape shape, std::vector<double> value, bool requires_grad) {
  if (static_cast<int64_t>(value.size()) != shape.numel())
    throw ConfigError("Array::from: data length " + std::to_string(value.size()) +
                      " does not match shape " + shape.str());
  auto node = std::make_shared<ArrayNode>();
  node->shape = shape;
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return Array(std::move(node));
}

Array Array::zeros(Shape shape, bool requires_grad) {
  return from(shape, std::vector<double>(static_cast<size_t>(shape.numel()), 0.0), requires_grad);
}

Array Array::full(Shape shape, double v) {
  return from(shape, std::vector<double>(static_cast<size_t>(shape.numel()), v), false);
}

double Array::item() const {
  if (numel() != 1) throw UsageError("Array::item: array has " + std::to_string(numel()) + " elements");
  return node_->value[0];
}

const std::vector<double>& Array::grad() const {
  if (!has_grad()) throw UsageError("Array::grad: no gradient accumulated");
  return node_->grad;
}

std::vector<double>& Array::grad_mutable() {
  node_->ensure_grad();
  return node_->grad;
}

void Array::zero_grad() {
  if (node_) node_->grad.clear();
}

Array Array::detached() const {
  return Array::from(node_->shape, node_->value, false);
}

thread_local Tape* Tape::active_ = nullptr;

Tape::Tape() : prev_(active_) { active_ = this; }

Tape::~Tape() { active_ = prev_; }

void Tape::backward(const Array& root) {
  if (!root.valid() || root.shape() != Shape{1})
    throw UsageError("Tape::backward: root must be a scalar (shape [1])");
  if (!root.requires_grad())
    throw UsageError("Tape::backward: root does not participate in this tape");
  root.node()->ensure_grad();
  root.node()->grad[0] += 1.0;
  for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) (*it)();
}

}  // namespace ctcd
