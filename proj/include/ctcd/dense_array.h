// include/ctcd/dense_array.h

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

#ifndef CTCD_DENSE_ARRAY_H_
#define CTCD_DENSE_ARRAY_H_

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <string>
#include <vector>

#include "ctcd/error.h"

namespace ctcd {

// Row-major shape of rank 1..3. Scalars are shape [1].
class Shape {
 public:
  Shape() : rank_(0), dims_{0, 0, 0} {}
  Shape(std::initializer_list<int64_t> dims);
  static Shape of(const std::vector<int64_t>& dims);

  int rank() const { return rank_; }
  int64_t dim(int i) const { return dims_[static_cast<size_t>(i)]; }
  int64_t numel() const;
  bool operator==(const Shape& o) const;
  bool operator!=(const Shape& o) const { return !(*this == o); }
  std::string str() const;  // e.g. "[4x3]"

 private:
  int rank_;
  std::array<int64_t, 3> dims_;
};

struct ArrayNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;

  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
  }
};

// Shared handle to a dense f64 array. Values are written once by the
// producing op; gradients accumulate additively across backward passes
// until zero_grad(). Leaves (parameters) may be mutated between steps by
// the training loop, which owns them exclusively.
class Array {
 public:
  Array() = default;

  static Array from(Shape shape, std::vector<double> value, bool requires_grad = false);
  static Array zeros(Shape shape, bool requires_grad = false);
  static Array full(Shape shape, double v);
  static Array scalar(double v) { return full({1}, v); }

  bool valid() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t numel() const { return static_cast<int64_t>(node_->value.size()); }
  std::vector<double>& data() { return node_->value; }
  const std::vector<double>& data() const { return node_->value; }
  double item() const;

  bool requires_grad() const { return node_ && node_->requires_grad; }
  void set_requires_grad(bool b) { node_->requires_grad = b; }
  bool has_grad() const { return node_ && !node_->grad.empty(); }
  const std::vector<double>& grad() const;
  std::vector<double>& grad_mutable();
  void zero_grad();

  // Copy of the values with no gradient participation.
  Array detached() const;

  const std::shared_ptr<ArrayNode>& node() const { return node_; }
  static Array wrap(std::shared_ptr<ArrayNode> node) { return Array(std::move(node)); }

 private:
  explicit Array(std::shared_ptr<ArrayNode> node) : node_(std::move(node)) {}
  std::shared_ptr<ArrayNode> node_;
};

// Wengert list. Ops push one backward step per recorded primitive;
// backward() replays them in exact reverse order. One live tape per thread;
// construction nests (the previous active tape is restored on destruction).
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  static Tape* active() { return active_; }

  void record(std::function<void()> step) { steps_.push_back(std::move(step)); }
  size_t size() const { return steps_.size(); }

  // Seeds d(root)/d(root) = 1 and replays the list backwards. root must be
  // scalar (shape [1]) and grad-bearing, otherwise UsageError.
  void backward(const Array& root);

 private:
  std::vector<std::function<void()>> steps_;
  Tape* prev_ = nullptr;
  static thread_local Tape* active_;
};

}  // namespace ctcd

#endif  // CTCD_DENSE_ARRAY_H_
