// src/harness/adam.cc

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

#include "ctcd/harness/adam.h"

#include <cmath>

namespace ctcd {

Adam::Adam(std::vector<Array> params, const AdamConfig& cfg, int64_t total_steps)
    : params_(std::move(params)), cfg_(cfg), total_steps_(total_steps) {
  if (total_steps_ < 1) total_steps_ = 1;
  for (const Array& p : params_) {
    m_.emplace_back(p.data().size(), 0.0);
    v_.emplace_back(p.data().size(), 0.0);
  }
}

double Adam::current_lr() const {
  if (!cfg_.poly_decay) return cfg_.lr;
  double frac = 1.0 - static_cast<double>(t_) / static_cast<double>(total_steps_);
  if (frac < 0.0) frac = 0.0;
  return cfg_.lr * frac;
}

void Adam::step() {
  ++t_;
  const double lr = current_lr();
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (size_t pi = 0; pi < params_.size(); ++pi) {
    Array& p = params_[pi];
    const bool has_grad = p.has_grad();
    auto& m = m_[pi];
    auto& v = v_[pi];
    auto& data = p.data();
    for (size_t i = 0; i < data.size(); ++i) {
      double g = has_grad ? p.grad()[i] : 0.0;
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      double mhat = m[i] / bc1;
      double vhat = v[i] / bc2;
      data[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
    p.zero_grad();
  }
}

}  // namespace ctcd
