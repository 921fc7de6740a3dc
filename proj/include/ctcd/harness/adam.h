// include/ctcd/harness/adam.h

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

#ifndef CTCD_HARNESS_ADAM_H_
#define CTCD_HARNESS_ADAM_H_

#include <cstdint>
#include <vector>

#include "ctcd/dense_array.h"
#include "ctcd/harness/config.h"

namespace ctcd {

// Plain Adam with bias correction. With poly_decay the learning rate falls
// linearly to zero over total_steps. step() consumes and clears the
// accumulated gradients; a parameter without a gradient this step counts
// as zero.
class Adam {
 public:
  Adam(std::vector<Array> params, const AdamConfig& cfg, int64_t total_steps);

  void step();
  int64_t steps_taken() const { return t_; }
  double current_lr() const;

 private:
  std::vector<Array> params_;
  AdamConfig cfg_;
  int64_t total_steps_;
  int64_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace ctcd

#endif  // CTCD_HARNESS_ADAM_H_
