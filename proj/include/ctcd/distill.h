// include/ctcd/distill.h

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

#ifndef CTCD_DISTILL_H_
#define CTCD_DISTILL_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "ctcd/ctc.h"
#include "ctcd/dense_array.h"
#include "ctcd/encoder.h"

namespace ctcd {

// Probabilities are floored here before any log, which turns the
// KL-divergence blow-up on disagreeing spikes into a large finite value.
constexpr double kProbFloor = 1e-12;

// Frame weighting mask: sigmoid of the per-frame mean of the teacher
// representation, tiled across the hidden dim. Constant w.r.t. training.
struct FrameWeightMask {
  int64_t num_frames = 0;
  int64_t hidden_dim = 0;
  std::vector<double> values;  // row-major [T, D_t], row-constant, in (0,1)

  Array as_array() const { return Array::from({num_frames, hidden_dim}, values); }
};

FrameWeightMask frame_weight_mask(const Array& w_tea);

struct LayerPair {
  int teacher_layer = -1;  // -1 means last layer
  int student_layer = -1;
};

// || M_FW (.) (w_tea - adapter(w_stu)) ||_2^2 for one layer pair. The
// teacher side is detached; gradients reach only w_stu and the adapter.
// Both representations must share T.
Array rkd_loss(const Array& w_tea, const Array& w_stu, const Conv1dAdapter& adapter);

// Same, with the frame weighting mask replaced by all-ones.
Array rkd_loss_unweighted(const Array& w_tea, const Array& w_stu, const Conv1dAdapter& adapter);

// || softmax(f_tea/tau) - softmax(f_stu/tau) ||_2^2 summed over frames.
// Teacher logits are detached.
Array skd_loss(const Array& f_tea, const Array& f_stu, double tau);

// L_CTC + lambda_skd * L_SKD.
Array combined_loss(const Array& ctc, const Array& skd, double lambda_skd);

// Frame-level cross-entropy KD baseline: -sum_t sum_k p_tea ln p_stu.
Array frame_kd_loss(const PosteriorGrid& p_tea, const Array& f_stu);

// One-hot argmax mask of the teacher posterior (ties toward lowest index).
struct GuidedMask {
  int64_t num_frames = 0;
  int64_t num_classes = 0;
  std::vector<double> values;  // exactly one 1 per row

  Array as_array() const { return Array::from({num_frames, num_classes}, values); }
};

GuidedMask guided_mask(const PosteriorGrid& p_tea);

// guided_weight * (-(1/T) sum_t ln p_stu[t][argmax_t]).
Array guided_loss(const GuidedMask& mask, const Array& f_stu, double guided_weight);

// Teacher n-best hypotheses with softmax-of-log-prob weights (renormalized
// over the returned hypotheses; they sum to 1).
std::vector<std::pair<LabelSeq, double>> seq_kd_targets(const PosteriorGrid& teacher_grid, int n,
                                                        int beam_width);

// log(max(softmax(f), floor)) built from primitives; shared by the
// cross-entropy style losses.
Array floored_log_softmax(const Array& f, double floor = kProbFloor);

}  // namespace ctcd

#endif  // CTCD_DISTILL_H_
