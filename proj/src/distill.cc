// src/distill.cc

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

#include "ctcd/distill.h"

#include <cmath>

#include "ctcd/ops.h"

namespace ctcd {

FrameWeightMask frame_weight_mask(const Array& w_tea) {
  if (w_tea.shape().rank() != 2) throw ConfigError("frame_weight_mask: want [T, D_t]");
  FrameWeightMask m;
  m.num_frames = w_tea.shape().dim(0);
  m.hidden_dim = w_tea.shape().dim(1);
  m.values.resize(static_cast<size_t>(m.num_frames * m.hidden_dim));
  const auto& v = w_tea.data();
  for (int64_t t = 0; t < m.num_frames; ++t) {
    double avg = 0.0;
    for (int64_t d = 0; d < m.hidden_dim; ++d)
      avg += v[static_cast<size_t>(t * m.hidden_dim + d)];
    avg /= static_cast<double>(m.hidden_dim);
    double w = 1.0 / (1.0 + std::exp(-avg));
    for (int64_t d = 0; d < m.hidden_dim; ++d)
      m.values[static_cast<size_t>(t * m.hidden_dim + d)] = w;
  }
  return m;
}

namespace {

Array rkd_loss_impl(const Array& w_tea, const Array& w_stu, const Conv1dAdapter& adapter,
                    bool weighted) {
  if (w_tea.shape().rank() != 2 || w_stu.shape().rank() != 2)
    throw ConfigError("rkd_loss: want rank-2 representations");
  if (w_tea.shape().dim(0) != w_stu.shape().dim(0))
    throw ConfigError("rkd_loss: time length mismatch: teacher " + w_tea.shape().str() +
                      " vs student " + w_stu.shape().str() + " (encoders must preserve T)");
  Array projected = adapter.forward(w_stu);
  if (projected.shape() != w_tea.shape())
    throw ConfigError("rkd_loss: adapter output " + projected.shape().str() +
                      " does not match teacher " + w_tea.shape().str());
  Array diff = sub(w_tea.detached(), projected);
  if (weighted) diff = mul(frame_weight_mask(w_tea).as_array(), diff);
  return sum(square(diff));
}

}  // namespace

Array rkd_loss(const Array& w_tea, const Array& w_stu, const Conv1dAdapter& adapter) {
  return rkd_loss_impl(w_tea, w_stu, adapter, true);
}

Array rkd_loss_unweighted(const Array& w_tea, const Array& w_stu, const Conv1dAdapter& adapter) {
  return rkd_loss_impl(w_tea, w_stu, adapter, false);
}

Array skd_loss(const Array& f_tea, const Array& f_stu, double tau) {
  if (f_tea.shape() != f_stu.shape())
    throw ConfigError("skd_loss: logit shapes differ: " + f_tea.shape().str() + " vs " +
                      f_stu.shape().str());
  if (!(tau > 0.0)) throw ConfigError("skd_loss: temperature must be > 0");
  int axis = f_stu.shape().rank() - 1;
  Array p_tea = softmax(scale(f_tea.detached(), 1.0 / tau), axis);
  Array p_stu = softmax(scale(f_stu, 1.0 / tau), axis);
  return sum(square(sub(p_tea, p_stu)));
}

Array combined_loss(const Array& ctc, const Array& skd, double lambda_skd) {
  if (lambda_skd < 0.0) throw ConfigError("combined_loss: lambda_skd must be >= 0");
  return add(ctc, scale(skd, lambda_skd));
}

Array floored_log_softmax(const Array& f, double floor) {
  if (!(floor > 0.0)) throw ConfigError("floored_log_softmax: floor must be > 0");
  int axis = f.shape().rank() - 1;
  return clamp_min(log_softmax(f, axis), std::log(floor));
}

Array frame_kd_loss(const PosteriorGrid& p_tea, const Array& f_stu) {
  if (f_stu.shape().rank() != 2 || f_stu.shape().dim(0) != p_tea.num_frames ||
      f_stu.shape().dim(1) != p_tea.num_classes)
    throw ConfigError("frame_kd_loss: student logits " + f_stu.shape().str() +
                      " do not match teacher grid");
  Array tea = Array::from({p_tea.num_frames, p_tea.num_classes}, p_tea.values);
  return scale(sum(mul(tea, floored_log_softmax(f_stu))), -1.0);
}

GuidedMask guided_mask(const PosteriorGrid& p_tea) {
  p_tea.validate();
  GuidedMask m;
  m.num_frames = p_tea.num_frames;
  m.num_classes = p_tea.num_classes;
  m.values.assign(static_cast<size_t>(m.num_frames * m.num_classes), 0.0);
  for (int64_t t = 0; t < m.num_frames; ++t) {
    int64_t arg = 0;
    for (int64_t k = 1; k < m.num_classes; ++k)
      if (p_tea.at(t, k) > p_tea.at(t, arg)) arg = k;
    m.values[static_cast<size_t>(t * m.num_classes + arg)] = 1.0;
  }
  return m;
}

Array guided_loss(const GuidedMask& mask, const Array& f_stu, double guided_weight) {
  if (guided_weight < 0.0) throw ConfigError("guided_loss: weight must be >= 0");
  if (f_stu.shape().rank() != 2 || f_stu.shape().dim(0) != mask.num_frames ||
      f_stu.shape().dim(1) != mask.num_classes)
    throw ConfigError("guided_loss: student logits " + f_stu.shape().str() +
                      " do not match mask");
  Array picked = sum(mul(mask.as_array(), floored_log_softmax(f_stu)));
  return scale(picked, -guided_weight / static_cast<double>(mask.num_frames));
}

std::vector<std::pair<LabelSeq, double>> seq_kd_targets(const PosteriorGrid& teacher_grid, int n,
                                                        int beam_width) {
  if (n < 1) throw ConfigError("seq_kd_targets: n must be >= 1");
  std::vector<BeamHyp> hyps = beam_nbest(teacher_grid, std::max(beam_width, n), n);
  if (hyps.empty()) throw ConfigError("seq_kd_targets: teacher produced no hypotheses");
  // Softmax over the hypotheses' log-probs.
  double m = hyps[0].log_prob;
  for (const BeamHyp& h : hyps) m = std::max(m, h.log_prob);
  double z = 0.0;
  for (const BeamHyp& h : hyps) z += std::exp(h.log_prob - m);
  std::vector<std::pair<LabelSeq, double>> out;
  out.reserve(hyps.size());
  for (const BeamHyp& h : hyps)
    out.emplace_back(h.seq, std::exp(h.log_prob - m) / z);
  return out;
}

}  // namespace ctcd
