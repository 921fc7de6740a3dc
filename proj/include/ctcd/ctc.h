// include/ctcd/ctc.h

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

#ifndef CTCD_CTC_H_
#define CTCD_CTC_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "ctcd/dense_array.h"

namespace ctcd {

// Target label sequence over Y (blank excluded). The blank id is always
// alphabet_size, i.e. the last index of Y' = Y + {blank}.
struct LabelSeq {
  std::vector<int> labels;
  int alphabet_size = 0;  // |Y|, without blank

  int num_classes() const { return alphabet_size + 1; }  // |Y'|
  int blank_id() const { return alphabet_size; }
  void validate() const;
  bool operator==(const LabelSeq& o) const {
    return labels == o.labels && alphabet_size == o.alphabet_size;
  }
};

// Per-frame label assignment over Y', length exactly T.
struct Path {
  std::vector<int> frames;
};

// T x |Y'| row-stochastic matrix of frame posteriors.
struct PosteriorGrid {
  int64_t num_frames = 0;
  int64_t num_classes = 0;  // |Y'|
  std::vector<double> values;  // row-major

  int blank_id() const { return static_cast<int>(num_classes) - 1; }
  double at(int64_t t, int64_t k) const { return values[static_cast<size_t>(t * num_classes + k)]; }
  void validate() const;  // rows sum to 1 within 1e-9, entries >= 0

  // Row-wise softmax of a [T, |Y'|] logits array (values only).
  static PosteriorGrid from_logits(const Array& logits);
};

// Merge consecutive repeats, then drop blanks.
LabelSeq collapse(const Path& path, int num_classes);

// Shortest T able to express the target: N plus one separator blank per
// adjacent repeated pair.
int64_t min_expressible_frames(const LabelSeq& target);

// ln sum over all paths collapsing to target of prod_t grid[t][pi_t],
// by explicit enumeration; -inf when no path exists. Enumeration budget
// |Y'|^T <= 10^7, otherwise UsageError.
double brute_force_log_prob(const PosteriorGrid& grid, const LabelSeq& target);

// -ln p(target | logits) via the log-space forward algorithm over the
// blank-augmented target, built from tape primitives so the gradient
// comes out of the same code path. Throws InfeasibleTargetError when the
// target cannot be expressed in T frames.
Array ctc_loss(const Array& logits, const LabelSeq& target);

// collapse(argmax per frame); argmax ties break toward the lowest index.
LabelSeq greedy_decode(const PosteriorGrid& grid);

struct BeamHyp {
  LabelSeq seq;
  double log_prob;
};

// Prefix beam search over collapsed sequences. Results are sorted by
// descending log-prob; equal scores order shorter-then-lexicographically-
// smaller first. With beam_width >= |Y'|^T the search is exhaustive.
std::vector<BeamHyp> beam_nbest(const PosteriorGrid& grid, int beam_width, int n);

}  // namespace ctcd

#endif  // CTCD_CTC_H_
