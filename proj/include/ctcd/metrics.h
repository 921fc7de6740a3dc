// include/ctcd/metrics.h

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

#ifndef CTCD_METRICS_H_
#define CTCD_METRICS_H_

#include <cstdint>
#include <vector>

#include "ctcd/ctc.h"
#include "ctcd/error.h"

namespace ctcd {

struct ErrorCounts {
  int64_t substitutions = 0;
  int64_t insertions = 0;
  int64_t deletions = 0;
  int64_t reference_length = 0;

  int64_t total() const { return substitutions + insertions + deletions; }
  double rate() const;  // (S+I+D) / reference_length

  ErrorCounts& operator+=(const ErrorCounts& o) {
    substitutions += o.substitutions;
    insertions += o.insertions;
    deletions += o.deletions;
    reference_length += o.reference_length;
    return *this;
  }
};

// Levenshtein alignment with unit costs. On equal total cost the traceback
// prefers substitution over delete over insert, so an a<->b swap scores as
// two substitutions rather than an insert+delete pair.
template <typename T>
ErrorCounts edit_distance(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const size_t n = ref.size(), m = hyp.size();
  struct Cell {
    int64_t total, sub, ins, del;
  };
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = {static_cast<int64_t>(j), 0, static_cast<int64_t>(j), 0};
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = {static_cast<int64_t>(i), 0, 0, static_cast<int64_t>(i)};
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub_cost = ref[i - 1] == hyp[j - 1] ? 0 : 1;
      Cell diag = {prev[j - 1].total + sub_cost, prev[j - 1].sub + sub_cost, prev[j - 1].ins,
                   prev[j - 1].del};
      Cell del = {prev[j].total + 1, prev[j].sub, prev[j].ins, prev[j].del + 1};
      Cell ins = {cur[j - 1].total + 1, cur[j - 1].sub, cur[j - 1].ins + 1, cur[j - 1].del};
      Cell best = diag;
      if (del.total < best.total) best = del;
      if (ins.total < best.total) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  ErrorCounts c;
  c.substitutions = prev[m].sub;
  c.insertions = prev[m].ins;
  c.deletions = prev[m].del;
  c.reference_length = static_cast<int64_t>(n);
  return c;
}

enum class ErrorRateLevel { kToken, kWord };

// Pooled corpus error rate: total errors over total reference tokens.
// Word level splits each label sequence on space_id; the space tokens
// themselves are not scored.
double error_rate(const std::vector<LabelSeq>& refs, const std::vector<LabelSeq>& hyps,
                  ErrorRateLevel level, int space_id = 0);

ErrorCounts pooled_counts(const std::vector<LabelSeq>& refs, const std::vector<LabelSeq>& hyps,
                          ErrorRateLevel level, int space_id = 0);

// Relative error rate reduction vs a baseline, in percent.
double rerr(double baseline_wer, double new_wer);

}  // namespace ctcd

#endif  // CTCD_METRICS_H_
