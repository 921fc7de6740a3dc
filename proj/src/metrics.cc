// src/metrics.cc

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

#include "ctcd/metrics.h"

#include <string>

namespace ctcd {

namespace {

// A word is the run of labels between space symbols, rendered as a
// comparable token string ("3.1.4").
std::vector<std::string> split_words(const LabelSeq& seq, int space_id) {
  std::vector<std::string> words;
  std::string cur;
  for (int l : seq.labels) {
    if (l == space_id) {
      if (!cur.empty()) words.push_back(cur);
      cur.clear();
    } else {
      if (!cur.empty()) cur += '.';
      cur += std::to_string(l);
    }
  }
  if (!cur.empty()) words.push_back(cur);
  return words;
}

}  // namespace

double ErrorCounts::rate() const {
  if (reference_length == 0) throw ConfigError("error rate undefined: empty reference");
  return static_cast<double>(total()) / static_cast<double>(reference_length);
}

ErrorCounts pooled_counts(const std::vector<LabelSeq>& refs, const std::vector<LabelSeq>& hyps,
                          ErrorRateLevel level, int space_id) {
  if (refs.size() != hyps.size())
    throw ConfigError("error_rate: reference and hypothesis counts differ");
  ErrorCounts pooled;
  for (size_t i = 0; i < refs.size(); ++i) {
    if (level == ErrorRateLevel::kToken) {
      pooled += edit_distance(refs[i].labels, hyps[i].labels);
    } else {
      pooled += edit_distance(split_words(refs[i], space_id), split_words(hyps[i], space_id));
    }
  }
  return pooled;
}

double error_rate(const std::vector<LabelSeq>& refs, const std::vector<LabelSeq>& hyps,
                  ErrorRateLevel level, int space_id) {
  return pooled_counts(refs, hyps, level, space_id).rate();
}

double rerr(double baseline_wer, double new_wer) {
  if (baseline_wer <= 0.0) throw ConfigError("rerr: baseline error rate must be > 0");
  return (baseline_wer - new_wer) / baseline_wer * 100.0;
}

}  // namespace ctcd
