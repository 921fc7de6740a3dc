// include/ctcd/synthdata.h

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

#ifndef CTCD_SYNTHDATA_H_
#define CTCD_SYNTHDATA_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ctcd/ctc.h"
#include "ctcd/dense_array.h"
#include "ctcd/rng.h"

namespace ctcd {

// Synthetic "toy speech": each symbol is its template row held for a drawn
// duration plus Gaussian noise; optional silence (zero template + noise)
// between symbols makes the CTC alignment nontrivial. One label doubles as
// the space symbol so word-level WER is meaningful.
struct TaskSpec {
  int alphabet_size = 0;  // |Y|, including the space symbol
  int space_id = 0;
  int feature_dim = 0;
  std::vector<double> templates;  // row-major [|Y|, feature_dim], pairwise distinct
  int min_duration = 1;           // frames per symbol
  int max_duration = 1;
  double noise_sigma = 0.0;
  double silence_prob = 0.0;  // chance of a silence segment at each of the L+1 gaps
  int min_utt_len = 1;        // symbols per utterance
  int max_utt_len = 1;
  uint64_t seed = 0;

  void validate() const;
  // Deterministic pairwise-distinct templates drawn from their own stream.
  static std::vector<double> default_templates(int alphabet_size, int feature_dim,
                                               uint64_t template_seed);
};

struct Utterance {
  std::string id;
  Array features;  // [T, feature_dim], no gradient
  LabelSeq labels;
};

struct Dataset {
  int alphabet_size = 0;  // |Y|
  int feature_dim = 0;
  std::vector<Utterance> utterances;
};

// Deterministic given spec.seed. Every utterance satisfies
// T >= N + (number of adjacent repeated labels): the second symbol of a
// repeated pair always gets at least two frames.
Dataset generate(const TaskSpec& spec, int count);

// Text format (see docs/formats.md): header "CTCD1 |Y| D_in", then per
// utterance: id line, "N label..." line, "T" line, T rows of D_in floats in
// shortest round-trip form, and a blank separator line. Round-trips
// bit-exactly. Writes atomically.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

}  // namespace ctcd

#endif  // CTCD_SYNTHDATA_H_
