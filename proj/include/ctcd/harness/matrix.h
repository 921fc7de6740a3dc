// include/ctcd/harness/matrix.h

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

#ifndef CTCD_HARNESS_MATRIX_H_
#define CTCD_HARNESS_MATRIX_H_

#include <string>
#include <vector>

#include "ctcd/harness/trainer.h"

namespace ctcd {

// The five transfer scenarios. "cnn" is the TDNN family here.
//   cnn2rnn, cnn2cnn, rnn2cnn, rnn2rnn, mixed2cnn (SKD from the RNN
//   teacher, RKD from the TDNN teacher).
extern const std::vector<std::string> kAllScenarios;

struct MatrixConfig {
  RunConfig base;           // data paths, optimizer, epochs, distill knobs
  EncoderSpec student_tdnn;
  EncoderSpec student_rnn;
  std::string teacher_tdnn;  // checkpoint paths
  std::string teacher_rnn;
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::string> scenarios = kAllScenarios;
  std::vector<std::string> methods{"baseline", "skd-only", "tutornet"};
  std::string out_dir = "out/matrix";
};

struct MatrixRow {
  std::string scenario;
  std::string method;
  uint64_t seed = 0;
  double wer = 0.0;
  double ter = 0.0;
  double rerr_vs_baseline = 0.0;
};

// Runs every (scenario, method, seed) cell, writes out_dir/matrix.csv
// (scenario,method,seed,wer,ter,rerr_vs_baseline) and out_dir/summary.md.
// Baseline results are shared per (student family, seed); the mixed-teacher
// scenario appears exactly once per seed. Missing teacher checkpoints fail
// naming the scenario.
std::vector<MatrixRow> run_matrix(const MatrixConfig& cfg);

MatrixConfig matrix_config_from_config(const ConfigFile& cfg);

std::vector<MatrixRow> read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::vector<MatrixRow>& rows, const std::string& path);
// Markdown summary with per-scenario mean WER/TER/RERR columns.
std::string render_matrix_summary(const std::vector<MatrixRow>& rows);

}  // namespace ctcd

#endif  // CTCD_HARNESS_MATRIX_H_
