// include/ctcd/harness/trainer.h

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

#ifndef CTCD_HARNESS_TRAINER_H_
#define CTCD_HARNESS_TRAINER_H_

#include <string>
#include <vector>

#include "ctcd/checkpoint.h"
#include "ctcd/harness/config.h"
#include "ctcd/metrics.h"
#include "ctcd/synthdata.h"

namespace ctcd {

enum class KdMethod { kBaseline, kTutornet, kSkdOnly, kFrameKd, kGuided, kSeqKd };

std::string method_name(KdMethod m);
KdMethod method_from_name(const std::string& name);

struct EvalResult {
  int64_t utterances = 0;
  ErrorCounts token_counts;
  ErrorCounts word_counts;
  double ter = 0.0;
  double wer = 0.0;

  // Deterministic text rendering: identical inputs give identical bytes.
  std::string render() const;
};

struct RunReport {
  std::string method;
  uint64_t seed = 0;
  int64_t train_utterances = 0;
  int64_t eval_utterances = 0;
  int64_t skipped_utterances = 0;  // infeasible (features, target) pairs
  int64_t total_steps = 0;

  double stage1_first_step_rkd = 0.0;
  std::vector<double> stage1_epoch_rkd;  // per-utterance means

  std::vector<double> epoch_ctc;  // per-utterance means, one per stage-2 epoch
  std::vector<double> epoch_aux;
  std::vector<double> epoch_total;

  double final_ter = 0.0;
  double final_wer = 0.0;
  double wall_seconds = 0.0;

  std::string render() const;
};

struct RunResult {
  Checkpoint checkpoint;
  RunReport report;
  EvalResult eval;
};

// All runs write out_dir/student.ckpt, out_dir/loss.csv (one row per
// optimizer step: step,loss_ctc,loss_skd,loss_total) and out_dir/report.txt.
// Two-stage runs additionally write stage1_loss.csv (step,loss_rkd) and
// stage1.ckpt. Everything is deterministic given (config, seed).
RunResult train_baseline(const RunConfig& cfg);

// Stage 1 minimizes the frame-weighted representation loss through the
// adapter, stage 2 minimizes L_CTC + lambda * L_SKD from the stage-1
// parameters. stage1_epochs == 0 (or tutornet without an rkd teacher) is
// the SKD-only pipeline.
RunResult train_two_stage(const RunConfig& cfg);

// Conventional KD baselines: framekd, guided, seqkd.
RunResult train_baseline_kd(const RunConfig& cfg, KdMethod method);

RunResult train_run(const RunConfig& cfg, KdMethod method);

EvalResult evaluate(const Encoder& encoder, const Dataset& data, int space_id);
EvalResult evaluate_checkpoint(const std::string& checkpoint_path, const std::string& data_path,
                               int space_id);

// Greedy-decoded hypotheses for a whole dataset.
std::vector<LabelSeq> decode_dataset(const Encoder& encoder, const Dataset& data);

}  // namespace ctcd

#endif  // CTCD_HARNESS_TRAINER_H_
