// src/harness/trainer.cc

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

#include "ctcd/harness/trainer.h"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctcd/ctc.h"
#include "ctcd/distill.h"
#include "ctcd/harness/adam.h"
#include "ctcd/ops.h"

namespace ctcd {

std::string method_name(KdMethod m) {
  switch (m) {
    case KdMethod::kBaseline: return "baseline";
    case KdMethod::kTutornet: return "tutornet";
    case KdMethod::kSkdOnly: return "skd-only";
    case KdMethod::kFrameKd: return "framekd";
    case KdMethod::kGuided: return "guided";
    case KdMethod::kSeqKd: return "seqkd";
  }
  throw UsageError("method_name: bad enum");
}

KdMethod method_from_name(const std::string& name) {
  if (name == "baseline") return KdMethod::kBaseline;
  if (name == "tutornet") return KdMethod::kTutornet;
  if (name == "skd-only") return KdMethod::kSkdOnly;
  if (name == "framekd") return KdMethod::kFrameKd;
  if (name == "guided") return KdMethod::kGuided;
  if (name == "seqkd") return KdMethod::kSeqKd;
  throw ConfigError("unknown KD method '" + name +
                    "' (want tutornet|skd-only|framekd|guided|seqkd|baseline)");
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fmt_fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int resolve_layer(int idx, int n_layers, const char* who) {
  if (idx < 0) return n_layers - 1;
  if (idx >= n_layers)
    throw ConfigError(std::string(who) + " layer index " + std::to_string(idx) +
                      " out of range (model has " + std::to_string(n_layers) + " layers)");
  return idx;
}

int hidden_width(const EncoderSpec& spec, int layer) {
  int w = spec.layer_widths[static_cast<size_t>(layer)];
  if (spec.family == EncoderFamily::kRnn && spec.bidirectional) w *= 2;
  return w;
}

struct CsvWriter {
  std::ofstream os;
  CsvWriter(const std::string& path, const std::string& header) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    os.open(path, std::ios::trunc);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << header << "\n";
  }
};

Dataset load_dataset_checked(const std::string& path, const EncoderSpec& student) {
  Dataset ds = read_dataset(path);
  if (ds.feature_dim != student.input_dim)
    throw ConfigError("dataset " + path + " has feature_dim " + std::to_string(ds.feature_dim) +
                      " but the encoder expects " + std::to_string(student.input_dim));
  if (ds.alphabet_size + 1 != student.num_classes)
    throw ConfigError("dataset " + path + " has |Y| " + std::to_string(ds.alphabet_size) +
                      " but the encoder emits " + std::to_string(student.num_classes) +
                      " classes");
  if (ds.utterances.empty()) throw ConfigError("dataset " + path + " is empty");
  return ds;
}

void fisher_yates(std::vector<int64_t>& order, Rng& rng) {
  for (int64_t i = static_cast<int64_t>(order.size()) - 1; i > 0; --i) {
    int64_t j = rng.uniform_int(i + 1);
    std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
  }
}

// Per-utterance teacher signals, computed once: the teacher is frozen and
// the inputs never change across epochs.
struct TeacherCache {
  std::vector<Array> logits;                    // detached [T, |Y'|]
  std::vector<PosteriorGrid> grids;             // softmax of logits
  std::vector<GuidedMask> masks;                // guided CTC training
  std::vector<std::vector<Array>> hidden;       // detached per configured teacher layer
  std::vector<std::vector<std::pair<LabelSeq, double>>> nbest;  // seqkd targets
};

enum CacheWant { kWantLogits = 1, kWantGrids = 2, kWantMasks = 4, kWantHidden = 8, kWantNbest = 16 };

TeacherCache build_teacher_cache(const Encoder& teacher, const Dataset& train, int want,
                                 const std::vector<int>& teacher_layers, int nbest_n,
                                 int beam_width) {
  TeacherCache cache;
  for (const Utterance& u : train.utterances) {
    EncoderOutput out = teacher.forward(u.features);
    if (want & kWantLogits) cache.logits.push_back(out.logits.detached());
    if (want & (kWantGrids | kWantMasks | kWantNbest)) {
      PosteriorGrid g = PosteriorGrid::from_logits(out.logits);
      if (want & kWantMasks) cache.masks.push_back(guided_mask(g));
      if (want & kWantNbest) cache.nbest.push_back(seq_kd_targets(g, nbest_n, beam_width));
      if (want & kWantGrids) cache.grids.push_back(std::move(g));
    }
    if (want & kWantHidden) {
      std::vector<Array> layers;
      for (int li : teacher_layers)
        layers.push_back(out.hidden_layers[static_cast<size_t>(li)].detached());
      cache.hidden.push_back(std::move(layers));
    }
  }
  return cache;
}

struct Trainer {
  const RunConfig& cfg;
  KdMethod method;
  Dataset train;
  Dataset eval;
  Rng rng;
  Encoder student;
  std::optional<Encoder> rkd_teacher;
  std::optional<Encoder> skd_teacher;
  RunReport report;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  Trainer(const RunConfig& cfg_in, KdMethod method_in)
      : cfg(cfg_in),
        method(method_in),
        train(load_dataset_checked(cfg_in.train_data, cfg_in.student)),
        eval(load_dataset_checked(cfg_in.eval_data, cfg_in.student)),
        rng(cfg_in.seed),
        student(Encoder::build(cfg_in.student, rng)) {
    report.method = method_name(method);
    report.seed = cfg.seed;
    report.train_utterances = static_cast<int64_t>(train.utterances.size());
    report.eval_utterances = static_cast<int64_t>(eval.utterances.size());
  }

  bool needs_skd_teacher() const {
    return method == KdMethod::kTutornet || method == KdMethod::kSkdOnly ||
           method == KdMethod::kFrameKd || method == KdMethod::kGuided ||
           method == KdMethod::kSeqKd;
  }

  bool runs_stage1() const { return method == KdMethod::kTutornet && cfg.stage1_epochs > 0; }

  void load_teachers() {
    if (runs_stage1()) {
      if (!cfg.plan.rkd_teacher)
        throw ConfigError("stage 1 requested but teacher.rkd_checkpoint is not set");
      rkd_teacher = encoder_from_checkpoint(load_checkpoint(*cfg.plan.rkd_teacher), false);
      if (rkd_teacher->spec().input_dim != cfg.student.input_dim)
        throw ConfigError("rkd teacher input_dim does not match the task");
    }
    if (needs_skd_teacher()) {
      if (!cfg.plan.skd_teacher)
        throw ConfigError(method_name(method) + " needs teacher.skd_checkpoint");
      skd_teacher = encoder_from_checkpoint(load_checkpoint(*cfg.plan.skd_teacher), false);
      if (skd_teacher->spec().input_dim != cfg.student.input_dim ||
          skd_teacher->spec().num_classes != cfg.student.num_classes)
        throw ConfigError("skd teacher does not match the task dimensions");
    }
  }

  int64_t steps_per_epoch() const {
    int64_t n = static_cast<int64_t>(train.utterances.size());
    return (n + cfg.batch_size - 1) / cfg.batch_size;
  }

  void stage1(CsvWriter& csv) {
    const int n_pairs = static_cast<int>(cfg.plan.layer_pairs.size());
    std::vector<int> tea_layers, stu_layers;
    std::vector<Conv1dAdapter> adapters;
    for (const LayerPairConfig& pc : cfg.plan.layer_pairs) {
      int ti = resolve_layer(pc.teacher_layer,
                             static_cast<int>(rkd_teacher->spec().layer_widths.size()), "teacher");
      int sj = resolve_layer(pc.student_layer,
                             static_cast<int>(cfg.student.layer_widths.size()), "student");
      tea_layers.push_back(ti);
      stu_layers.push_back(sj);
      adapters.push_back(Conv1dAdapter::build(hidden_width(cfg.student, sj),
                                              hidden_width(rkd_teacher->spec(), ti), rng));
    }
    TeacherCache cache =
        build_teacher_cache(*rkd_teacher, train, kWantHidden, tea_layers, 0, 0);

    std::vector<Array> params = student.param_arrays();
    for (const Conv1dAdapter& a : adapters)
      for (const Array& p : a.param_arrays()) params.push_back(p);
    Adam adam(params, cfg.optim, cfg.stage1_epochs * steps_per_epoch());

    std::vector<int64_t> order(train.utterances.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
    int64_t step = 0;
    bool first_step = true;
    for (int epoch = 0; epoch < cfg.stage1_epochs; ++epoch) {
      fisher_yates(order, rng);
      double epoch_loss = 0.0;
      for (size_t b = 0; b < order.size(); b += static_cast<size_t>(cfg.batch_size)) {
        Tape tape;
        Array batch_loss;
        int64_t used = 0;
        for (size_t k = b; k < std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
             ++k) {
          const Utterance& u = train.utterances[static_cast<size_t>(order[k])];
          EncoderOutput out = student.forward(u.features);
          for (int pi = 0; pi < n_pairs; ++pi) {
            Array term = rkd_loss(cache.hidden[static_cast<size_t>(order[k])][static_cast<size_t>(pi)],
                                  out.hidden_layers[static_cast<size_t>(stu_layers[static_cast<size_t>(pi)])],
                                  adapters[static_cast<size_t>(pi)]);
            batch_loss = batch_loss.valid() ? add(batch_loss, term) : term;
          }
          ++used;
        }
        double value = batch_loss.item();
        epoch_loss += value;
        ++step;
        csv.os << step << "," << fmt_double(value / static_cast<double>(used)) << "\n";
        if (first_step) {
          report.stage1_first_step_rkd = value / static_cast<double>(used);
          first_step = false;
        }
        tape.backward(batch_loss);
        adam.step();
      }
      report.stage1_epoch_rkd.push_back(epoch_loss /
                                        static_cast<double>(train.utterances.size()));
    }
    // Adapters are discarded here; only the student parameters carry over.
  }

  // One utterance's loss terms under the active tape. aux is the raw
  // distillation term for the loss.csv column (zero when the method has
  // none); total is what gets optimized.
  struct UttLoss {
    Array ctc;
    Array aux;
    Array total;
    bool skipped = false;
  };

  UttLoss utt_loss(int64_t idx, const TeacherCache& cache) {
    const Utterance& u = train.utterances[static_cast<size_t>(idx)];
    UttLoss out;
    bool needs_gt_ctc = method != KdMethod::kSeqKd;
    if (needs_gt_ctc &&
        u.features.shape().dim(0) < min_expressible_frames(u.labels)) {
      out.skipped = true;
      return out;
    }
    EncoderOutput enc = student.forward(u.features);
    switch (method) {
      case KdMethod::kBaseline: {
        out.ctc = ctc_loss(enc.logits, u.labels);
        out.total = out.ctc;
        break;
      }
      case KdMethod::kTutornet:
      case KdMethod::kSkdOnly: {
        out.ctc = ctc_loss(enc.logits, u.labels);
        out.aux = skd_loss(cache.logits[static_cast<size_t>(idx)], enc.logits, cfg.plan.tau);
        out.total = combined_loss(out.ctc, out.aux, cfg.plan.lambda_skd);
        break;
      }
      case KdMethod::kFrameKd: {
        out.ctc = ctc_loss(enc.logits, u.labels);
        out.aux = frame_kd_loss(cache.grids[static_cast<size_t>(idx)], enc.logits);
        out.total = combined_loss(out.ctc, out.aux, cfg.plan.lambda_skd);
        break;
      }
      case KdMethod::kGuided: {
        out.ctc = ctc_loss(enc.logits, u.labels);
        out.aux = guided_loss(cache.masks[static_cast<size_t>(idx)], enc.logits,
                              cfg.plan.guided_weight);
        out.total = add(out.ctc, out.aux);
        break;
      }
      case KdMethod::kSeqKd: {
        Array weighted;
        for (const auto& [hyp, w] : cache.nbest[static_cast<size_t>(idx)]) {
          Array term = scale(ctc_loss(enc.logits, hyp), w);
          weighted = weighted.valid() ? add(weighted, term) : term;
        }
        out.ctc = weighted;
        out.total = weighted;
        break;
      }
    }
    return out;
  }

  void main_stage(CsvWriter& csv) {
    int want = 0;
    if (method == KdMethod::kTutornet || method == KdMethod::kSkdOnly) want |= kWantLogits;
    if (method == KdMethod::kFrameKd) want |= kWantGrids;
    if (method == KdMethod::kGuided) want |= kWantMasks;
    if (method == KdMethod::kSeqKd) want |= kWantNbest;
    TeacherCache cache;
    if (want != 0)
      cache = build_teacher_cache(*skd_teacher, train, want, {}, cfg.plan.nbest_n,
                                  cfg.plan.beam_width);

    Adam adam(student.param_arrays(), cfg.optim, cfg.stage2_epochs * steps_per_epoch());
    std::vector<int64_t> order(train.utterances.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int64_t>(i);
    int64_t step = 0;
    for (int epoch = 0; epoch < cfg.stage2_epochs; ++epoch) {
      fisher_yates(order, rng);
      double e_ctc = 0.0, e_aux = 0.0, e_total = 0.0;
      int64_t e_used = 0;
      for (size_t b = 0; b < order.size(); b += static_cast<size_t>(cfg.batch_size)) {
        Tape tape;
        Array ctc_sum, aux_sum, total_sum;
        int64_t used = 0;
        for (size_t k = b; k < std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
             ++k) {
          UttLoss ul = utt_loss(order[k], cache);
          if (ul.skipped) {
            ++report.skipped_utterances;
            continue;
          }
          ++used;
          if (ul.ctc.valid()) ctc_sum = ctc_sum.valid() ? add(ctc_sum, ul.ctc) : ul.ctc;
          if (ul.aux.valid()) aux_sum = aux_sum.valid() ? add(aux_sum, ul.aux) : ul.aux;
          total_sum = total_sum.valid() ? add(total_sum, ul.total) : ul.total;
        }
        if (used == 0) continue;
        double v_ctc = ctc_sum.valid() ? ctc_sum.item() : 0.0;
        double v_aux = aux_sum.valid() ? aux_sum.item() : 0.0;
        double v_total = total_sum.item();
        ++step;
        csv.os << step << "," << fmt_double(v_ctc) << "," << fmt_double(v_aux) << ","
               << fmt_double(v_total) << "\n";
        e_ctc += v_ctc;
        e_aux += v_aux;
        e_total += v_total;
        e_used += used;
        tape.backward(total_sum);
        adam.step();
      }
      if (e_used > 0) {
        report.epoch_ctc.push_back(e_ctc / static_cast<double>(e_used));
        report.epoch_aux.push_back(e_aux / static_cast<double>(e_used));
        report.epoch_total.push_back(e_total / static_cast<double>(e_used));
      }
      report.total_steps = step;
    }
  }

  RunResult finish() {
    EvalResult ev = evaluate(student, eval, cfg.task.space_id);
    report.final_ter = ev.ter;
    report.final_wer = ev.wer;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    uint32_t stage = method == KdMethod::kBaseline ? 0 : 2;
    Checkpoint ckpt = checkpoint_of(student, stage,
                                    static_cast<uint32_t>(cfg.stage2_epochs), cfg.seed);
    std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);
    save_checkpoint(ckpt, (out / "student.ckpt").string());
    std::ofstream rep(out / "report.txt", std::ios::trunc);
    rep << report.render();
    rep << "\n" << ev.render();
    return RunResult{std::move(ckpt), report, ev};
  }

  RunResult run() {
    load_teachers();
    std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);
    if (runs_stage1()) {
      CsvWriter s1((out / "stage1_loss.csv").string(), "step,loss_rkd");
      stage1(s1);
      save_checkpoint(checkpoint_of(student, 1, static_cast<uint32_t>(cfg.stage1_epochs),
                                    cfg.seed),
                      (out / "stage1.ckpt").string());
    }
    CsvWriter csv((out / "loss.csv").string(), "step,loss_ctc,loss_skd,loss_total");
    main_stage(csv);
    return finish();
  }
};

}  // namespace

RunResult train_baseline(const RunConfig& cfg) { return train_run(cfg, KdMethod::kBaseline); }

RunResult train_two_stage(const RunConfig& cfg) { return train_run(cfg, KdMethod::kTutornet); }

RunResult train_baseline_kd(const RunConfig& cfg, KdMethod method) {
  if (method != KdMethod::kFrameKd && method != KdMethod::kGuided && method != KdMethod::kSeqKd)
    throw UsageError("train_baseline_kd handles framekd|guided|seqkd");
  return train_run(cfg, method);
}

RunResult train_run(const RunConfig& cfg, KdMethod method) {
  cfg.validate();
  Trainer t(cfg, method);
  return t.run();
}

std::vector<LabelSeq> decode_dataset(const Encoder& encoder, const Dataset& data) {
  std::vector<LabelSeq> out;
  out.reserve(data.utterances.size());
  for (const Utterance& u : data.utterances) {
    PosteriorGrid g = PosteriorGrid::from_logits(encoder.forward(u.features).logits);
    out.push_back(greedy_decode(g));
  }
  return out;
}

EvalResult evaluate(const Encoder& encoder, const Dataset& data, int space_id) {
  if (data.utterances.empty()) throw ConfigError("evaluate: empty dataset");
  if (data.feature_dim != encoder.spec().input_dim)
    throw ConfigError("evaluate: dataset feature_dim " + std::to_string(data.feature_dim) +
                      " does not match encoder input_dim " +
                      std::to_string(encoder.spec().input_dim));
  std::vector<LabelSeq> refs;
  refs.reserve(data.utterances.size());
  for (const Utterance& u : data.utterances) refs.push_back(u.labels);
  std::vector<LabelSeq> hyps = decode_dataset(encoder, data);
  EvalResult r;
  r.utterances = static_cast<int64_t>(data.utterances.size());
  r.token_counts = pooled_counts(refs, hyps, ErrorRateLevel::kToken, space_id);
  r.word_counts = pooled_counts(refs, hyps, ErrorRateLevel::kWord, space_id);
  r.ter = r.token_counts.rate();
  r.wer = r.word_counts.rate();
  return r;
}

EvalResult evaluate_checkpoint(const std::string& checkpoint_path, const std::string& data_path,
                               int space_id) {
  Encoder enc = encoder_from_checkpoint(load_checkpoint(checkpoint_path), false);
  return evaluate(enc, read_dataset(data_path), space_id);
}

std::string EvalResult::render() const {
  std::ostringstream os;
  os << "utterances: " << utterances << "\n";
  os << "token: S=" << token_counts.substitutions << " I=" << token_counts.insertions
     << " D=" << token_counts.deletions << " ref=" << token_counts.reference_length
     << " ter=" << fmt_fixed(ter, 6) << "\n";
  os << "word: S=" << word_counts.substitutions << " I=" << word_counts.insertions
     << " D=" << word_counts.deletions << " ref=" << word_counts.reference_length
     << " wer=" << fmt_fixed(wer, 6) << "\n";
  return os.str();
}

std::string RunReport::render() const {
  std::ostringstream os;
  os << "method: " << method << "\n";
  os << "seed: " << seed << "\n";
  os << "train_utterances: " << train_utterances << "\n";
  os << "eval_utterances: " << eval_utterances << "\n";
  os << "skipped_utterances: " << skipped_utterances << "\n";
  os << "total_steps: " << total_steps << "\n";
  if (!stage1_epoch_rkd.empty()) {
    os << "stage1_first_step_rkd: " << fmt_fixed(stage1_first_step_rkd, 6) << "\n";
    os << "stage1_epoch_rkd:";
    for (double v : stage1_epoch_rkd) os << " " << fmt_fixed(v, 6);
    os << "\n";
  }
  os << "epoch,loss_ctc,loss_skd,loss_total\n";
  for (size_t e = 0; e < epoch_total.size(); ++e)
    os << (e + 1) << "," << fmt_fixed(epoch_ctc[e], 6) << "," << fmt_fixed(epoch_aux[e], 6)
       << "," << fmt_fixed(epoch_total[e], 6) << "\n";
  os << "final_ter: " << fmt_fixed(final_ter, 6) << "\n";
  os << "final_wer: " << fmt_fixed(final_wer, 6) << "\n";
  os << "wall_seconds: " << fmt_fixed(wall_seconds, 1) << "\n";
  return os.str();
}

}  // namespace ctcd
