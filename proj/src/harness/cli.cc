// src/harness/cli.cc

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

#include "ctcd/harness/cli.h"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ctcd/ctc.h"
#include "ctcd/harness/matrix.h"
#include "ctcd/harness/trainer.h"

namespace ctcd {

namespace {

void cmd_gen_data(const std::string& config_path, int count, const std::string& out,
                  int64_t seed_flag) {
  ConfigFile cfg = ConfigFile::parse_file(config_path);
  TaskSpec task = task_from_config(cfg);
  if (seed_flag >= 0) task.seed = static_cast<uint64_t>(seed_flag);
  Dataset ds = generate(task, count);
  write_dataset(ds, out);
  std::cout << "wrote " << ds.utterances.size() << " utterances to " << out << "\n";
}

void cmd_train(const std::string& config_path, const std::string& method_str) {
  ConfigFile cfg = ConfigFile::parse_file(config_path);
  RunConfig rc = run_config_from_config(cfg);
  KdMethod method = method_from_name(method_str);
  RunResult res = train_run(rc, method);
  std::cout << res.report.render();
  std::cout << res.eval.render();
  std::cout << "checkpoint: " << rc.out_dir << "/student.ckpt\n";
}

void cmd_eval(const std::string& ckpt, const std::string& data, int space_id,
              const std::string& out) {
  EvalResult r = evaluate_checkpoint(ckpt, data, space_id);
  std::string text = r.render();
  if (!out.empty()) {
    std::filesystem::path p(out);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(out, std::ios::trunc);
    if (!os) throw IoError("cannot open " + out + " for writing");
    os << text;
  }
  std::cout << text;
}

void cmd_nbest(const std::string& ckpt, const std::string& data_path, int n, int beam_width,
               int limit, const std::string& out) {
  Encoder enc = encoder_from_checkpoint(load_checkpoint(ckpt), false);
  Dataset ds = read_dataset(data_path);
  std::ostringstream os;
  int64_t shown = 0;
  for (const Utterance& u : ds.utterances) {
    if (limit > 0 && shown >= limit) break;
    ++shown;
    PosteriorGrid g = PosteriorGrid::from_logits(enc.forward(u.features).logits);
    os << u.id << " ref:";
    for (int l : u.labels.labels) os << " " << l;
    os << "\n";
    auto hyps = beam_nbest(g, beam_width, n);
    for (size_t i = 0; i < hyps.size(); ++i) {
      char lp[48];
      std::snprintf(lp, sizeof(lp), "%.6f", hyps[i].log_prob);
      os << "  " << (i + 1) << " (" << lp << "):";
      for (int l : hyps[i].seq.labels) os << " " << l;
      os << "\n";
    }
  }
  if (!out.empty()) {
    std::ofstream f(out, std::ios::trunc);
    if (!f) throw IoError("cannot open " + out + " for writing");
    f << os.str();
  }
  std::cout << os.str();
}

void cmd_matrix(const std::string& config_path) {
  ConfigFile cfg = ConfigFile::parse_file(config_path);
  MatrixConfig mc = matrix_config_from_config(cfg);
  std::vector<MatrixRow> rows = run_matrix(mc);
  std::cout << render_matrix_summary(rows);
  std::cout << "matrix csv: " << mc.out_dir << "/matrix.csv\n";
}

void cmd_report(const std::string& matrix_csv, const std::string& out) {
  std::vector<MatrixRow> rows = read_matrix_csv(matrix_csv);
  std::string text = render_matrix_summary(rows);
  if (!out.empty()) {
    std::ofstream os(out, std::ios::trunc);
    if (!os) throw IoError("cannot open " + out + " for writing");
    os << text;
  }
  std::cout << text;
}

}  // namespace

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const NumericError&) {
    return kExitNumericError;
  } catch (const FormatError&) {
    return kExitIoError;
  } catch (const IoError&) {
    return kExitIoError;
  } catch (const ConfigError&) {
    return kExitConfigError;
  } catch (const UsageError&) {
    return kExitConfigError;
  } catch (const std::exception&) {
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"ctcdistill: desk-scale knowledge distillation for CTC sequence models"};
  app.require_subcommand(1);

  std::string config_path, method = "tutornet", ckpt, data, out;
  int count = 1000, space_id = 0, nbest_n = 5, beam_width = 8, limit = 0;
  int64_t seed_flag = -1;

  CLI::App* gen = app.add_subcommand("gen-data", "Generate a synthetic dataset file");
  gen->add_option("--config", config_path, "config file")->required();
  gen->add_option("--count", count, "number of utterances")->required();
  gen->add_option("--out", out, "output dataset path")->required();
  gen->add_option("--seed", seed_flag, "override task.seed");

  CLI::App* tb = app.add_subcommand("train-baseline", "CTC training on the ground truth");
  tb->add_option("--config", config_path, "config file")->required();

  CLI::App* tk = app.add_subcommand("train-kd", "Knowledge-distillation training");
  tk->add_option("--config", config_path, "config file")->required();
  tk->add_option("--method", method, "tutornet|skd-only|framekd|guided|seqkd")->required();

  CLI::App* ev = app.add_subcommand("eval", "Greedy-decode a dataset and score it");
  ev->add_option("--checkpoint", ckpt, "checkpoint path")->required();
  ev->add_option("--data", data, "dataset path")->required();
  ev->add_option("--space-id", space_id, "label id of the space symbol");
  ev->add_option("--out", out, "also write the report here");

  CLI::App* nb = app.add_subcommand("nbest", "Prefix beam search n-best listing");
  nb->add_option("--checkpoint", ckpt, "checkpoint path")->required();
  nb->add_option("--data", data, "dataset path")->required();
  nb->add_option("--n", nbest_n, "hypotheses per utterance");
  nb->add_option("--beam-width", beam_width, "beam width");
  nb->add_option("--limit", limit, "max utterances to list (0 = all)");
  nb->add_option("--out", out, "also write the listing here");

  CLI::App* mx = app.add_subcommand("matrix", "Run the transfer-scenario experiment matrix");
  mx->add_option("--config", config_path, "config file")->required();

  CLI::App* rp = app.add_subcommand("report", "Render a summary from a matrix csv");
  rp->add_option("--matrix", ckpt, "matrix.csv path")->required();
  rp->add_option("--out", out, "write the markdown summary here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (gen->parsed()) cmd_gen_data(config_path, count, out, seed_flag);
    if (tb->parsed()) cmd_train(config_path, "baseline");
    if (tk->parsed()) cmd_train(config_path, method);
    if (ev->parsed()) cmd_eval(ckpt, data, space_id, out);
    if (nb->parsed()) cmd_nbest(ckpt, data, nbest_n, beam_width, limit, out);
    if (mx->parsed()) cmd_matrix(config_path);
    if (rp->parsed()) cmd_report(ckpt, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for_current_exception();
  }
  return kExitOk;
}

}  // namespace ctcd
