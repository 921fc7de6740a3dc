// src/harness/matrix.cc

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

#include "ctcd/harness/matrix.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace ctcd {

const std::vector<std::string> kAllScenarios = {"cnn2rnn", "cnn2cnn", "rnn2cnn", "rnn2rnn",
                                                "mixed2cnn"};

namespace {

struct ScenarioPlan {
  EncoderFamily student_family;
  bool teacher_skd_is_rnn;
  bool teacher_rkd_is_rnn;
};

ScenarioPlan scenario_plan(const std::string& name) {
  if (name == "cnn2rnn") return {EncoderFamily::kRnn, false, false};
  if (name == "cnn2cnn") return {EncoderFamily::kTdnn, false, false};
  if (name == "rnn2cnn") return {EncoderFamily::kTdnn, true, true};
  if (name == "rnn2rnn") return {EncoderFamily::kRnn, true, true};
  if (name == "mixed2cnn") return {EncoderFamily::kTdnn, true, false};
  throw ConfigError("unknown scenario '" + name +
                    "' (want cnn2rnn|cnn2cnn|rnn2cnn|rnn2rnn|mixed2cnn)");
}

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::vector<MatrixRow> run_matrix(const MatrixConfig& cfg) {
  if (cfg.seeds.empty()) throw ConfigError("matrix: need at least one seed");
  if (std::find(cfg.methods.begin(), cfg.methods.end(), "baseline") == cfg.methods.end())
    throw ConfigError("matrix: methods must include 'baseline' (RERR needs it)");
  for (const std::string& s : cfg.scenarios) {
    ScenarioPlan plan = scenario_plan(s);
    const std::string& skd_path = plan.teacher_skd_is_rnn ? cfg.teacher_rnn : cfg.teacher_tdnn;
    const std::string& rkd_path = plan.teacher_rkd_is_rnn ? cfg.teacher_rnn : cfg.teacher_tdnn;
    if (skd_path.empty() || !std::filesystem::exists(skd_path))
      throw ConfigError("scenario " + s + ": missing SKD teacher checkpoint '" + skd_path + "'");
    if (rkd_path.empty() || !std::filesystem::exists(rkd_path))
      throw ConfigError("scenario " + s + ": missing RKD teacher checkpoint '" + rkd_path + "'");
  }

  std::vector<MatrixRow> rows;
  // Baselines depend only on the student family and the seed; run each once.
  std::map<std::pair<int, uint64_t>, RunResult> baselines;
  auto baseline_for = [&](EncoderFamily fam, uint64_t seed) -> RunResult& {
    auto key = std::make_pair(fam == EncoderFamily::kTdnn ? 0 : 1, seed);
    auto it = baselines.find(key);
    if (it != baselines.end()) return it->second;
    RunConfig rc = cfg.base;
    rc.student = fam == EncoderFamily::kTdnn ? cfg.student_tdnn : cfg.student_rnn;
    rc.plan.rkd_teacher.reset();
    rc.plan.skd_teacher.reset();
    rc.seed = seed;
    rc.out_dir = cfg.out_dir + "/baseline_" + family_name(fam) + "_seed" + std::to_string(seed);
    return baselines.emplace(key, train_baseline(rc)).first->second;
  };

  for (uint64_t seed : cfg.seeds) {
    for (const std::string& scenario : cfg.scenarios) {
      ScenarioPlan plan = scenario_plan(scenario);
      RunResult& base = baseline_for(plan.student_family, seed);
      for (const std::string& method : cfg.methods) {
        MatrixRow row;
        row.scenario = scenario;
        row.method = method;
        row.seed = seed;
        if (method == "baseline") {
          row.wer = base.eval.wer;
          row.ter = base.eval.ter;
          row.rerr_vs_baseline = 0.0;
        } else {
          RunConfig rc = cfg.base;
          rc.student = plan.student_family == EncoderFamily::kTdnn ? cfg.student_tdnn
                                                                   : cfg.student_rnn;
          rc.plan.skd_teacher = plan.teacher_skd_is_rnn ? cfg.teacher_rnn : cfg.teacher_tdnn;
          rc.plan.rkd_teacher = plan.teacher_rkd_is_rnn ? cfg.teacher_rnn : cfg.teacher_tdnn;
          rc.seed = seed;
          rc.out_dir = cfg.out_dir + "/" + scenario + "_" + method + "_seed" +
                       std::to_string(seed);
          RunResult res;
          if (method == "tutornet") {
            res = train_two_stage(rc);
          } else if (method == "skd-only") {
            RunConfig skd = rc;
            skd.stage1_epochs = 0;
            res = train_run(skd, KdMethod::kSkdOnly);
          } else {
            res = train_baseline_kd(rc, method_from_name(method));
          }
          row.wer = res.eval.wer;
          row.ter = res.eval.ter;
          row.rerr_vs_baseline = base.eval.wer > 0.0 ? rerr(base.eval.wer, res.eval.wer) : 0.0;
        }
        rows.push_back(row);
      }
    }
  }

  std::filesystem::create_directories(cfg.out_dir);
  write_matrix_csv(rows, cfg.out_dir + "/matrix.csv");
  std::ofstream md(cfg.out_dir + "/summary.md", std::ios::trunc);
  md << render_matrix_summary(rows);
  return rows;
}

MatrixConfig matrix_config_from_config(const ConfigFile& cfg) {
  MatrixConfig mc;
  mc.base = run_config_from_config(cfg);
  int in = mc.base.task.feature_dim;
  int classes = mc.base.task.alphabet_size + 1;
  mc.student_tdnn = encoder_spec_from_config(cfg, "student_tdnn", in, classes);
  mc.student_rnn = encoder_spec_from_config(cfg, "student_rnn", in, classes);
  if (mc.student_tdnn.family != EncoderFamily::kTdnn)
    throw ConfigError("student_tdnn.family must be tdnn");
  if (mc.student_rnn.family != EncoderFamily::kRnn)
    throw ConfigError("student_rnn.family must be rnn");
  mc.teacher_tdnn = cfg.get_string("matrix.teacher_tdnn", "");
  mc.teacher_rnn = cfg.get_string("matrix.teacher_rnn", "");
  mc.out_dir = cfg.get_string("matrix.out_dir", mc.base.out_dir + "/matrix");

  if (cfg.has("matrix.seeds")) {
    mc.seeds.clear();
    for (int s : cfg.get_int_list("matrix.seeds")) mc.seeds.push_back(static_cast<uint64_t>(s));
  }
  auto parse_names = [&](const std::string& key, const std::vector<std::string>& fallback) {
    if (!cfg.has(key)) return fallback;
    std::vector<std::string> out;
    std::istringstream is(cfg.get_string(key));
    std::string item;
    while (std::getline(is, item, ',')) {
      size_t b = item.find_first_not_of(" \t");
      size_t e = item.find_last_not_of(" \t");
      if (b == std::string::npos) continue;
      out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
  };
  mc.scenarios = parse_names("matrix.scenarios", kAllScenarios);
  if (mc.scenarios.size() == 1 && mc.scenarios[0] == "all") mc.scenarios = kAllScenarios;
  mc.methods = parse_names("matrix.methods", {"baseline", "skd-only", "tutornet"});
  return mc;
}

void write_matrix_csv(const std::vector<MatrixRow>& rows, const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "scenario,method,seed,wer,ter,rerr_vs_baseline\n";
  for (const MatrixRow& r : rows)
    os << r.scenario << "," << r.method << "," << r.seed << "," << fmt6(r.wer) << ","
       << fmt6(r.ter) << "," << fmt2(r.rerr_vs_baseline) << "\n";
}

std::vector<MatrixRow> read_matrix_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open matrix csv " + path);
  std::string line;
  if (!std::getline(is, line) || line != "scenario,method,seed,wer,ter,rerr_vs_baseline")
    throw FormatError(path + ":1: bad matrix csv header");
  std::vector<MatrixRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    MatrixRow r;
    std::string seed, wer, ter, rerr_s;
    if (!std::getline(ls, r.scenario, ',') || !std::getline(ls, r.method, ',') ||
        !std::getline(ls, seed, ',') || !std::getline(ls, wer, ',') ||
        !std::getline(ls, ter, ',') || !std::getline(ls, rerr_s, ','))
      throw FormatError(path + ":" + std::to_string(lineno) + ": short row");
    try {
      r.seed = std::stoull(seed);
      r.wer = std::stod(wer);
      r.ter = std::stod(ter);
      r.rerr_vs_baseline = std::stod(rerr_s);
    } catch (const std::exception&) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": bad numeric field");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_matrix_summary(const std::vector<MatrixRow>& rows) {
  // scenario -> method -> accumulated rows, in first-seen order.
  std::vector<std::string> scenario_order, method_order;
  std::map<std::string, std::map<std::string, std::vector<const MatrixRow*>>> grouped;
  for (const MatrixRow& r : rows) {
    if (grouped.find(r.scenario) == grouped.end()) scenario_order.push_back(r.scenario);
    if (std::find(method_order.begin(), method_order.end(), r.method) == method_order.end())
      method_order.push_back(r.method);
    grouped[r.scenario][r.method].push_back(&r);
  }
  std::ostringstream os;
  os << "# Transfer matrix summary\n\n";
  os << "Mean over seeds; RERR is relative WER reduction vs the same-scenario baseline.\n\n";
  os << "| scenario | method | seeds | mean WER | mean TER | mean RERR (%) |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const std::string& s : scenario_order) {
    for (const std::string& m : method_order) {
      auto it = grouped[s].find(m);
      if (it == grouped[s].end()) continue;
      double wer = 0.0, ter = 0.0, rr = 0.0;
      for (const MatrixRow* r : it->second) {
        wer += r->wer;
        ter += r->ter;
        rr += r->rerr_vs_baseline;
      }
      double n = static_cast<double>(it->second.size());
      os << "| " << s << " | " << m << " | " << it->second.size() << " | " << fmt6(wer / n)
         << " | " << fmt6(ter / n) << " | " << fmt2(rr / n) << " |\n";
    }
  }
  return os.str();
}

}  // namespace ctcd
