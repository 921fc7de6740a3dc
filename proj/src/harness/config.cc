// src/harness/config.cc

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

#include "ctcd/harness/config.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ctcd {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'section.key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key.find('.') == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key must look like 'section.key', got '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

std::string ConfigFile::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    throw ConfigError(origin_ + ": missing required config key '" + key + "'");
  return it->second;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int64_t ConfigFile::get_int(const std::string& key) const {
  const std::string v = get_string(key);
  try {
    size_t pos = 0;
    int64_t r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

int64_t ConfigFile::get_int(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<int> ConfigFile::get_int_list(const std::string& key) const {
  const std::string v = get_string(key);
  std::vector<int> out;
  std::istringstream is(v);
  std::string item;
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': expected comma-separated integers, got '" + v +
                        "'");
    }
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<int> ConfigFile::get_int_list(const std::string& key,
                                          const std::vector<int>& fallback) const {
  return has(key) ? get_int_list(key) : fallback;
}

uint64_t ConfigFile::get_u64(const std::string& key, uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get_string(key);
  try {
    size_t pos = 0;
    uint64_t r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + v + "'");
  }
}

void RunConfig::validate() const {
  task.validate();
  student.validate();
  if (batch_size < 1) throw ConfigError("RunConfig: batch_size must be >= 1");
  if (stage1_epochs < 0 || stage2_epochs < 0)
    throw ConfigError("RunConfig: epoch counts must be >= 0");
  if (!(optim.lr > 0.0)) throw ConfigError("RunConfig: learning rate must be > 0");
  if (plan.lambda_skd < 0.0) throw ConfigError("RunConfig: lambda_skd must be >= 0");
  if (!(plan.tau > 0.0)) throw ConfigError("RunConfig: tau must be > 0");
  if (plan.guided_weight < 0.0) throw ConfigError("RunConfig: guided_weight must be >= 0");
  if (plan.nbest_n < 1 || plan.beam_width < plan.nbest_n)
    throw ConfigError("RunConfig: need beam_width >= nbest_n >= 1");
  if (out_dir.empty()) throw ConfigError("RunConfig: out_dir must be set");
}

TaskSpec task_from_config(const ConfigFile& cfg) {
  TaskSpec t;
  t.alphabet_size = static_cast<int>(cfg.get_int("task.alphabet_size", 5));
  t.space_id = static_cast<int>(cfg.get_int("task.space_id", 0));
  t.feature_dim = static_cast<int>(cfg.get_int("task.feature_dim", 8));
  t.min_duration = static_cast<int>(cfg.get_int("task.min_duration", 2));
  t.max_duration = static_cast<int>(cfg.get_int("task.max_duration", 4));
  t.noise_sigma = cfg.get_double("task.noise_sigma", 0.3);
  t.silence_prob = cfg.get_double("task.silence_prob", 0.2);
  t.min_utt_len = static_cast<int>(cfg.get_int("task.min_utt_len", 2));
  t.max_utt_len = static_cast<int>(cfg.get_int("task.max_utt_len", 6));
  t.seed = cfg.get_u64("task.seed", 100);
  uint64_t template_seed = cfg.get_u64("task.template_seed", 20260101);
  t.templates = TaskSpec::default_templates(t.alphabet_size, t.feature_dim, template_seed);
  if (auto env = seed_env_override()) t.seed = *env;
  t.validate();
  return t;
}

EncoderSpec encoder_spec_from_config(const ConfigFile& cfg, const std::string& section,
                                     int input_dim, int num_classes) {
  EncoderSpec s;
  s.family = family_from_name(cfg.get_string(section + ".family"));
  s.input_dim = input_dim;
  s.num_classes = num_classes;
  s.layer_widths = cfg.get_int_list(section + ".widths");
  if (s.family == EncoderFamily::kTdnn) {
    s.kernel_widths = cfg.get_int_list(section + ".kernels",
                                       std::vector<int>(s.layer_widths.size(), 3));
  } else {
    s.bidirectional = cfg.get_bool(section + ".bidirectional", false);
  }
  s.validate();
  return s;
}

RunConfig run_config_from_config(const ConfigFile& cfg) {
  RunConfig rc;
  rc.task = task_from_config(cfg);
  rc.train_data = cfg.get_string("data.train");
  rc.eval_data = cfg.get_string("data.eval");
  rc.student = encoder_spec_from_config(cfg, "student", rc.task.feature_dim,
                                        rc.task.alphabet_size + 1);
  if (cfg.has("teacher.rkd_checkpoint"))
    rc.plan.rkd_teacher = cfg.get_string("teacher.rkd_checkpoint");
  if (cfg.has("teacher.skd_checkpoint"))
    rc.plan.skd_teacher = cfg.get_string("teacher.skd_checkpoint");
  rc.plan.lambda_skd = cfg.get_double("distill.lambda_skd", 0.25);
  rc.plan.tau = cfg.get_double("distill.tau", 1.0);
  rc.plan.guided_weight = cfg.get_double("distill.guided_weight", 0.5);
  rc.plan.nbest_n = static_cast<int>(cfg.get_int("distill.nbest_n", 5));
  rc.plan.beam_width = static_cast<int>(cfg.get_int("distill.beam_width", 8));
  if (cfg.has("distill.teacher_layer") || cfg.has("distill.student_layer")) {
    rc.plan.layer_pairs = {{static_cast<int>(cfg.get_int("distill.teacher_layer", -1)),
                            static_cast<int>(cfg.get_int("distill.student_layer", -1))}};
  }
  rc.optim.lr = cfg.get_double("optim.lr", 1e-3);
  rc.optim.beta1 = cfg.get_double("optim.beta1", 0.9);
  rc.optim.beta2 = cfg.get_double("optim.beta2", 0.999);
  rc.optim.eps = cfg.get_double("optim.eps", 1e-8);
  rc.optim.poly_decay = cfg.get_bool("optim.poly_decay", false);
  rc.batch_size = static_cast<int>(cfg.get_int("optim.batch_size", 8));
  rc.stage1_epochs = static_cast<int>(cfg.get_int("train.stage1_epochs", 5));
  rc.stage2_epochs = static_cast<int>(cfg.get_int("train.stage2_epochs", 50));
  rc.seed = cfg.get_u64("train.seed", 1);
  rc.out_dir = cfg.get_string("train.out_dir", "out/run");
  if (auto env = seed_env_override()) rc.seed = *env;
  rc.validate();
  return rc;
}

std::optional<uint64_t> seed_env_override() {
  const char* env = std::getenv("CTCD_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  try {
    size_t pos = 0;
    uint64_t v = std::stoull(env, &pos);
    if (env[pos] != '\0') throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("CTCD_SEED must be an unsigned integer, got '") + env + "'");
  }
}

}  // namespace ctcd
