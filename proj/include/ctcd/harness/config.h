// include/ctcd/harness/config.h

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

#ifndef CTCD_HARNESS_CONFIG_H_
#define CTCD_HARNESS_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ctcd/encoder.h"
#include "ctcd/synthdata.h"

namespace ctcd {

// Flat `section.key = value` config file with `#` comments. Values are
// strings until a typed getter parses them; parse problems carry the key
// name.
class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key) const;  // required
  std::string get_string(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  int64_t get_int(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<int> get_int_list(const std::string& key) const;  // comma separated
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  uint64_t get_u64(const std::string& key, uint64_t fallback) const;

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  bool poly_decay = false;  // lr * (1 - t/total_steps), the paper's schedule shape
};

struct LayerPairConfig {
  int teacher_layer = -1;  // -1: last layer
  int student_layer = -1;
};

struct DistillPlanConfig {
  std::optional<std::string> rkd_teacher;  // checkpoint path
  std::optional<std::string> skd_teacher;
  std::vector<LayerPairConfig> layer_pairs{{-1, -1}};
  double lambda_skd = 0.25;
  double tau = 1.0;
  double guided_weight = 0.5;
  int nbest_n = 5;
  int beam_width = 8;
};

struct RunConfig {
  TaskSpec task;  // carries space_id for word-level scoring
  std::string train_data;
  std::string eval_data;
  EncoderSpec student;
  DistillPlanConfig plan;
  AdamConfig optim;
  int batch_size = 8;
  int stage1_epochs = 5;
  int stage2_epochs = 50;
  uint64_t seed = 1;
  std::string out_dir = "out/run";

  void validate() const;
};

// Assembles the pieces from a parsed config. `CTCD_SEED`, when set in the
// environment, overrides both train.seed and task.seed.
TaskSpec task_from_config(const ConfigFile& cfg);
EncoderSpec encoder_spec_from_config(const ConfigFile& cfg, const std::string& section,
                                     int input_dim, int num_classes);
RunConfig run_config_from_config(const ConfigFile& cfg);

std::optional<uint64_t> seed_env_override();

}  // namespace ctcd

#endif  // CTCD_HARNESS_CONFIG_H_
