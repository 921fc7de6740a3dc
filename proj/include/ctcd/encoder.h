// include/ctcd/encoder.h

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

#ifndef CTCD_ENCODER_H_
#define CTCD_ENCODER_H_

#include <string>
#include <vector>

#include "ctcd/dense_array.h"
#include "ctcd/rng.h"

namespace ctcd {

enum class EncoderFamily { kTdnn, kRnn };

std::string family_name(EncoderFamily f);
EncoderFamily family_from_name(const std::string& name);

// Declarative encoder architecture. Both families preserve T: the TDNN
// stacks stride-1 same-padded conv1d+relu layers, the RNN stacks GRU
// layers (optionally bidirectional). A final linear layer maps the last
// hidden width to |Y'| logits.
struct EncoderSpec {
  EncoderFamily family = EncoderFamily::kTdnn;
  int input_dim = 0;
  std::vector<int> layer_widths;   // hidden width per layer
  std::vector<int> kernel_widths;  // tdnn only, one odd width per layer
  bool bidirectional = false;      // rnn only
  int num_classes = 0;             // |Y'| including blank

  void validate() const;
  int64_t num_params() const;  // closed-form parameter count
  bool operator==(const EncoderSpec& o) const;
};

struct NamedParam {
  std::string name;
  Array value;
};

struct EncoderOutput {
  Array logits;                      // [T, |Y'|]
  std::vector<Array> hidden_layers;  // post-activation, one per layer, [T, D]
};

class Encoder {
 public:
  // Parameters drawn uniform in (-1/sqrt(fan_in), 1/sqrt(fan_in)), biases
  // zero; draw order follows the parameter list, row-major, so a seed pins
  // the whole model.
  static Encoder build(const EncoderSpec& spec, Rng& rng, bool trainable = true);

  EncoderOutput forward(const Array& features) const;

  const EncoderSpec& spec() const { return spec_; }
  std::vector<NamedParam>& params() { return params_; }
  const std::vector<NamedParam>& params() const { return params_; }
  std::vector<Array> param_arrays() const;
  void set_trainable(bool trainable);

  // Internal: reassemble from named parameters (checkpoint load).
  static Encoder from_params(const EncoderSpec& spec, std::vector<NamedParam> params,
                             bool trainable);

 private:
  Encoder() = default;
  const Array& param(const std::string& name) const;

  EncoderSpec spec_;
  std::vector<NamedParam> params_;
};

// The RKD connector: width-3 same-padded conv1d mapping the student hidden
// width onto the teacher's. Trained during stage 1, discarded afterwards.
struct Conv1dAdapter {
  Array weight;  // [3, in_dim, out_dim]
  Array bias;    // [out_dim]

  static Conv1dAdapter build(int in_dim, int out_dim, Rng& rng);
  static Conv1dAdapter identity(int dim);  // center tap = I, bias = 0
  Array forward(const Array& w_stu) const;
  std::vector<Array> param_arrays() const { return {weight, bias}; }
};

}  // namespace ctcd

#endif  // CTCD_ENCODER_H_
