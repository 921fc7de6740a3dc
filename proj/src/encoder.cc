// src/encoder.cc

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

#include "ctcd/encoder.h"

#include <cmath>

#include "ctcd/ops.h"

namespace ctcd {

std::string family_name(EncoderFamily f) {
  return f == EncoderFamily::kTdnn ? "tdnn" : "rnn";
}

EncoderFamily family_from_name(const std::string& name) {
  if (name == "tdnn") return EncoderFamily::kTdnn;
  if (name == "rnn") return EncoderFamily::kRnn;
  throw ConfigError("unknown encoder family '" + name + "' (want tdnn or rnn)");
}

void EncoderSpec::validate() const {
  if (input_dim < 1) throw ConfigError("EncoderSpec: input_dim must be >= 1");
  if (num_classes < 2) throw ConfigError("EncoderSpec: num_classes must be >= 2");
  if (layer_widths.empty()) throw ConfigError("EncoderSpec: need at least one layer");
  for (int w : layer_widths)
    if (w < 1) throw ConfigError("EncoderSpec: layer widths must be >= 1");
  if (family == EncoderFamily::kTdnn) {
    if (kernel_widths.size() != layer_widths.size())
      throw ConfigError("EncoderSpec: need one kernel width per tdnn layer");
    for (int k : kernel_widths) {
      if (k < 1 || k % 2 == 0)
        throw ConfigError("EncoderSpec: kernel widths must be odd and >= 1");
    }
  }
}

bool EncoderSpec::operator==(const EncoderSpec& o) const {
  return family == o.family && input_dim == o.input_dim && layer_widths == o.layer_widths &&
         kernel_widths == o.kernel_widths && bidirectional == o.bidirectional &&
         num_classes == o.num_classes;
}

int64_t EncoderSpec::num_params() const {
  validate();
  int64_t total = 0;
  int64_t in = input_dim;
  if (family == EncoderFamily::kTdnn) {
    for (size_t l = 0; l < layer_widths.size(); ++l) {
      int64_t out = layer_widths[l];
      total += static_cast<int64_t>(kernel_widths[l]) * in * out + out;
      in = out;
    }
  } else {
    int dirs = bidirectional ? 2 : 1;
    for (size_t l = 0; l < layer_widths.size(); ++l) {
      int64_t h = layer_widths[l];
      total += dirs * (3 * (in * h + h * h + h));  // z, r, candidate
      in = static_cast<int64_t>(dirs) * h;
    }
  }
  total += in * num_classes + num_classes;  // output projection
  return total;
}

namespace {

Array init_uniform(Shape shape, int64_t fan_in, Rng& rng, bool trainable) {
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(static_cast<size_t>(shape.numel()));
  for (double& e : v) e = rng.uniform(-bound, bound);
  return Array::from(shape, std::move(v), trainable);
}

struct GruDirection {
  // x-to-hidden, hidden-to-hidden, bias for each of z, r, candidate.
  Array wz, uz, bz, wr, ur, br, wh, uh, bh;
};

// One GRU pass over [T, D] input. If reversed, time runs backwards but the
// output keeps the input frame order.
Array gru_direction(const Array& x, const GruDirection& g, bool reversed) {
  int64_t T = x.shape().dim(0);
  int64_t H = g.uz.shape().dim(0);
  Array ones = Array::full({1, H}, 1.0);
  Array h = Array::zeros({1, H});
  std::vector<Array> outs(static_cast<size_t>(T));
  for (int64_t i = 0; i < T; ++i) {
    int64_t t = reversed ? T - 1 - i : i;
    Array xt = slice(x, 0, t, 1);
    Array z = sigmoid(add(add(matmul(xt, g.wz), matmul(h, g.uz)), g.bz));
    Array r = sigmoid(add(add(matmul(xt, g.wr), matmul(h, g.ur)), g.br));
    Array cand = ctcd::tanh(add(add(matmul(xt, g.wh), matmul(mul(r, h), g.uh)), g.bh));
    h = add(mul(sub(ones, z), h), mul(z, cand));
    outs[static_cast<size_t>(t)] = h;
  }
  return concat(outs, 0);
}

}  // namespace

Encoder Encoder::build(const EncoderSpec& spec, Rng& rng, bool trainable) {
  spec.validate();
  Encoder e;
  e.spec_ = spec;
  int64_t in = spec.input_dim;
  if (spec.family == EncoderFamily::kTdnn) {
    for (size_t l = 0; l < spec.layer_widths.size(); ++l) {
      int64_t out = spec.layer_widths[l];
      int64_t k = spec.kernel_widths[l];
      std::string p = "tdnn." + std::to_string(l) + ".";
      e.params_.push_back({p + "weight", init_uniform({k, in, out}, k * in, rng, trainable)});
      e.params_.push_back({p + "bias", Array::zeros({out}, trainable)});
      in = out;
    }
  } else {
    int dirs = spec.bidirectional ? 2 : 1;
    for (size_t l = 0; l < spec.layer_widths.size(); ++l) {
      int64_t h = spec.layer_widths[l];
      for (int d = 0; d < dirs; ++d) {
        std::string p = "rnn." + std::to_string(l) + (d == 0 ? ".fw." : ".bw.");
        for (const char* gate : {"z", "r", "h"}) {
          e.params_.push_back({p + "w" + gate, init_uniform({in, h}, in, rng, trainable)});
          e.params_.push_back({p + "u" + gate, init_uniform({h, h}, h, rng, trainable)});
          e.params_.push_back({p + "b" + gate, Array::zeros({h}, trainable)});
        }
      }
      in = static_cast<int64_t>(dirs) * h;
    }
  }
  e.params_.push_back({"out.weight", init_uniform({in, spec.num_classes}, in, rng, trainable)});
  e.params_.push_back({"out.bias", Array::zeros({spec.num_classes}, trainable)});
  return e;
}

Encoder Encoder::from_params(const EncoderSpec& spec, std::vector<NamedParam> params,
                             bool trainable) {
  spec.validate();
  Encoder e;
  e.spec_ = spec;
  e.params_ = std::move(params);
  e.set_trainable(trainable);
  // Cross-check against a freshly built layout.
  Rng probe(0);
  Encoder expect = Encoder::build(spec, probe, false);
  if (expect.params_.size() != e.params_.size())
    throw ConfigError("encoder parameters do not match spec: expected " +
                      std::to_string(expect.params_.size()) + " tensors, got " +
                      std::to_string(e.params_.size()));
  for (size_t i = 0; i < e.params_.size(); ++i) {
    if (e.params_[i].name != expect.params_[i].name)
      throw ConfigError("encoder parameter name mismatch: " + e.params_[i].name + " vs " +
                        expect.params_[i].name);
    if (e.params_[i].value.shape() != expect.params_[i].value.shape())
      throw ConfigError("shape mismatch for " + e.params_[i].name + ": " +
                        e.params_[i].value.shape().str() + " vs spec " +
                        expect.params_[i].value.shape().str());
  }
  return e;
}

const Array& Encoder::param(const std::string& name) const {
  for (const NamedParam& p : params_)
    if (p.name == name) return p.value;
  throw ConfigError("encoder has no parameter '" + name + "'");
}

std::vector<Array> Encoder::param_arrays() const {
  std::vector<Array> out;
  out.reserve(params_.size());
  for (const NamedParam& p : params_) out.push_back(p.value);
  return out;
}

void Encoder::set_trainable(bool trainable) {
  for (NamedParam& p : params_) p.value.set_requires_grad(trainable);
}

EncoderOutput Encoder::forward(const Array& features) const {
  if (features.shape().rank() != 2 || features.shape().dim(1) != spec_.input_dim)
    throw ConfigError("Encoder::forward: want [T, " + std::to_string(spec_.input_dim) +
                      "] features, got " + features.shape().str());
  EncoderOutput out;
  Array h = features;
  try {
    if (spec_.family == EncoderFamily::kTdnn) {
      for (size_t l = 0; l < spec_.layer_widths.size(); ++l) {
        std::string p = "tdnn." + std::to_string(l) + ".";
        h = relu(conv1d(h, param(p + "weight"), param(p + "bias")));
        out.hidden_layers.push_back(h);
      }
    } else {
      for (size_t l = 0; l < spec_.layer_widths.size(); ++l) {
        std::string p = "rnn." + std::to_string(l) + ".";
        GruDirection fw{param(p + "fw.wz"), param(p + "fw.uz"), param(p + "fw.bz"),
                        param(p + "fw.wr"), param(p + "fw.ur"), param(p + "fw.br"),
                        param(p + "fw.wh"), param(p + "fw.uh"), param(p + "fw.bh")};
        Array f = gru_direction(h, fw, false);
        if (spec_.bidirectional) {
          GruDirection bw{param(p + "bw.wz"), param(p + "bw.uz"), param(p + "bw.bz"),
                          param(p + "bw.wr"), param(p + "bw.ur"), param(p + "bw.br"),
                          param(p + "bw.wh"), param(p + "bw.uh"), param(p + "bw.bh")};
          h = concat({f, gru_direction(h, bw, true)}, 1);
        } else {
          h = f;
        }
        out.hidden_layers.push_back(h);
      }
    }
  } catch (const NumericError& e) {
    throw NumericError("encoder layer " + std::to_string(out.hidden_layers.size()) + ": " +
                       e.what());
  }
  out.logits = add(matmul(h, param("out.weight")), param("out.bias"));
  return out;
}

Conv1dAdapter Conv1dAdapter::build(int in_dim, int out_dim, Rng& rng) {
  if (in_dim < 1 || out_dim < 1) throw ConfigError("Conv1dAdapter: dims must be >= 1");
  Conv1dAdapter a;
  a.weight = init_uniform({3, in_dim, out_dim}, 3 * static_cast<int64_t>(in_dim), rng, true);
  a.bias = Array::zeros({out_dim}, true);
  return a;
}

Conv1dAdapter Conv1dAdapter::identity(int dim) {
  Conv1dAdapter a;
  a.weight = Array::zeros({3, dim, dim}, true);
  for (int c = 0; c < dim; ++c)
    a.weight.data()[static_cast<size_t>((1 * dim + c) * dim + c)] = 1.0;
  a.bias = Array::zeros({dim}, true);
  return a;
}

Array Conv1dAdapter::forward(const Array& w_stu) const {
  if (w_stu.shape().rank() != 2 || w_stu.shape().dim(1) != weight.shape().dim(1))
    throw ConfigError("adapter: input channels " + w_stu.shape().str() + " do not match " +
                      weight.shape().str());
  return conv1d(w_stu, weight, bias);
}

}  // namespace ctcd
