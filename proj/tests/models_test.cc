// tests/models_test.cc

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ctcd/checkpoint.h"
#include "ctcd/encoder.h"
#include "ctcd/ops.h"
#include "testing/grad_check.h"

using namespace ctcd;
using testing::grad_check;
using testing::random_array;

namespace {

EncoderSpec tdnn_spec(std::vector<int> widths, std::vector<int> kernels, int in = 8, int k = 5) {
  EncoderSpec s;
  s.family = EncoderFamily::kTdnn;
  s.input_dim = in;
  s.layer_widths = std::move(widths);
  s.kernel_widths = std::move(kernels);
  s.num_classes = k;
  return s;
}

EncoderSpec rnn_spec(std::vector<int> widths, bool bidi, int in = 8, int k = 5) {
  EncoderSpec s;
  s.family = EncoderFamily::kRnn;
  s.input_dim = in;
  s.layer_widths = std::move(widths);
  s.bidirectional = bidi;
  s.num_classes = k;
  return s;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("same seed builds identical parameters") {
  EncoderSpec spec = rnn_spec({6, 4}, true);
  Rng r1(77), r2(77);
  Encoder a = Encoder::build(spec, r1);
  Encoder b = Encoder::build(spec, r2);
  REQUIRE(a.params().size() == b.params().size());
  for (size_t i = 0; i < a.params().size(); ++i)
    CHECK(a.params()[i].value.data() == b.params()[i].value.data());
}

TEST_CASE("tdnn parameter count matches the closed form") {
  EncoderSpec spec = tdnn_spec({16, 16}, {3, 3}, 8, 5);
  // conv0: 3*8*16 + 16, conv1: 3*16*16 + 16, out: 16*5 + 5.
  int64_t expect = (3 * 8 * 16 + 16) + (3 * 16 * 16 + 16) + (16 * 5 + 5);
  CHECK(spec.num_params() == expect);
  Rng rng(1);
  Encoder e = Encoder::build(spec, rng);
  int64_t total = 0;
  for (const NamedParam& p : e.params()) total += p.value.numel();
  CHECK(total == expect);
}

TEST_CASE("gru parameter count matches the closed form") {
  EncoderSpec spec = rnn_spec({6}, true, 4, 3);
  // Per direction: 3 gates of (4*6 + 6*6 + 6); two directions; out: 12*3 + 3.
  int64_t expect = 2 * 3 * (4 * 6 + 6 * 6 + 6) + (12 * 3 + 3);
  CHECK(spec.num_params() == expect);
  Rng rng(2);
  Encoder e = Encoder::build(spec, rng);
  int64_t total = 0;
  for (const NamedParam& p : e.params()) total += p.value.numel();
  CHECK(total == expect);
}

TEST_CASE("zero-layer specs are rejected") {
  EncoderSpec spec = tdnn_spec({}, {});
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  Rng rng(1);
  CHECK_THROWS_AS(Encoder::build(spec, rng), ConfigError);
}

TEST_CASE("even kernel widths are rejected") {
  EncoderSpec spec = tdnn_spec({8}, {4});
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}

TEST_CASE("zero input through a zeroed final layer gives uniform rows") {
  EncoderSpec spec = tdnn_spec({6}, {3}, 4, 5);
  Rng rng(3);
  Encoder e = Encoder::build(spec, rng);
  for (NamedParam& p : e.params())
    if (p.name.rfind("out.", 0) == 0)
      for (double& v : p.value.data()) v = 0.0;
  Array x = Array::zeros({7, 4});
  EncoderOutput out = e.forward(x);
  Array post = softmax(out.logits, 1);
  for (double v : post.data()) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("bidirectional encoder output has shape T x classes") {
  EncoderSpec spec = rnn_spec({5}, true, 3, 4);
  Rng rng(4);
  Encoder e = Encoder::build(spec, rng);
  Array x = random_array({9, 3}, rng, -1.0, 1.0, false);
  EncoderOutput out = e.forward(x);
  CHECK(out.logits.shape() == Shape{9, 4});
  REQUIRE(out.hidden_layers.size() == 1);
  CHECK(out.hidden_layers[0].shape() == Shape{9, 10});
}

TEST_CASE("T is preserved for both families across lengths") {
  Rng rng(5);
  Encoder tdnn = Encoder::build(tdnn_spec({4, 4}, {5, 3}, 2, 3), rng);
  Encoder rnn = Encoder::build(rnn_spec({4}, true, 2, 3), rng);
  for (int64_t T : {1, 2, 3, 7, 33, 64}) {
    Array x = random_array({T, 2}, rng, -1.0, 1.0, false);
    CHECK(tdnn.forward(x).logits.shape() == Shape{T, 3});
    CHECK(rnn.forward(x).logits.shape() == Shape{T, 3});
  }
}

TEST_CASE("forward is deterministic for a fixed seed") {
  Rng r1(6), r2(6);
  Encoder a = Encoder::build(rnn_spec({4}, false, 3, 4), r1);
  Encoder b = Encoder::build(rnn_spec({4}, false, 3, 4), r2);
  Rng rx(7);
  Array x = random_array({5, 3}, rx, -1.0, 1.0, false);
  CHECK(a.forward(x).logits.data() == b.forward(x).logits.data());
}

TEST_CASE("feature dim mismatch is a config error") {
  Rng rng(8);
  Encoder e = Encoder::build(tdnn_spec({4}, {3}, 6, 3), rng);
  CHECK_THROWS_AS(e.forward(Array::zeros({5, 4})), ConfigError);
}

TEST_CASE("full tdnn encoder gradient checks on a 3-frame input") {
  Rng rng(9);
  Encoder e = Encoder::build(tdnn_spec({3, 3}, {3, 3}, 2, 3), rng);
  Array x = random_array({3, 2}, rng, -1.0, 1.0, true);
  std::vector<Array> leaves = e.param_arrays();
  leaves.push_back(x);
  double err = grad_check(leaves, [&] { return sum(square(e.forward(x).logits)); });
  CHECK(err < 1e-4);
}

TEST_CASE("full gru encoder gradient checks on a 3-frame input") {
  Rng rng(10);
  Encoder e = Encoder::build(rnn_spec({3}, true, 2, 3), rng);
  Array x = random_array({3, 2}, rng, -1.0, 1.0, true);
  std::vector<Array> leaves = e.param_arrays();
  leaves.push_back(x);
  double err = grad_check(leaves, [&] { return sum(square(e.forward(x).logits)); });
  CHECK(err < 1e-4);
}

TEST_CASE("adapter with identity configuration passes input through") {
  Rng rng(11);
  Conv1dAdapter id = Conv1dAdapter::identity(4);
  Array x = random_array({6, 4}, rng, -2.0, 2.0, false);
  Array y = id.forward(x);
  for (size_t i = 0; i < x.data().size(); ++i) CHECK(y.data()[i] == x.data()[i]);
}

TEST_CASE("zeroed adapter outputs zero") {
  Conv1dAdapter a = Conv1dAdapter::identity(3);
  for (double& v : a.weight.data()) v = 0.0;
  Array x = Array::full({4, 3}, 1.7);
  Array y = a.forward(x);
  for (double v : y.data()) CHECK(v == 0.0);
}

TEST_CASE("adapter gradient checks") {
  Rng rng(12);
  Conv1dAdapter a = Conv1dAdapter::build(3, 2, rng);
  Array x = random_array({4, 3}, rng, -1.0, 1.0, true);
  double err = grad_check({x, a.weight, a.bias}, [&] { return sum(square(a.forward(x))); });
  CHECK(err < 1e-5);
}

TEST_CASE("adapter rejects channel mismatch") {
  Rng rng(13);
  Conv1dAdapter a = Conv1dAdapter::build(3, 2, rng);
  CHECK_THROWS_AS(a.forward(Array::zeros({4, 2})), ConfigError);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
  Rng rng(14);
  Encoder e = Encoder::build(rnn_spec({4, 3}, true, 5, 4), rng);
  Checkpoint c = checkpoint_of(e, 2, 17, 999);
  auto path = temp_file("ctcd_roundtrip.ckpt");
  save_checkpoint(c, path.string());
  Checkpoint back = load_checkpoint(path.string());
  CHECK(back.spec == c.spec);
  CHECK(back.stage == 2);
  CHECK(back.epoch == 17);
  CHECK(back.seed == 999);
  REQUIRE(back.params.size() == c.params.size());
  for (size_t i = 0; i < c.params.size(); ++i) {
    CHECK(back.params[i].name == c.params[i].name);
    CHECK(back.params[i].value.data() == c.params[i].value.data());
  }
  std::filesystem::remove(path);
}

TEST_CASE("save twice produces identical bytes") {
  Rng rng(15);
  Encoder e = Encoder::build(tdnn_spec({4}, {3}, 2, 3), rng);
  Checkpoint c = checkpoint_of(e, 0, 1, 5);
  auto p1 = temp_file("ctcd_bytes1.ckpt"), p2 = temp_file("ctcd_bytes2.ckpt");
  save_checkpoint(c, p1.string());
  save_checkpoint(c, p2.string());
  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(s1 == s2);
  std::filesystem::remove(p1);
  std::filesystem::remove(p2);
}

TEST_CASE("corrupted magic bytes raise a format error") {
  Rng rng(16);
  Encoder e = Encoder::build(tdnn_spec({4}, {3}, 2, 3), rng);
  auto path = temp_file("ctcd_badmagic.ckpt");
  save_checkpoint(checkpoint_of(e, 0, 0, 0), path.string());
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(0);
    f.write("XXXX", 4);
  }
  CHECK_THROWS_AS(load_checkpoint(path.string()), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("truncated checkpoint raises a format error") {
  Rng rng(17);
  Encoder e = Encoder::build(tdnn_spec({4}, {3}, 2, 3), rng);
  auto path = temp_file("ctcd_trunc.ckpt");
  save_checkpoint(checkpoint_of(e, 0, 0, 0), path.string());
  auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size / 2);
  CHECK_THROWS_AS(load_checkpoint(path.string()), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("version mismatch raises a distinct format error") {
  Rng rng(18);
  Encoder e = Encoder::build(tdnn_spec({4}, {3}, 2, 3), rng);
  auto path = temp_file("ctcd_badver.ckpt");
  save_checkpoint(checkpoint_of(e, 0, 0, 0), path.string());
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(8);  // version field follows the 8-byte magic
    uint32_t v = 99;
    f.write(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  try {
    load_checkpoint(path.string());
    FAIL("expected FormatError");
  } catch (const FormatError& err) {
    CHECK(std::string(err.what()).find("version") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("loading params into a mismatched spec is a shape error") {
  Rng rng(19);
  Encoder e = Encoder::build(tdnn_spec({4}, {3}, 2, 3), rng);
  Checkpoint c = checkpoint_of(e, 0, 0, 0);
  c.spec.layer_widths = {5};  // spec no longer matches the stored tensors
  auto path = temp_file("ctcd_mismatch.ckpt");
  save_checkpoint(c, path.string());
  Checkpoint back = load_checkpoint(path.string());
  try {
    encoder_from_checkpoint(back, false);
    FAIL("expected ConfigError");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("shape") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("frozen encoders take no gradient") {
  Rng rng(20);
  Encoder e = Encoder::build(tdnn_spec({3}, {3}, 2, 3), rng, /*trainable=*/false);
  Array x = random_array({3, 2}, rng, -1.0, 1.0, true);
  Tape tape;
  Array loss = sum(square(e.forward(x).logits));
  tape.backward(loss);
  for (const NamedParam& p : e.params()) CHECK_FALSE(p.value.has_grad());
  CHECK(x.has_grad());
}
