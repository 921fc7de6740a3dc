// tests/distill_test.cc

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

#include <cmath>

#include "ctcd/distill.h"
#include "ctcd/ops.h"
#include "testing/grad_check.h"
#include "testing/oracles.h"

using namespace ctcd;
using testing::grad_check;
using testing::random_array;
using testing::uniform_grid;

TEST_CASE("frame weighting of all-zero representation is one half") {
  Array w = Array::zeros({3, 4});
  FrameWeightMask m = frame_weight_mask(w);
  for (double v : m.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("frame weighting of a constant row is sigmoid of that constant") {
  Array w = Array::full({2, 5}, 1.3);
  FrameWeightMask m = frame_weight_mask(w);
  double expect = 1.0 / (1.0 + std::exp(-1.3));
  for (double v : m.values) CHECK(v == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("frame weighting matches a direct mean-sigmoid-tile oracle") {
  Rng rng(31);
  for (int it = 0; it < 100; ++it) {
    int64_t T = rng.uniform_int(6) + 1, D = rng.uniform_int(6) + 1;
    Array w = random_array({T, D}, rng, -3.0, 3.0, false);
    FrameWeightMask m = frame_weight_mask(w);
    for (int64_t t = 0; t < T; ++t) {
      double avg = 0.0;
      for (int64_t d = 0; d < D; ++d) avg += w.data()[static_cast<size_t>(t * D + d)];
      avg /= static_cast<double>(D);
      double expect = 1.0 / (1.0 + std::exp(-avg));
      for (int64_t d = 0; d < D; ++d) {
        double got = m.values[static_cast<size_t>(t * D + d)];
        CHECK(std::abs(got - expect) < 1e-12);
        CHECK(got > 0.0);
        CHECK(got < 1.0);
      }
    }
  }
}

TEST_CASE("rkd loss is zero when the adapter output equals the teacher") {
  Rng rng(32);
  Array w = random_array({4, 3}, rng, -1.0, 1.0, false);
  Conv1dAdapter id = Conv1dAdapter::identity(3);
  CHECK(rkd_loss(w, w, id).item() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rkd loss with zero teacher and identity adapter is a quarter of the norm") {
  Rng rng(33);
  Array w_tea = Array::zeros({5, 3});
  Array w_stu = random_array({5, 3}, rng, -1.0, 1.0, true);
  Conv1dAdapter id = Conv1dAdapter::identity(3);
  double norm2 = 0.0;
  for (double v : w_stu.data()) norm2 += v * v;
  CHECK(rkd_loss(w_tea, w_stu, id).item() == doctest::Approx(0.25 * norm2).epsilon(1e-12));
}

TEST_CASE("rkd loss matches a hand-rolled masked squared distance") {
  Rng rng(34);
  for (int it = 0; it < 20; ++it) {
    int64_t T = rng.uniform_int(4) + 2, Ds = rng.uniform_int(3) + 1, Dt = rng.uniform_int(3) + 1;
    Array w_tea = random_array({T, Dt}, rng, -1.5, 1.5, false);
    Array w_stu = random_array({T, Ds}, rng, -1.5, 1.5, true);
    Conv1dAdapter a = Conv1dAdapter::build(static_cast<int>(Ds), static_cast<int>(Dt), rng);
    double got = rkd_loss(w_tea, w_stu, a).item();

    // Direct computation, no ops involved.
    Array proj = a.forward(w_stu.detached());
    FrameWeightMask m = frame_weight_mask(w_tea);
    double expect = 0.0;
    for (size_t i = 0; i < proj.data().size(); ++i) {
      double d = m.values[i] * (w_tea.data()[i] - proj.data()[i]);
      expect += d * d;
    }
    CHECK(std::abs(got - expect) < 1e-10);
  }
}

TEST_CASE("rkd with the mask replaced by ones equals the plain distance") {
  Rng rng(35);
  Array w_tea = random_array({4, 2}, rng, -1.0, 1.0, false);
  Array w_stu = random_array({4, 3}, rng, -1.0, 1.0, true);
  Conv1dAdapter a = Conv1dAdapter::build(3, 2, rng);
  double unweighted = rkd_loss_unweighted(w_tea, w_stu, a).item();
  Array proj = a.forward(w_stu.detached());
  double expect = 0.0;
  for (size_t i = 0; i < proj.data().size(); ++i) {
    double d = w_tea.data()[i] - proj.data()[i];
    expect += d * d;
  }
  CHECK(unweighted == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("rkd rejects time-length mismatch") {
  Array w_tea = Array::zeros({4, 3});
  Array w_stu = Array::zeros({5, 3});
  Conv1dAdapter id = Conv1dAdapter::identity(3);
  CHECK_THROWS_AS(rkd_loss(w_tea, w_stu, id), ConfigError);
}

TEST_CASE("skd loss vanishes on equal logits") {
  Rng rng(36);
  Array f = random_array({4, 5}, rng, -2.0, 2.0, false);
  CHECK(skd_loss(f, f, 1.0).item() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("skd loss on per-frame one-hot disagreement is two per frame") {
  const int64_t T = 3, K = 4;
  std::vector<double> tea(T * K, 0.0), stu(T * K, 0.0);
  for (int64_t t = 0; t < T; ++t) {
    tea[static_cast<size_t>(t * K + 0)] = 40.0;   // teacher spikes label 0
    stu[static_cast<size_t>(t * K + K - 1)] = 40.0;  // student spikes blank
  }
  Array f_tea = Array::from({T, K}, tea);
  Array f_stu = Array::from({T, K}, stu);
  double loss = skd_loss(f_tea, f_stu, 1.0).item();
  CHECK(loss == doctest::Approx(2.0 * T).epsilon(1e-9));
}

TEST_CASE("skd loss goes to zero at very large temperature") {
  Rng rng(37);
  Array f_tea = random_array({4, 5}, rng, -5.0, 5.0, false);
  Array f_stu = random_array({4, 5}, rng, -5.0, 5.0, false);
  CHECK(skd_loss(f_tea, f_stu, 1e6).item() < 1e-9);
}

TEST_CASE("skd loss is symmetric in value and bounded by two per frame") {
  Rng rng(38);
  for (int it = 0; it < 30; ++it) {
    int64_t T = rng.uniform_int(5) + 1, K = rng.uniform_int(4) + 2;
    Array a = random_array({T, K}, rng, -40.0, 40.0, false);
    Array b = random_array({T, K}, rng, -40.0, 40.0, false);
    double ab = skd_loss(a, b, 1.0).item();
    double ba = skd_loss(b, a, 1.0).item();
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= 2.0 * static_cast<double>(T) + 1e-12);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("combined loss with lambda zero is exactly the ctc term") {
  Array ctc = Array::scalar(1.2345);
  Array skd = Array::scalar(7.0);
  CHECK(combined_loss(ctc, skd, 0.0).item() == 1.2345);
}

TEST_CASE("combined loss with the paper's lambda") {
  Array ctc = Array::scalar(1.0);
  Array skd = Array::scalar(2.0);
  CHECK(combined_loss(ctc, skd, 0.25).item() == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("combined loss is linear in lambda") {
  Array ctc = Array::scalar(0.7);
  Array skd = Array::scalar(1.9);
  Array zero = Array::scalar(0.0);
  double lhs = combined_loss(ctc, skd, 0.15).item() + combined_loss(zero, skd, 0.35).item();
  double rhs = combined_loss(ctc, skd, 0.5).item();
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("frame kd loss hits the floor on disagreeing spikes") {
  // Teacher one-hot on 'a', student spiking blank with p_stu(a) ~ 1e-12
  // after flooring: each frame contributes about -ln(1e-12) = 27.63.
  const int64_t T = 2, K = 3;
  PosteriorGrid tea;
  tea.num_frames = T;
  tea.num_classes = K;
  tea.values = {1.0, 0.0, 0.0, 1.0, 0.0, 0.0};
  std::vector<double> stu(T * K, 0.0);
  for (int64_t t = 0; t < T; ++t) stu[static_cast<size_t>(t * K + K - 1)] = 80.0;
  Array f_stu = Array::from({T, K}, stu);
  double per_frame = frame_kd_loss(tea, f_stu).item() / static_cast<double>(T);
  CHECK(per_frame == doctest::Approx(-std::log(1e-12)).epsilon(1e-6));
  CHECK(per_frame == doctest::Approx(27.631).epsilon(1e-3));
}

TEST_CASE("frame kd loss of matching uniforms is ln 2 per frame") {
  const int64_t T = 4;
  PosteriorGrid tea = uniform_grid(T, 2);
  Array f_stu = Array::zeros({T, 2});
  CHECK(frame_kd_loss(tea, f_stu).item() ==
        doctest::Approx(static_cast<double>(T) * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("stability contrast: frame kd exceeds skd by more than 10x on spikes") {
  const int64_t T = 1, K = 3;
  PosteriorGrid tea;
  tea.num_frames = T;
  tea.num_classes = K;
  tea.values = {1.0, 0.0, 0.0};
  std::vector<double> stu(K, 0.0);
  stu[K - 1] = 80.0;
  Array f_stu = Array::from({T, K}, stu);
  std::vector<double> tea_logits = {80.0, 0.0, 0.0};
  Array f_tea = Array::from({T, K}, tea_logits);
  double kd = frame_kd_loss(tea, f_stu).item();
  double skd = skd_loss(f_tea, f_stu, 1.0).item();
  CHECK(skd <= 2.0);
  CHECK(kd > 10.0 * skd);
}

TEST_CASE("differentiable losses pass finite-difference checks") {
  Rng rng(39);
  for (int it = 0; it < 20; ++it) {
    int64_t T = rng.uniform_int(3) + 2;
    int64_t K = rng.uniform_int(3) + 2;
    int64_t Ds = rng.uniform_int(3) + 1, Dt = rng.uniform_int(3) + 1;

    Array w_tea = random_array({T, Dt}, rng, -1.0, 1.0, false);
    Array w_stu = random_array({T, Ds}, rng, -1.0, 1.0, true);
    Conv1dAdapter a = Conv1dAdapter::build(static_cast<int>(Ds), static_cast<int>(Dt), rng);
    CHECK(grad_check({w_stu, a.weight, a.bias}, [&] { return rkd_loss(w_tea, w_stu, a); }) < 1e-5);

    Array f_tea = random_array({T, K}, rng, -2.0, 2.0, false);
    Array f_stu = random_array({T, K}, rng, -2.0, 2.0, true);
    CHECK(grad_check({f_stu}, [&] { return skd_loss(f_tea, f_stu, 1.5); }) < 1e-5);

    PosteriorGrid tea = testing::random_grid(T, K, rng);
    CHECK(grad_check({f_stu}, [&] { return frame_kd_loss(tea, f_stu); }) < 1e-5);

    GuidedMask mask = guided_mask(tea);
    CHECK(grad_check({f_stu}, [&] { return guided_loss(mask, f_stu, 0.5); }) < 1e-5);
  }
}

TEST_CASE("no gradient reaches teacher inputs in any loss") {
  Rng rng(40);
  Array w_tea = random_array({3, 2}, rng, -1.0, 1.0, true);  // deliberately grad-flagged
  Array w_stu = random_array({3, 2}, rng, -1.0, 1.0, true);
  Conv1dAdapter id = Conv1dAdapter::identity(2);
  Array f_tea = random_array({3, 4}, rng, -1.0, 1.0, true);
  Array f_stu = random_array({3, 4}, rng, -1.0, 1.0, true);
  Tape tape;
  Array total = add(rkd_loss(w_tea, w_stu, id), skd_loss(f_tea, f_stu, 1.0));
  tape.backward(total);
  CHECK_FALSE(w_tea.has_grad());
  CHECK_FALSE(f_tea.has_grad());
  CHECK(w_stu.has_grad());
  CHECK(f_stu.has_grad());
}

TEST_CASE("guided mask marks the argmax with ties to the lowest index") {
  PosteriorGrid g;
  g.num_frames = 2;
  g.num_classes = 2;
  g.values = {0.7, 0.3, 0.2, 0.8};
  GuidedMask m = guided_mask(g);
  CHECK(m.values == std::vector<double>{1.0, 0.0, 0.0, 1.0});

  PosteriorGrid u = uniform_grid(3, 4);
  GuidedMask mu = guided_mask(u);
  for (int64_t t = 0; t < 3; ++t) {
    CHECK(mu.values[static_cast<size_t>(t * 4)] == 1.0);
    for (int64_t k = 1; k < 4; ++k) CHECK(mu.values[static_cast<size_t>(t * 4 + k)] == 0.0);
  }
  CHECK(mu.num_frames == 3);
}

TEST_CASE("guided loss is near zero when the student already matches") {
  PosteriorGrid tea;
  tea.num_frames = 2;
  tea.num_classes = 3;
  tea.values = {0.9, 0.05, 0.05, 0.05, 0.9, 0.05};
  GuidedMask m = guided_mask(tea);
  std::vector<double> stu = {40.0, 0.0, 0.0, 0.0, 40.0, 0.0};
  Array f_stu = Array::from({2, 3}, stu);
  CHECK(guided_loss(m, f_stu, 0.5).item() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("guided loss of a uniform student is weight times ln 2") {
  PosteriorGrid tea;
  tea.num_frames = 3;
  tea.num_classes = 2;
  tea.values = {0.9, 0.1, 0.8, 0.2, 0.7, 0.3};
  GuidedMask m = guided_mask(tea);
  Array f_stu = Array::zeros({3, 2});
  CHECK(guided_loss(m, f_stu, 0.5).item() == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("sequence kd targets: top-1 has weight one") {
  PosteriorGrid g = testing::spiky_grid({0, 3, 1}, 4, 0.9);
  auto targets = seq_kd_targets(g, 1, 8);
  REQUIRE(targets.size() == 1);
  CHECK(targets[0].second == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sequence kd targets: equal log-probs get equal weights") {
  PosteriorGrid g = uniform_grid(1, 3);
  // Hypotheses: empty (1/3), [0] (1/3), [1] (1/3); take the top two.
  auto targets = seq_kd_targets(g, 2, 8);
  REQUIRE(targets.size() == 2);
  CHECK(targets[0].second == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(targets[1].second == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sequence kd weights match an independent softmax over log-probs") {
  Rng rng(41);
  for (int it = 0; it < 10; ++it) {
    PosteriorGrid g = testing::random_grid(4, 3, rng);
    auto targets = seq_kd_targets(g, 3, 64);
    auto hyps = beam_nbest(g, 64, 3);
    REQUIRE(targets.size() == hyps.size());
    double z = 0.0;
    for (const auto& h : hyps) z += std::exp(h.log_prob);
    double wsum = 0.0;
    for (size_t i = 0; i < hyps.size(); ++i) {
      CHECK(targets[i].second == doctest::Approx(std::exp(hyps[i].log_prob) / z).epsilon(1e-9));
      wsum += targets[i].second;
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
  }
}
