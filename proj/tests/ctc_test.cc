// tests/ctc_test.cc

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

#include "ctcd/ctc.h"
#include "ctcd/ops.h"
#include "testing/grad_check.h"
#include "testing/oracles.h"

using namespace ctcd;
using testing::enumerate_collapsed;
using testing::grad_check;
using testing::random_array;
using testing::random_grid;
using testing::spiky_grid;
using testing::uniform_grid;

namespace {

// c=0, a=1, t=2, blank=3 for the readable cases below.
constexpr int kC = 0, kA = 1, kT = 2, kBlank = 3;

LabelSeq seq(std::vector<int> labels, int alphabet) {
  LabelSeq s;
  s.labels = std::move(labels);
  s.alphabet_size = alphabet;
  return s;
}

}  // namespace

TEST_CASE("collapse merges repeats then removes blanks") {
  // Both spellings of "cat" over {c, a, t, blank}.
  Path p1{{kBlank, kC, kC, kC, kBlank, kA, kBlank, kBlank, kT, kT, kBlank}};
  Path p2{{kC, kC, kBlank, kBlank, kA, kA, kBlank, kBlank, kBlank, kBlank, kT}};
  CHECK(collapse(p1, 4).labels == std::vector<int>{kC, kA, kT});
  CHECK(collapse(p2, 4).labels == std::vector<int>{kC, kA, kT});
}

TEST_CASE("collapse of an all-blank path is empty") {
  Path p{{kBlank, kBlank, kBlank}};
  CHECK(collapse(p, 4).labels.empty());
}

TEST_CASE("collapse fixes blank-free, repetition-free sequences") {
  Rng rng(42);
  for (int it = 0; it < 200; ++it) {
    int K = static_cast<int>(rng.uniform_int(3)) + 3;
    int n = static_cast<int>(rng.uniform_int(8));
    // Draw labels over Y with no adjacent repeats.
    std::vector<int> labels;
    int prev = -1;
    for (int i = 0; i < n; ++i) {
      int l = static_cast<int>(rng.uniform_int(K - 1));
      if (l == prev) l = (l + 1) % (K - 1);
      labels.push_back(l);
      prev = l;
    }
    Path embedded{labels};
    CHECK(collapse(embedded, K).labels == labels);
  }
}

TEST_CASE("collapsing twice equals collapsing the re-embedded merge") {
  // A collapsed sequence may still contain repeats that came from
  // blank-separated spellings ([a, blank, a] -> [a, a]); re-embedding such a
  // sequence as a path and collapsing merges them.
  Path p{{0, 3, 0}};
  LabelSeq once = collapse(p, 4);
  CHECK(once.labels == std::vector<int>{0, 0});
  Path again{once.labels};
  CHECK(collapse(again, 4).labels == std::vector<int>{0});
}

TEST_CASE("brute force: single uniform frame") {
  PosteriorGrid g = uniform_grid(1, 2);
  CHECK(brute_force_log_prob(g, seq({0}, 1)) == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("brute force: two uniform frames, target [a]") {
  // Hand enumeration of B^-1([a]) over
  // paths {aa, ab, ba, bb} with b = blank: aa, ab, ba qualify.
  double expect = std::log(3.0 * 0.25);
  PosteriorGrid g = uniform_grid(2, 2);
  CHECK(brute_force_log_prob(g, seq({0}, 1)) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(expect == doctest::Approx(-0.2877).epsilon(1e-4));
}

TEST_CASE("brute force: inexpressible targets have zero probability") {
  PosteriorGrid g = uniform_grid(2, 2);
  CHECK(brute_force_log_prob(g, seq({0, 0, 0}, 1)) == -std::numeric_limits<double>::infinity());
  // Repeats need a separating blank: [a,a] in 2 frames is impossible.
  CHECK(brute_force_log_prob(g, seq({0, 0}, 1)) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("brute force: enumeration budget is enforced") {
  PosteriorGrid g = uniform_grid(30, 4);
  CHECK_THROWS_AS(brute_force_log_prob(g, seq({0}, 3)), UsageError);
}

TEST_CASE("ctc_loss: single frame, uniform logits") {
  Array logits = Array::zeros({1, 2});
  CHECK(ctc_loss(logits, seq({0}, 1)).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("ctc_loss: two frames, uniform logits, matches oracle") {
  Array logits = Array::zeros({2, 2});
  double loss = ctc_loss(logits, seq({0}, 1)).item();
  CHECK(loss == doctest::Approx(0.2877).epsilon(1e-3));
  PosteriorGrid g = PosteriorGrid::from_logits(logits);
  CHECK(loss == doctest::Approx(-brute_force_log_prob(g, seq({0}, 1))).epsilon(1e-12));
}

TEST_CASE("ctc_loss: inexpressible target raises a defined error") {
  Array logits = Array::zeros({2, 2});
  CHECK_THROWS_AS(ctc_loss(logits, seq({0, 0}, 1)), InfeasibleTargetError);
  CHECK_THROWS_AS(ctc_loss(logits, seq({0, 0, 0}, 1)), InfeasibleTargetError);
}

TEST_CASE("ctc_loss: empty target scores the all-blank mass") {
  Rng rng(5);
  Array logits = random_array({3, 3}, rng, -2.0, 2.0, false);
  PosteriorGrid g = PosteriorGrid::from_logits(logits);
  double expect = 0.0;
  for (int64_t t = 0; t < 3; ++t) expect -= std::log(g.at(t, 2));
  CHECK(ctc_loss(logits, seq({}, 2)).item() == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("ctc_loss agrees with the brute-force oracle on small instances") {
  Rng rng(7);
  for (int64_t T = 1; T <= 5; ++T) {
    for (int alphabet = 1; alphabet <= 2; ++alphabet) {
      PosteriorGrid g = random_grid(T, alphabet + 1, rng);
      // Logits = log posteriors reproduce the grid exactly under softmax.
      std::vector<double> logit_v(g.values.size());
      for (size_t i = 0; i < g.values.size(); ++i) logit_v[i] = std::log(g.values[i]);
      Array logits = Array::from({T, alphabet + 1}, std::move(logit_v));
      for (const auto& [labels, mass] : enumerate_collapsed(g)) {
        LabelSeq target = seq(labels, alphabet);
        if (T < min_expressible_frames(target)) continue;
        double loss = ctc_loss(logits, target).item();
        CHECK(loss == doctest::Approx(-std::log(mass)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("exp(brute force) over all collapsed sequences partitions path space") {
  Rng rng(9);
  for (int it = 0; it < 5; ++it) {
    PosteriorGrid g = random_grid(4, 3, rng);
    auto mass = enumerate_collapsed(g);
    double total = 0.0;
    for (const auto& [labels, m] : mass) {
      double lp = brute_force_log_prob(g, seq(labels, 2));
      total += std::exp(lp);
      CHECK(lp == doctest::Approx(std::log(m)).epsilon(1e-9));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("ctc_loss gradient matches finite differences") {
  Rng rng(13);
  for (int it = 0; it < 20; ++it) {
    int64_t T = rng.uniform_int(4) + 2;
    int alphabet = static_cast<int>(rng.uniform_int(2)) + 1;
    LabelSeq target = seq({}, alphabet);
    int64_t n = rng.uniform_int(T) + 1;
    for (int64_t i = 0; i < n; ++i)
      target.labels.push_back(static_cast<int>(rng.uniform_int(alphabet)));
    if (T < min_expressible_frames(target)) {
      target.labels.resize(1);
    }
    Array logits = random_array({T, alphabet + 1}, rng, -2.0, 2.0);
    double err = grad_check({logits}, [&] { return ctc_loss(logits, target); });
    CHECK(err < 1e-5);
  }
}

TEST_CASE("greedy decode reads the spike sequence") {
  PosteriorGrid g = spiky_grid({kBlank, kC, kA, kBlank, kT}, 4);
  CHECK(greedy_decode(g).labels == std::vector<int>{kC, kA, kT});
}

TEST_CASE("greedy decode of blank-dominant grid is empty") {
  PosteriorGrid g = spiky_grid({kBlank, kBlank, kBlank}, 4, 0.7);
  CHECK(greedy_decode(g).labels.empty());
}

TEST_CASE("greedy ties break toward the lowest label index") {
  PosteriorGrid g = uniform_grid(2, 3);
  // Every row ties; index 0 wins, repeats collapse.
  CHECK(greedy_decode(g).labels == std::vector<int>{0});
}

TEST_CASE("greedy decode agrees with a direct argmax-path oracle") {
  Rng rng(17);
  for (int it = 0; it < 50; ++it) {
    PosteriorGrid g = random_grid(3, 3, rng);
    Path arg;
    for (int64_t t = 0; t < 3; ++t) {
      int best = 0;
      for (int k = 1; k < 3; ++k)
        if (g.at(t, k) > g.at(t, best)) best = k;
      arg.frames.push_back(best);
    }
    CHECK(greedy_decode(g).labels == collapse(arg, 3).labels);
  }
}

TEST_CASE("beam: single uniform frame resolves ties to the empty sequence") {
  PosteriorGrid g = uniform_grid(1, 2);
  auto hyps = beam_nbest(g, 4, 1);
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].seq.labels.empty());
  CHECK(hyps[0].log_prob == doctest::Approx(std::log(0.5)).epsilon(1e-12));
}

TEST_CASE("exhaustive beam reproduces the brute-force ranking") {
  Rng rng(23);
  for (int it = 0; it < 10; ++it) {
    PosteriorGrid g = random_grid(3, 3, rng);
    auto mass = enumerate_collapsed(g);
    auto hyps = beam_nbest(g, 1 << 10, static_cast<int>(mass.size()));
    REQUIRE(hyps.size() == mass.size());
    double prev = std::numeric_limits<double>::infinity();
    for (const BeamHyp& h : hyps) {
      REQUIRE(mass.count(h.seq.labels) == 1);
      CHECK(h.log_prob == doctest::Approx(std::log(mass[h.seq.labels])).epsilon(1e-9));
      CHECK(h.log_prob <= prev + 1e-12);
      prev = h.log_prob;
    }
  }
}

TEST_CASE("beam top-1 on a spiky grid equals greedy decoding") {
  PosteriorGrid g = spiky_grid({kC, kBlank, kA, kA, kBlank, kT}, 4, 0.95);
  auto hyps = beam_nbest(g, 8, 1);
  REQUIRE(hyps.size() == 1);
  CHECK(hyps[0].seq.labels == greedy_decode(g).labels);
}

TEST_CASE("posterior grid validation rejects bad rows") {
  PosteriorGrid g = uniform_grid(2, 2);
  g.values[0] = 0.9;  // row no longer sums to 1
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g = uniform_grid(2, 2);
  g.values[0] = -0.5;
  g.values[1] = 1.5;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("label sequences reject out-of-range indices") {
  CHECK_THROWS_AS(seq({3}, 3).validate(), ConfigError);  // 3 would be the blank
  CHECK_NOTHROW(seq({0, 1, 2}, 3).validate());
}
