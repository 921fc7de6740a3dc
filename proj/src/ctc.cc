// src/ctc.cc

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

#include "ctcd/ctc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "ctcd/ops.h"

namespace ctcd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Finite stand-in for log(0) inside tape arrays; exp() of it underflows to
// exactly zero, so impossible DP states carry no probability and no gradient.
constexpr double kLogZero = -1e30;

double logaddexp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

void LabelSeq::validate() const {
  if (alphabet_size < 1) throw ConfigError("LabelSeq: alphabet_size must be >= 1");
  for (int l : labels)
    if (l < 0 || l >= alphabet_size)
      throw ConfigError("LabelSeq: label " + std::to_string(l) + " outside [0, " +
                        std::to_string(alphabet_size) + ")");
}

void PosteriorGrid::validate() const {
  if (num_frames < 1 || num_classes < 2)
    throw ConfigError("PosteriorGrid: need T >= 1 and |Y'| >= 2");
  if (static_cast<int64_t>(values.size()) != num_frames * num_classes)
    throw ConfigError("PosteriorGrid: value count does not match T x |Y'|");
  for (int64_t t = 0; t < num_frames; ++t) {
    double row = 0.0;
    for (int64_t k = 0; k < num_classes; ++k) {
      double p = at(t, k);
      if (p < 0.0 || !std::isfinite(p))
        throw ConfigError("PosteriorGrid: negative or non-finite entry at frame " + std::to_string(t));
      row += p;
    }
    if (std::abs(row - 1.0) > 1e-9)
      throw ConfigError("PosteriorGrid: row " + std::to_string(t) + " sums to " + std::to_string(row));
  }
}

PosteriorGrid PosteriorGrid::from_logits(const Array& logits) {
  if (logits.shape().rank() != 2) throw ConfigError("from_logits: want rank-2 logits");
  PosteriorGrid g;
  g.num_frames = logits.shape().dim(0);
  g.num_classes = logits.shape().dim(1);
  g.values = softmax(logits.detached(), 1).data();
  return g;
}

LabelSeq collapse(const Path& path, int num_classes) {
  int blank = num_classes - 1;
  LabelSeq out;
  out.alphabet_size = num_classes - 1;
  int prev = -1;
  for (int f : path.frames) {
    if (f < 0 || f >= num_classes) throw ConfigError("collapse: frame label out of range");
    if (f != prev && f != blank) out.labels.push_back(f);
    prev = f;
  }
  return out;
}

int64_t min_expressible_frames(const LabelSeq& target) {
  int64_t n = static_cast<int64_t>(target.labels.size());
  int64_t repeats = 0;
  for (size_t i = 1; i < target.labels.size(); ++i)
    if (target.labels[i] == target.labels[i - 1]) ++repeats;
  return n + repeats;
}

double brute_force_log_prob(const PosteriorGrid& grid, const LabelSeq& target) {
  target.validate();
  if (target.num_classes() != grid.num_classes)
    throw ConfigError("brute_force_log_prob: alphabet mismatch");
  int64_t T = grid.num_frames;
  int64_t K = grid.num_classes;
  double budget = std::pow(static_cast<double>(K), static_cast<double>(T));
  if (budget > 1e7)
    throw UsageError("brute_force_log_prob: |Y'|^T = " + std::to_string(budget) + " exceeds 1e7");

  std::vector<int> path(static_cast<size_t>(T), 0);
  double total = 0.0;
  // Odometer over all K^T paths.
  while (true) {
    double p = 1.0;
    for (int64_t t = 0; t < T; ++t) p *= grid.at(t, path[static_cast<size_t>(t)]);
    if (p > 0.0) {
      Path pp;
      pp.frames = path;
      if (collapse(pp, static_cast<int>(K)).labels == target.labels) total += p;
    }
    int64_t t = T - 1;
    while (t >= 0 && ++path[static_cast<size_t>(t)] == K) path[static_cast<size_t>(t--)] = 0;
    if (t < 0) break;
  }
  return total > 0.0 ? std::log(total) : kNegInf;
}

Array ctc_loss(const Array& logits, const LabelSeq& target) {
  target.validate();
  if (logits.shape().rank() != 2)
    throw ConfigError("ctc_loss: want [T, |Y'|] logits, got " + logits.shape().str());
  int64_t T = logits.shape().dim(0);
  int64_t K = logits.shape().dim(1);
  if (K != target.num_classes())
    throw ConfigError("ctc_loss: logits have " + std::to_string(K) + " classes, target expects " +
                      std::to_string(target.num_classes()));
  if (T < min_expressible_frames(target))
    throw InfeasibleTargetError("ctc_loss: target of length " + std::to_string(target.labels.size()) +
                                " needs at least " + std::to_string(min_expressible_frames(target)) +
                                " frames, got " + std::to_string(T));

  const int blank = target.blank_id();
  // Blank-augmented target: blank y1 blank y2 ... blank.
  std::vector<int> aug;
  aug.push_back(blank);
  for (int l : target.labels) {
    aug.push_back(l);
    aug.push_back(blank);
  }
  const int64_t S = static_cast<int64_t>(aug.size());

  Array lsm = log_softmax(logits, 1);

  // Differentiable gather: emission[t][s] = lsm[t][aug[s]].
  std::vector<double> sel(static_cast<size_t>(K * S), 0.0);
  for (int64_t s = 0; s < S; ++s) sel[static_cast<size_t>(aug[static_cast<size_t>(s)] * S + s)] = 1.0;
  Array emission = matmul(lsm, Array::from({K, S}, std::move(sel)));

  // alpha_0: states 0 and (if present) 1 are reachable.
  std::vector<double> init(static_cast<size_t>(S), kLogZero);
  init[0] = 0.0;
  if (S > 1) init[1] = 0.0;
  Array alpha = add(slice(emission, 0, 0, 1), Array::from({1, S}, std::move(init)));

  // Skip transition s-2 -> s is allowed only onto a non-blank state that
  // differs from the label two states back.
  std::vector<double> skip_penalty(static_cast<size_t>(S), 0.0);
  for (int64_t s = 0; s < S; ++s) {
    bool allowed = s >= 2 && aug[static_cast<size_t>(s)] != blank &&
                   aug[static_cast<size_t>(s)] != aug[static_cast<size_t>(s - 2)];
    if (!allowed) skip_penalty[static_cast<size_t>(s)] = kLogZero;
  }
  Array skip_mask = Array::from({1, S}, std::move(skip_penalty));
  Array pad1 = Array::full({1, 1}, kLogZero);
  Array pad2 = Array::full({1, std::min<int64_t>(2, S)}, kLogZero);

  for (int64_t t = 1; t < T; ++t) {
    Array stay = alpha;
    Array step = S > 1 ? concat({pad1, slice(alpha, 1, 0, S - 1)}, 1) : pad1;
    Array skip = S > 2 ? add(concat({pad2, slice(alpha, 1, 0, S - 2)}, 1), skip_mask)
                       : add(pad2, skip_mask);
    Array merged = logsumexp(concat({stay, step, skip}, 0), 0);
    alpha = add(merged, slice(emission, 0, t, 1));
  }

  // p(y|x) ends in the final blank or the final label.
  Array tail = S > 1 ? slice(alpha, 1, S - 2, 2) : slice(alpha, 1, 0, 1);
  Array log_prob = logsumexp(tail, 1);
  return scale(sum(log_prob), -1.0);
}

LabelSeq greedy_decode(const PosteriorGrid& grid) {
  grid.validate();
  Path best;
  best.frames.reserve(static_cast<size_t>(grid.num_frames));
  for (int64_t t = 0; t < grid.num_frames; ++t) {
    int arg = 0;
    double best_p = grid.at(t, 0);
    for (int64_t k = 1; k < grid.num_classes; ++k) {
      if (grid.at(t, k) > best_p) {
        best_p = grid.at(t, k);
        arg = static_cast<int>(k);
      }
    }
    best.frames.push_back(arg);
  }
  return collapse(best, static_cast<int>(grid.num_classes));
}

namespace {

struct PrefixScore {
  double blank = kNegInf;     // mass of paths ending in blank
  double nonblank = kNegInf;  // mass of paths ending in the last label
  double total() const { return logaddexp(blank, nonblank); }
};

bool hyp_before(const std::pair<std::vector<int>, double>& a,
                const std::pair<std::vector<int>, double>& b) {
  if (a.second != b.second) return a.second > b.second;
  if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
  return a.first < b.first;
}

}  // namespace

std::vector<BeamHyp> beam_nbest(const PosteriorGrid& grid, int beam_width, int n) {
  grid.validate();
  if (n < 1 || beam_width < n)
    throw ConfigError("beam_nbest: need beam_width >= n >= 1");
  const int64_t T = grid.num_frames;
  const int64_t K = grid.num_classes;
  const int blank = grid.blank_id();

  // Ordered map keys keep expansion order deterministic.
  std::map<std::vector<int>, PrefixScore> beams;
  beams[{}].blank = 0.0;

  for (int64_t t = 0; t < T; ++t) {
    std::map<std::vector<int>, PrefixScore> next;
    for (const auto& [prefix, score] : beams) {
      for (int64_t k = 0; k < K; ++k) {
        double p = grid.at(t, k);
        double lp = p > 0.0 ? std::log(p) : kNegInf;
        if (lp == kNegInf) continue;
        if (k == blank) {
          PrefixScore& s = next[prefix];
          s.blank = logaddexp(s.blank, logaddexp(score.blank, score.nonblank) + lp);
        } else if (!prefix.empty() && prefix.back() == static_cast<int>(k)) {
          // Repeated label: same prefix without a separating blank...
          PrefixScore& same = next[prefix];
          same.nonblank = logaddexp(same.nonblank, score.nonblank + lp);
          // ...or a new occurrence after a blank.
          std::vector<int> ext = prefix;
          ext.push_back(static_cast<int>(k));
          PrefixScore& s = next[ext];
          s.nonblank = logaddexp(s.nonblank, score.blank + lp);
        } else {
          std::vector<int> ext = prefix;
          ext.push_back(static_cast<int>(k));
          PrefixScore& s = next[ext];
          s.nonblank = logaddexp(s.nonblank, logaddexp(score.blank, score.nonblank) + lp);
        }
      }
    }
    if (static_cast<int>(next.size()) > beam_width) {
      std::vector<std::pair<std::vector<int>, double>> ranked;
      ranked.reserve(next.size());
      for (const auto& [prefix, score] : next) ranked.emplace_back(prefix, score.total());
      std::sort(ranked.begin(), ranked.end(), hyp_before);
      std::map<std::vector<int>, PrefixScore> pruned;
      for (int i = 0; i < beam_width; ++i) pruned[ranked[static_cast<size_t>(i)].first] = next[ranked[static_cast<size_t>(i)].first];
      next = std::move(pruned);
    }
    beams = std::move(next);
  }

  std::vector<std::pair<std::vector<int>, double>> ranked;
  ranked.reserve(beams.size());
  for (const auto& [prefix, score] : beams) ranked.emplace_back(prefix, score.total());
  std::sort(ranked.begin(), ranked.end(), hyp_before);

  std::vector<BeamHyp> out;
  for (const auto& [prefix, lp] : ranked) {
    if (static_cast<int>(out.size()) >= n) break;
    if (lp == kNegInf) continue;
    BeamHyp h;
    h.seq.labels = prefix;
    h.seq.alphabet_size = static_cast<int>(K) - 1;
    h.log_prob = lp;
    out.push_back(std::move(h));
  }
  return out;
}

}  // namespace ctcd
