// src/synthdata.cc

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

#include "ctcd/synthdata.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ctcd {

void TaskSpec::validate() const {
  if (alphabet_size < 1) throw ConfigError("TaskSpec: alphabet_size must be >= 1");
  if (space_id < 0 || space_id >= alphabet_size)
    throw ConfigError("TaskSpec: space_id outside alphabet");
  if (feature_dim < 1) throw ConfigError("TaskSpec: feature_dim must be >= 1");
  if (static_cast<int64_t>(templates.size()) !=
      static_cast<int64_t>(alphabet_size) * feature_dim)
    throw ConfigError("TaskSpec: template matrix must be |Y| x feature_dim");
  if (min_duration < 1 || max_duration < min_duration)
    throw ConfigError("TaskSpec: need 1 <= min_duration <= max_duration");
  if (noise_sigma < 0.0) throw ConfigError("TaskSpec: noise_sigma must be >= 0");
  if (silence_prob < 0.0 || silence_prob > 1.0)
    throw ConfigError("TaskSpec: silence_prob must be in [0, 1]");
  if (min_utt_len < 1 || max_utt_len < min_utt_len)
    throw ConfigError("TaskSpec: need 1 <= min_utt_len <= max_utt_len");
  for (int a = 0; a < alphabet_size; ++a)
    for (int b = a + 1; b < alphabet_size; ++b) {
      bool same = true;
      for (int d = 0; d < feature_dim && same; ++d)
        same = templates[static_cast<size_t>(a * feature_dim + d)] ==
               templates[static_cast<size_t>(b * feature_dim + d)];
      if (same)
        throw ConfigError("TaskSpec: templates " + std::to_string(a) + " and " +
                          std::to_string(b) + " coincide");
    }
}

std::vector<double> TaskSpec::default_templates(int alphabet_size, int feature_dim,
                                                uint64_t template_seed) {
  Rng rng(template_seed);
  std::vector<double> t(static_cast<size_t>(alphabet_size) * static_cast<size_t>(feature_dim));
  for (double& e : t) e = rng.uniform(-1.0, 1.0);
  return t;
}

Dataset generate(const TaskSpec& spec, int count) {
  spec.validate();
  if (count < 0) throw ConfigError("generate: count must be >= 0");
  Rng rng(spec.seed);
  Dataset ds;
  ds.alphabet_size = spec.alphabet_size;
  ds.feature_dim = spec.feature_dim;
  ds.utterances.reserve(static_cast<size_t>(count));

  const int D = spec.feature_dim;
  for (int u = 0; u < count; ++u) {
    int len = static_cast<int>(
        rng.uniform_int(spec.max_utt_len - spec.min_utt_len + 1) + spec.min_utt_len);
    // Segments: label id, or -1 for silence.
    std::vector<std::pair<int, int>> segments;  // (symbol, duration)
    int prev = -2;
    for (int s = 0; s < len; ++s) {
      if (spec.silence_prob > 0.0 && rng.uniform() < spec.silence_prob) {
        int sd = static_cast<int>(
            rng.uniform_int(spec.max_duration - spec.min_duration + 1) + spec.min_duration);
        segments.emplace_back(-1, sd);
        prev = -1;
      }
      int label = static_cast<int>(rng.uniform_int(spec.alphabet_size));
      int dur = static_cast<int>(
          rng.uniform_int(spec.max_duration - spec.min_duration + 1) + spec.min_duration);
      // A repeated label directly after itself needs a blank separator
      // frame somewhere; two frames always leave room for one.
      if (label == prev && dur < 2) dur = 2;
      segments.emplace_back(label, dur);
      prev = label;
    }
    if (spec.silence_prob > 0.0 && rng.uniform() < spec.silence_prob) {
      int sd = static_cast<int>(
          rng.uniform_int(spec.max_duration - spec.min_duration + 1) + spec.min_duration);
      segments.emplace_back(-1, sd);
    }

    int64_t T = 0;
    for (const auto& [sym, dur] : segments) T += dur;
    std::vector<double> feats(static_cast<size_t>(T) * static_cast<size_t>(D), 0.0);
    LabelSeq labels;
    labels.alphabet_size = spec.alphabet_size;
    int64_t t = 0;
    for (const auto& [sym, dur] : segments) {
      if (sym >= 0) labels.labels.push_back(sym);
      for (int f = 0; f < dur; ++f, ++t)
        for (int d = 0; d < D; ++d) {
          double base = sym >= 0 ? spec.templates[static_cast<size_t>(sym * D + d)] : 0.0;
          double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
          feats[static_cast<size_t>(t * D + d)] = base + noise;
        }
    }

    Utterance utt;
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "utt%06d", u);
    utt.id = idbuf;
    utt.features = Array::from({T, D}, std::move(feats));
    utt.labels = std::move(labels);
    if (T < min_expressible_frames(utt.labels))
      throw ConfigError("generate: produced an inexpressible utterance (internal bug)");
    ds.utterances.push_back(std::move(utt));
  }
  return ds;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw FormatError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void write_dataset(const Dataset& ds, const std::string& path) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp);
    if (!os) throw IoError("cannot open " + tmp.string() + " for writing");
    os << "CTCD1 " << ds.alphabet_size << " " << ds.feature_dim << "\n";
    for (const Utterance& u : ds.utterances) {
      os << u.id << "\n";
      os << u.labels.labels.size();
      for (int l : u.labels.labels) os << " " << l;
      os << "\n";
      int64_t T = u.features.shape().dim(0);
      int64_t D = u.features.shape().dim(1);
      os << T << "\n";
      const auto& v = u.features.data();
      for (int64_t t = 0; t < T; ++t) {
        for (int64_t d = 0; d < D; ++d)
          os << (d ? " " : "") << format_double(v[static_cast<size_t>(t * D + d)]);
        os << "\n";
      }
      os << "\n";
    }
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open dataset " + path);
  int lineno = 0;
  std::string line;
  auto next_line = [&](const std::string& what) {
    if (!std::getline(is, line)) parse_fail(path, lineno + 1, "unexpected end of file, expected " + what);
    ++lineno;
    return line;
  };

  Dataset ds;
  {
    std::istringstream hs(next_line("header"));
    std::string magic;
    hs >> magic >> ds.alphabet_size >> ds.feature_dim;
    if (magic != "CTCD1" || hs.fail() || ds.alphabet_size < 1 || ds.feature_dim < 1)
      parse_fail(path, lineno, "malformed header (want 'CTCD1 |Y| D_in')");
  }

  while (true) {
    std::string id;
    // Skip the blank separator before the next record, tolerate EOF.
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty()) {
        id = line;
        break;
      }
    }
    if (id.empty()) break;

    Utterance u;
    u.id = id;
    {
      std::istringstream ls(next_line("label line of " + std::string(u.id)));
      int64_t n = -1;
      ls >> n;
      if (ls.fail() || n < 0) parse_fail(path, lineno, "bad label count in record " + u.id);
      u.labels.alphabet_size = ds.alphabet_size;
      for (int64_t i = 0; i < n; ++i) {
        int l;
        ls >> l;
        if (ls.fail() || l < 0 || l >= ds.alphabet_size)
          parse_fail(path, lineno, "bad label in record " + u.id);
        u.labels.labels.push_back(l);
      }
    }
    int64_t T = -1;
    {
      std::istringstream ts(next_line("frame count of " + std::string(u.id)));
      ts >> T;
      if (ts.fail() || T < 0) parse_fail(path, lineno, "bad frame count in record " + u.id);
    }
    std::vector<double> feats(static_cast<size_t>(T) * static_cast<size_t>(ds.feature_dim));
    for (int64_t t = 0; t < T; ++t) {
      const std::string& row = next_line("feature row of " + std::string(u.id));
      const char* p = row.data();
      const char* end = row.data() + row.size();
      for (int64_t d = 0; d < ds.feature_dim; ++d) {
        while (p < end && *p == ' ') ++p;
        double v;
        auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc() || !std::isfinite(v))
          parse_fail(path, lineno, "bad feature value in record " + u.id);
        feats[static_cast<size_t>(t * ds.feature_dim + d)] = v;
        p = res.ptr;
      }
      while (p < end && *p == ' ') ++p;
      if (p != end) parse_fail(path, lineno, "trailing characters in feature row of " + u.id);
    }
    u.features = Array::from({T, static_cast<int64_t>(ds.feature_dim)}, std::move(feats));
    ds.utterances.push_back(std::move(u));
  }
  return ds;
}

}  // namespace ctcd
