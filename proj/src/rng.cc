// src/rng.cc

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

#include "ctcd/rng.h"

#include <cmath>

#include "ctcd/error.h"

namespace ctcd {

namespace {
constexpr uint64_t kMultiplier = 6364136223846793005ULL;
constexpr double kInv32 = 1.0 / 4294967296.0;  // 2^-32
}  // namespace

Rng::Rng(uint64_t seed, uint64_t stream) : seed_(seed) {
  // O'Neill's seeding sequence: it decorrelates nearby seeds.
  state_ = 0u;
  inc_ = (stream << 1u) | 1u;
  next_u32();
  state_ += seed;
  next_u32();
}

uint32_t Rng::next_u32() {
  uint64_t oldstate = state_;
  state_ = oldstate * kMultiplier + inc_;
  uint32_t xorshifted = static_cast<uint32_t>(((oldstate >> 18u) ^ oldstate) >> 27u);
  uint32_t rot = static_cast<uint32_t>(oldstate >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((~rot + 1u) & 31u));
}

double Rng::uniform() { return next_u32() * kInv32; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int64_t Rng::uniform_int(int64_t n) {
  if (n < 1) throw UsageError("uniform_int: n must be >= 1");
  return static_cast<int64_t>(next_u32() % static_cast<uint64_t>(n));
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Two uniforms in (0, 1]; u1 feeds the log.
  double u1 = (static_cast<double>(next_u32()) + 1.0) * kInv32;
  double u2 = (static_cast<double>(next_u32()) + 1.0) * kInv32;
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace ctcd
