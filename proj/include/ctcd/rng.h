// include/ctcd/rng.h

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

#ifndef CTCD_RNG_H_
#define CTCD_RNG_H_

#include <cstdint>

namespace ctcd {

// PCG32 (XSH-RR output, 64-bit LCG state, 64-bit stream) with Box-Muller
// Gaussians layered on top. The exact draw sequence is part of the contract:
// identical seeds must give bit-identical datasets and parameter inits across
// runs and across language ports.
//
//   uniform()      = next_u32() * 2^-32              in [0, 1)
//   normal() pairs consume exactly two uniforms, each mapped to (0, 1] via
//   (next_u32() + 1) * 2^-32 so log() never sees zero.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = kDefaultStream);

  uint32_t next_u32();
  // Uniform draw in [0, 1), 32 bits of resolution.
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n), n >= 1. Plain modulo; the tiny bias is
  // irrelevant at this scale and keeps the stream portable.
  int64_t uniform_int(int64_t n);
  // Standard Gaussian via Box-Muller; second value of each pair is cached.
  double normal();

  uint64_t seed() const { return seed_; }

  static constexpr uint64_t kDefaultStream = 0xda3e39cb94b95bdbULL;

 private:
  uint64_t state_;
  uint64_t inc_;
  uint64_t seed_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ctcd

#endif  // CTCD_RNG_H_
