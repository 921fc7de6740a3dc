// include/ctcd/checkpoint.h

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

#ifndef CTCD_CHECKPOINT_H_
#define CTCD_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ctcd/encoder.h"

namespace ctcd {

// Serialized encoder. Binary little-endian layout (see docs/formats.md):
// magic "CTCDCKPT", u32 version, encoder spec block, u32 stage, u32 epoch,
// u64 seed, u32 param count, then length-prefixed (name, shape, raw f64
// data) triples. Round-trips bit-exactly.
struct Checkpoint {
  uint32_t format_version = 1;
  EncoderSpec spec;
  std::vector<NamedParam> params;
  uint32_t stage = 0;
  uint32_t epoch = 0;
  uint64_t seed = 0;
};

// Writes atomically (temp file + rename).
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

Checkpoint checkpoint_of(const Encoder& enc, uint32_t stage, uint32_t epoch, uint64_t seed);
Encoder encoder_from_checkpoint(const Checkpoint& ckpt, bool trainable);

}  // namespace ctcd

#endif  // CTCD_CHECKPOINT_H_
