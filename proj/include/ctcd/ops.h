// include/ctcd/ops.h

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

#ifndef CTCD_OPS_H_
#define CTCD_OPS_H_

#include <vector>

#include "ctcd/dense_array.h"

namespace ctcd {

// The primitive set. Every op checks shapes (ConfigError on mismatch),
// verifies the output is finite (NumericError naming the op and index),
// and records its backward step on the active tape when any input
// requires a gradient.

// Elementwise. add() also accepts a rank-1 b broadcast over the trailing
// dim of a (bias addition); its gradient sums over the leading dims.
Array add(const Array& a, const Array& b);
Array mul(const Array& a, const Array& b);
Array scale(const Array& x, double c);

Array relu(const Array& x);
Array sigmoid(const Array& x);
Array tanh(const Array& x);

// [m,k] x [k,n] -> [m,n].
Array matmul(const Array& a, const Array& b);

// x [T,Cin], w [K,Cin,Cout] with K odd; stride 1, zero same-padding, so T is
// preserved. Optional bias [Cout].
Array conv1d(const Array& x, const Array& w);
Array conv1d(const Array& x, const Array& w, const Array& bias);

// Normalizations along one axis.
Array softmax(const Array& x, int axis);
Array log_softmax(const Array& x, int axis);
Array logsumexp(const Array& x, int axis);  // keeps the axis as size 1

// Reductions. The no-axis forms reduce everything to shape [1]; the axis
// forms keep the reduced axis as size 1.
Array sum(const Array& x);
Array sum(const Array& x, int axis);
Array mean(const Array& x);
Array mean(const Array& x, int axis);

Array concat(const std::vector<Array>& parts, int axis);
Array slice(const Array& x, int axis, int64_t start, int64_t len);

// Composites built from the primitives above.
Array sub(const Array& a, const Array& b);
Array square(const Array& x);
Array shift(const Array& x, double c);      // x + c
Array clamp_min(const Array& x, double c);  // max(x, c) == relu(x - c) + c

}  // namespace ctcd

#endif  // CTCD_OPS_H_
