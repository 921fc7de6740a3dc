// src/ops.cc

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

#include "ctcd/ops.h"

#include <algorithm>
#include <cmath>
#include <memory>

namespace ctcd {

namespace {

using NodePtr = std::shared_ptr<ArrayNode>;

void check_finite(const char* op, const Array& out) {
  const auto& v = out.data();
  for (size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]))
      throw NumericError(std::string(op) + ": non-finite output at index " + std::to_string(i));
  }
}

bool taping(std::initializer_list<const Array*> inputs) {
  if (Tape::active() == nullptr) return false;
  for (const Array* a : inputs)
    if (a->requires_grad()) return true;
  return false;
}

// Output grads may be absent (no downstream influence); treat as zero.
bool no_out_grad(const NodePtr& out) { return out->grad.empty(); }

// Lane view along `axis` of a row-major array: `count` lanes, each of
// length `len`, elements `stride` apart starting at base(lane).
struct Lanes {
  int64_t count, len, stride, outer_step;
  int64_t base(int64_t lane) const {
    return (lane / (outer_step ? outer_step : 1)) * len * outer_step + (lane % (outer_step ? outer_step : 1));
  }
};

Lanes lanes_along(const Shape& s, int axis) {
  if (axis < 0 || axis >= s.rank())
    throw ConfigError("axis " + std::to_string(axis) + " out of range for " + s.str());
  int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= s.dim(i);
  for (int i = axis + 1; i < s.rank(); ++i) inner *= s.dim(i);
  Lanes l;
  l.len = s.dim(axis);
  l.count = outer * inner;
  l.stride = inner;
  l.outer_step = inner;
  return l;
}

Shape keepdims_shape(const Shape& s, int axis) {
  std::vector<int64_t> d;
  for (int i = 0; i < s.rank(); ++i) d.push_back(i == axis ? 1 : s.dim(i));
  return Shape::of(d);
}

Array make_output(Shape shape, std::vector<double> value) {
  return Array::from(shape, std::move(value), false);
}

void mark_recorded(Array& out) { out.set_requires_grad(true); }

}  // namespace

Array add(const Array& a, const Array& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  bool broadcast = false;
  if (sa != sb) {
    // Rank-1 b broadcast over trailing dim.
    if (sb.rank() == 1 && sa.rank() >= 2 && sa.dim(sa.rank() - 1) == sb.dim(0)) {
      broadcast = true;
    } else {
      throw ConfigError("add: shape mismatch " + sa.str() + " vs " + sb.str());
    }
  }
  std::vector<double> v(a.data());
  if (!broadcast) {
    const auto& bv = b.data();
    for (size_t i = 0; i < v.size(); ++i) v[i] += bv[i];
  } else {
    int64_t n = sb.dim(0);
    const auto& bv = b.data();
    for (size_t i = 0; i < v.size(); ++i) v[i] += bv[i % static_cast<size_t>(n)];
  }
  Array out = make_output(sa, std::move(v));
  check_finite("add", out);
  if (taping({&a, &b})) {
    mark_recorded(out);
    NodePtr an = a.node(), bn = b.node(), on = out.node();
    Tape::active()->record([an, bn, on, broadcast] {
      if (no_out_grad(on)) return;
      if (an->requires_grad) {
        an->ensure_grad();
        for (size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += on->grad[i];
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        if (!broadcast) {
          for (size_t i = 0; i < bn->grad.size(); ++i) bn->grad[i] += on->grad[i];
        } else {
          size_t n = bn->grad.size();
          for (size_t i = 0; i < on->grad.size(); ++i) bn->grad[i % n] += on->grad[i];
        }
      }
    });
  }
  return out;
}

Array mul(const Array& a, const Array& b) {
  if (a.shape() != b.shape())
    throw ConfigError("mul: shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  std::vector<double> v(a.data());
  const auto& bv = b.data();
  for (size_t i = 0; i < v.size(); ++i) v[i] *= bv[i];
  Array out = make_output(a.shape(), std::move(v));
  check_finite("mul", out);
  if (taping({&a, &b})) {
    mark_recorded(out);
    NodePtr an = a.node(), bn = b.node(), on = out.node();
    Tape::active()->record([an, bn, on] {
      if (no_out_grad(on)) return;
      if (an->requires_grad) {
        an->ensure_grad();
        for (size_t i = 0; i < an->grad.size(); ++i) an->grad[i] += on->grad[i] * bn->value[i];
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (size_t i = 0; i < bn->grad.size(); ++i) bn->grad[i] += on->grad[i] * an->value[i];
      }
    });
  }
  return out;
}

Array scale(const Array& x, double c) {
  std::vector<double> v(x.data());
  for (double& e : v) e *= c;
  Array out = make_output(x.shape(), std::move(v));
  check_finite("scale", out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on, c] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      for (size_t i = 0; i < xn->grad.size(); ++i) xn->grad[i] += c * on->grad[i];
    });
  }
  return out;
}

Array relu(const Array& x) {
  std::vector<double> v(x.data());
  for (double& e : v) e = e > 0.0 ? e : 0.0;
  Array out = make_output(x.shape(), std::move(v));
  check_finite("relu", out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      for (size_t i = 0; i < xn->grad.size(); ++i)
        if (xn->value[i] > 0.0) xn->grad[i] += on->grad[i];
    });
  }
  return out;
}

Array sigmoid(const Array& x) {
  std::vector<double> v(x.data());
  for (double& e : v) e = 1.0 / (1.0 + std::exp(-e));
  Array out = make_output(x.shape(), std::move(v));
  check_finite("sigmoid", out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      for (size_t i = 0; i < xn->grad.size(); ++i) {
        double y = on->value[i];
        xn->grad[i] += on->grad[i] * y * (1.0 - y);
      }
    });
  }
  return out;
}

Array tanh(const Array& x) {
  std::vector<double> v(x.data());
  for (double& e : v) e = std::tanh(e);
  Array out = make_output(x.shape(), std::move(v));
  check_finite("tanh", out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      for (size_t i = 0; i < xn->grad.size(); ++i) {
        double y = on->value[i];
        xn->grad[i] += on->grad[i] * (1.0 - y * y);
      }
    });
  }
  return out;
}

Array matmul(const Array& a, const Array& b) {
  if (a.shape().rank() != 2 || b.shape().rank() != 2 || a.shape().dim(1) != b.shape().dim(0))
    throw ConfigError("matmul: incompatible shapes " + a.shape().str() + " x " + b.shape().str());
  int64_t m = a.shape().dim(0), k = a.shape().dim(1), n = b.shape().dim(1);
  std::vector<double> v(static_cast<size_t>(m * n), 0.0);
  const auto& av = a.data();
  const auto& bv = b.data();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t p = 0; p < k; ++p) {
      double aip = av[static_cast<size_t>(i * k + p)];
      if (aip == 0.0) continue;
      for (int64_t j = 0; j < n; ++j)
        v[static_cast<size_t>(i * n + j)] += aip * bv[static_cast<size_t>(p * n + j)];
    }
  Array out = make_output({m, n}, std::move(v));
  check_finite("matmul", out);
  if (taping({&a, &b})) {
    mark_recorded(out);
    NodePtr an = a.node(), bn = b.node(), on = out.node();
    Tape::active()->record([an, bn, on, m, k, n] {
      if (no_out_grad(on)) return;
      if (an->requires_grad) {
        an->ensure_grad();
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n; ++j) {
            double g = on->grad[static_cast<size_t>(i * n + j)];
            if (g == 0.0) continue;
            for (int64_t p = 0; p < k; ++p)
              an->grad[static_cast<size_t>(i * k + p)] += g * bn->value[static_cast<size_t>(p * n + j)];
          }
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        for (int64_t i = 0; i < m; ++i)
          for (int64_t p = 0; p < k; ++p) {
            double av_ = an->value[static_cast<size_t>(i * k + p)];
            if (av_ == 0.0) continue;
            for (int64_t j = 0; j < n; ++j)
              bn->grad[static_cast<size_t>(p * n + j)] += av_ * on->grad[static_cast<size_t>(i * n + j)];
          }
      }
    });
  }
  return out;
}

Array conv1d(const Array& x, const Array& w) { return conv1d(x, w, Array()); }

Array conv1d(const Array& x, const Array& w, const Array& bias) {
  if (x.shape().rank() != 2 || w.shape().rank() != 3)
    throw ConfigError("conv1d: want x rank 2 and w rank 3, got " + x.shape().str() + " and " +
                      w.shape().str());
  int64_t T = x.shape().dim(0), cin = x.shape().dim(1);
  int64_t K = w.shape().dim(0), wcin = w.shape().dim(1), cout = w.shape().dim(2);
  if (wcin != cin) throw ConfigError("conv1d: channel mismatch: x has " + std::to_string(cin) +
                                     ", kernel expects " + std::to_string(wcin));
  if (K % 2 == 0) throw ConfigError("conv1d: kernel width must be odd for same padding");
  if (bias.valid() && (bias.shape().rank() != 1 || bias.shape().dim(0) != cout))
    throw ConfigError("conv1d: bias shape mismatch");
  int64_t pad = (K - 1) / 2;
  std::vector<double> v(static_cast<size_t>(T * cout), 0.0);
  const auto& xv = x.data();
  const auto& wv = w.data();
  for (int64_t t = 0; t < T; ++t)
    for (int64_t kk = 0; kk < K; ++kk) {
      int64_t s = t + kk - pad;
      if (s < 0 || s >= T) continue;
      for (int64_t c = 0; c < cin; ++c) {
        double xe = xv[static_cast<size_t>(s * cin + c)];
        if (xe == 0.0) continue;
        for (int64_t o = 0; o < cout; ++o)
          v[static_cast<size_t>(t * cout + o)] += xe * wv[static_cast<size_t>((kk * cin + c) * cout + o)];
      }
    }
  if (bias.valid()) {
    const auto& bv = bias.data();
    for (int64_t t = 0; t < T; ++t)
      for (int64_t o = 0; o < cout; ++o) v[static_cast<size_t>(t * cout + o)] += bv[static_cast<size_t>(o)];
  }
  Array out = make_output({T, cout}, std::move(v));
  check_finite("conv1d", out);
  bool tape = bias.valid() ? taping({&x, &w, &bias}) : taping({&x, &w});
  if (tape) {
    mark_recorded(out);
    NodePtr xn = x.node(), wn = w.node(), on = out.node();
    NodePtr bn = bias.valid() ? bias.node() : nullptr;
    Tape::active()->record([xn, wn, bn, on, T, cin, K, cout, pad] {
      if (no_out_grad(on)) return;
      if (xn->requires_grad) {
        xn->ensure_grad();
        for (int64_t t = 0; t < T; ++t)
          for (int64_t kk = 0; kk < K; ++kk) {
            int64_t s = t + kk - pad;
            if (s < 0 || s >= T) continue;
            for (int64_t o = 0; o < cout; ++o) {
              double g = on->grad[static_cast<size_t>(t * cout + o)];
              if (g == 0.0) continue;
              for (int64_t c = 0; c < cin; ++c)
                xn->grad[static_cast<size_t>(s * cin + c)] +=
                    g * wn->value[static_cast<size_t>((kk * cin + c) * cout + o)];
            }
          }
      }
      if (wn->requires_grad) {
        wn->ensure_grad();
        for (int64_t t = 0; t < T; ++t)
          for (int64_t kk = 0; kk < K; ++kk) {
            int64_t s = t + kk - pad;
            if (s < 0 || s >= T) continue;
            for (int64_t c = 0; c < cin; ++c) {
              double xe = xn->value[static_cast<size_t>(s * cin + c)];
              if (xe == 0.0) continue;
              for (int64_t o = 0; o < cout; ++o)
                wn->grad[static_cast<size_t>((kk * cin + c) * cout + o)] +=
                    xe * on->grad[static_cast<size_t>(t * cout + o)];
            }
          }
      }
      if (bn && bn->requires_grad) {
        bn->ensure_grad();
        for (int64_t t = 0; t < T; ++t)
          for (int64_t o = 0; o < cout; ++o)
            bn->grad[static_cast<size_t>(o)] += on->grad[static_cast<size_t>(t * cout + o)];
      }
    });
  }
  return out;
}

namespace {

enum class NormKind { kSoftmax, kLogSoftmax, kLogSumExp };

Array normalize_op(const Array& x, int axis, NormKind kind, const char* name) {
  Lanes l = lanes_along(x.shape(), axis);
  if (l.len < 1) throw ConfigError(std::string(name) + ": axis length must be >= 1");
  Shape out_shape = (kind == NormKind::kLogSumExp) ? keepdims_shape(x.shape(), axis) : x.shape();
  std::vector<double> v(static_cast<size_t>(out_shape.numel()), 0.0);
  const auto& xv = x.data();
  for (int64_t lane = 0; lane < l.count; ++lane) {
    int64_t base = l.base(lane);
    double m = -std::numeric_limits<double>::infinity();
    for (int64_t i = 0; i < l.len; ++i) m = std::max(m, xv[static_cast<size_t>(base + i * l.stride)]);
    double s = 0.0;
    for (int64_t i = 0; i < l.len; ++i) s += std::exp(xv[static_cast<size_t>(base + i * l.stride)] - m);
    double lse = m + std::log(s);
    switch (kind) {
      case NormKind::kSoftmax:
        for (int64_t i = 0; i < l.len; ++i) {
          size_t idx = static_cast<size_t>(base + i * l.stride);
          v[idx] = std::exp(xv[idx] - m) / s;
        }
        break;
      case NormKind::kLogSoftmax:
        for (int64_t i = 0; i < l.len; ++i) {
          size_t idx = static_cast<size_t>(base + i * l.stride);
          v[idx] = xv[idx] - lse;
        }
        break;
      case NormKind::kLogSumExp:
        v[static_cast<size_t>(lane)] = lse;
        break;
    }
  }
  Array out = make_output(out_shape, std::move(v));
  check_finite(name, out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on, l, kind] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      for (int64_t lane = 0; lane < l.count; ++lane) {
        int64_t base = l.base(lane);
        switch (kind) {
          case NormKind::kSoftmax: {
            double dot = 0.0;
            for (int64_t i = 0; i < l.len; ++i) {
              size_t idx = static_cast<size_t>(base + i * l.stride);
              dot += on->grad[idx] * on->value[idx];
            }
            for (int64_t i = 0; i < l.len; ++i) {
              size_t idx = static_cast<size_t>(base + i * l.stride);
              xn->grad[idx] += on->value[idx] * (on->grad[idx] - dot);
            }
            break;
          }
          case NormKind::kLogSoftmax: {
            double gsum = 0.0;
            for (int64_t i = 0; i < l.len; ++i)
              gsum += on->grad[static_cast<size_t>(base + i * l.stride)];
            for (int64_t i = 0; i < l.len; ++i) {
              size_t idx = static_cast<size_t>(base + i * l.stride);
              xn->grad[idx] += on->grad[idx] - std::exp(on->value[idx]) * gsum;
            }
            break;
          }
          case NormKind::kLogSumExp: {
            double g = on->grad[static_cast<size_t>(lane)];
            if (g == 0.0) break;
            double lse = on->value[static_cast<size_t>(lane)];
            for (int64_t i = 0; i < l.len; ++i) {
              size_t idx = static_cast<size_t>(base + i * l.stride);
              xn->grad[idx] += g * std::exp(xn->value[idx] - lse);
            }
            break;
          }
        }
      }
    });
  }
  return out;
}

}  // namespace

Array softmax(const Array& x, int axis) { return normalize_op(x, axis, NormKind::kSoftmax, "softmax"); }

Array log_softmax(const Array& x, int axis) {
  return normalize_op(x, axis, NormKind::kLogSoftmax, "log_softmax");
}

Array logsumexp(const Array& x, int axis) {
  return normalize_op(x, axis, NormKind::kLogSumExp, "logsumexp");
}

namespace {

Array reduce_all(const Array& x, bool is_mean, const char* name) {
  double s = 0.0;
  for (double e : x.data()) s += e;
  double denom = is_mean ? static_cast<double>(x.numel()) : 1.0;
  Array out = make_output({1}, {s / denom});
  check_finite(name, out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on, denom] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      double g = on->grad[0] / denom;
      for (double& e : xn->grad) e += g;
    });
  }
  return out;
}

Array reduce_axis(const Array& x, int axis, bool is_mean, const char* name) {
  Lanes l = lanes_along(x.shape(), axis);
  double denom = is_mean ? static_cast<double>(l.len) : 1.0;
  std::vector<double> v(static_cast<size_t>(l.count), 0.0);
  const auto& xv = x.data();
  for (int64_t lane = 0; lane < l.count; ++lane) {
    int64_t base = l.base(lane);
    double s = 0.0;
    for (int64_t i = 0; i < l.len; ++i) s += xv[static_cast<size_t>(base + i * l.stride)];
    v[static_cast<size_t>(lane)] = s / denom;
  }
  Array out = make_output(keepdims_shape(x.shape(), axis), std::move(v));
  check_finite(name, out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on, l, denom] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      for (int64_t lane = 0; lane < l.count; ++lane) {
        double g = on->grad[static_cast<size_t>(lane)] / denom;
        if (g == 0.0) continue;
        int64_t base = l.base(lane);
        for (int64_t i = 0; i < l.len; ++i) xn->grad[static_cast<size_t>(base + i * l.stride)] += g;
      }
    });
  }
  return out;
}

}  // namespace

Array sum(const Array& x) { return reduce_all(x, false, "sum"); }
Array sum(const Array& x, int axis) { return reduce_axis(x, axis, false, "sum"); }
Array mean(const Array& x) { return reduce_all(x, true, "mean"); }
Array mean(const Array& x, int axis) { return reduce_axis(x, axis, true, "mean"); }

Array concat(const std::vector<Array>& parts, int axis) {
  if (parts.empty()) throw ConfigError("concat: no inputs");
  const Shape& s0 = parts[0].shape();
  if (axis < 0 || axis >= s0.rank()) throw ConfigError("concat: axis out of range");
  int64_t total = 0;
  for (const Array& p : parts) {
    const Shape& s = p.shape();
    if (s.rank() != s0.rank()) throw ConfigError("concat: rank mismatch");
    for (int i = 0; i < s.rank(); ++i)
      if (i != axis && s.dim(i) != s0.dim(i))
        throw ConfigError("concat: shape mismatch " + s.str() + " vs " + s0.str());
    total += s.dim(axis);
  }
  std::vector<int64_t> od;
  for (int i = 0; i < s0.rank(); ++i) od.push_back(i == axis ? total : s0.dim(i));
  Shape out_shape = Shape::of(od);
  std::vector<double> v(static_cast<size_t>(out_shape.numel()), 0.0);
  Lanes ol = lanes_along(out_shape, axis);
  int64_t offset = 0;
  for (const Array& p : parts) {
    Lanes pl = lanes_along(p.shape(), axis);
    const auto& pv = p.data();
    for (int64_t lane = 0; lane < pl.count; ++lane) {
      int64_t pb = pl.base(lane), ob = ol.base(lane);
      for (int64_t i = 0; i < pl.len; ++i)
        v[static_cast<size_t>(ob + (offset + i) * ol.stride)] = pv[static_cast<size_t>(pb + i * pl.stride)];
    }
    offset += p.shape().dim(axis);
  }
  Array out = make_output(out_shape, std::move(v));
  check_finite("concat", out);
  bool want = false;
  if (Tape::active())
    for (const Array& p : parts) want = want || p.requires_grad();
  if (want) {
    mark_recorded(out);
    std::vector<NodePtr> pn;
    std::vector<int64_t> sizes;
    for (const Array& p : parts) {
      pn.push_back(p.node());
      sizes.push_back(p.shape().dim(axis));
    }
    NodePtr on = out.node();
    Tape::active()->record([pn, sizes, on, ol, axis] {
      if (no_out_grad(on)) return;
      int64_t offset = 0;
      for (size_t k = 0; k < pn.size(); ++k) {
        int64_t len = sizes[k];
        if (pn[k]->requires_grad) {
          pn[k]->ensure_grad();
          Lanes pl = lanes_along(pn[k]->shape, axis);
          for (int64_t lane = 0; lane < pl.count; ++lane) {
            int64_t pb = pl.base(lane), ob = ol.base(lane);
            for (int64_t i = 0; i < len; ++i)
              pn[k]->grad[static_cast<size_t>(pb + i * pl.stride)] +=
                  on->grad[static_cast<size_t>(ob + (offset + i) * ol.stride)];
          }
        }
        offset += len;
      }
    });
  }
  return out;
}

Array slice(const Array& x, int axis, int64_t start, int64_t len) {
  const Shape& s = x.shape();
  if (axis < 0 || axis >= s.rank()) throw ConfigError("slice: axis out of range");
  if (start < 0 || len < 0 || start + len > s.dim(axis))
    throw ConfigError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + len) +
                      ") out of bounds for dim " + std::to_string(s.dim(axis)));
  std::vector<int64_t> od;
  for (int i = 0; i < s.rank(); ++i) od.push_back(i == axis ? len : s.dim(i));
  Shape out_shape = Shape::of(od);
  Lanes xl = lanes_along(s, axis);
  Lanes ol = lanes_along(out_shape, axis);
  std::vector<double> v(static_cast<size_t>(out_shape.numel()), 0.0);
  const auto& xv = x.data();
  for (int64_t lane = 0; lane < xl.count; ++lane) {
    int64_t xb = xl.base(lane), ob = ol.base(lane);
    for (int64_t i = 0; i < len; ++i)
      v[static_cast<size_t>(ob + i * ol.stride)] = xv[static_cast<size_t>(xb + (start + i) * xl.stride)];
  }
  Array out = make_output(out_shape, std::move(v));
  check_finite("slice", out);
  if (taping({&x})) {
    mark_recorded(out);
    NodePtr xn = x.node(), on = out.node();
    Tape::active()->record([xn, on, xl, ol, start, len] {
      if (no_out_grad(on) || !xn->requires_grad) return;
      xn->ensure_grad();
      for (int64_t lane = 0; lane < xl.count; ++lane) {
        int64_t xb = xl.base(lane), ob = ol.base(lane);
        for (int64_t i = 0; i < len; ++i)
          xn->grad[static_cast<size_t>(xb + (start + i) * xl.stride)] +=
              on->grad[static_cast<size_t>(ob + i * ol.stride)];
      }
    });
  }
  return out;
}

Array sub(const Array& a, const Array& b) { return add(a, scale(b, -1.0)); }

Array square(const Array& x) { return mul(x, x); }

Array shift(const Array& x, double c) { return add(x, Array::full(x.shape(), c)); }

Array clamp_min(const Array& x, double c) { return shift(relu(shift(x, -c)), c); }

}  // namespace ctcd
