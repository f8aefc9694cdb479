// Copyright 2026 The nnUZoo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "internal.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo {

namespace detail {

namespace {

std::vector<std::int64_t> enumerate_offsets(const Shape& shape, const Shape& strides,
                                            const std::vector<int>& axes) {
  std::int64_t count = 1;
  for (int a : axes) count *= shape[a];
  std::vector<std::int64_t> offs(static_cast<std::size_t>(count));
  std::vector<std::int64_t> idx(axes.size(), 0);
  std::int64_t off = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    offs[i] = off;
    for (int d = static_cast<int>(axes.size()) - 1; d >= 0; --d) {
      const int ax = axes[d];
      if (++idx[d] < shape[ax]) {
        off += strides[ax];
        break;
      }
      off -= strides[ax] * (shape[ax] - 1);
      idx[d] = 0;
    }
  }
  return offs;
}

}  // namespace

ReducePlan make_reduce_plan(const Shape& shape, const std::vector<int>& axes_in) {
  const int r = static_cast<int>(shape.size());
  std::set<int> red;
  if (axes_in.empty()) {
    for (int i = 0; i < r; ++i) red.insert(i);
  } else {
    for (int a : axes_in) red.insert(normalize_axis("reduce", a, r));
  }
  std::vector<int> kept, reduced;
  ReducePlan plan;
  for (int i = 0; i < r; ++i) {
    if (red.count(i)) {
      reduced.push_back(i);
      plan.keep_shape.push_back(1);
    } else {
      kept.push_back(i);
      plan.keep_shape.push_back(shape[i]);
      plan.out_shape.push_back(shape[i]);
    }
  }
  const auto strides = contiguous_strides(shape);
  plan.outer = enumerate_offsets(shape, strides, kept);
  plan.inner = enumerate_offsets(shape, strides, reduced);
  return plan;
}

}  // namespace detail

namespace ops {

using detail::maybe_record;
using detail::normalize_axis;

Tensor sum(const Tensor& x, std::vector<int> axes, bool keepdim) {
  detail::require_defined("sum", x);
  const auto plan = detail::make_reduce_plan(x.shape(), axes);
  Tensor out = Tensor::zeros(keepdim ? plan.keep_shape : plan.out_shape, x.dtype());
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    for (std::size_t i = 0; i < plan.outer.size(); ++i) {
      T acc = 0;
      const T* base = px + plan.outer[i];
      for (auto off : plan.inner) acc += base[off];
      po[i] = acc;
    }
  });
  maybe_record("sum", {x}, out, [&] {
    return [shape = x.shape(), keep = plan.keep_shape](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{detail::expand_to(reshape(g, keep), shape)};
    };
  });
  return out;
}

Tensor mean(const Tensor& x, std::vector<int> axes, bool keepdim) {
  const auto plan = detail::make_reduce_plan(x.shape(), axes);
  const auto count = static_cast<double>(plan.inner.size());
  return mul_scalar(sum(x, axes, keepdim), 1.0 / count);
}

namespace {

template <bool Log>
Tensor softmax_impl(const char* op, const Tensor& x, int axis) {
  detail::require_defined(op, x);
  const int a = normalize_axis(op, axis, x.rank());
  const auto plan = detail::make_reduce_plan(x.shape(), {a});
  Tensor out = Tensor::zeros(x.shape(), x.dtype());
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    for (auto base : plan.outer) {
      T mx = -std::numeric_limits<T>::infinity();
      for (auto off : plan.inner) mx = std::max(mx, px[base + off]);
      T total = 0;
      for (auto off : plan.inner) total += std::exp(px[base + off] - mx);
      if constexpr (Log) {
        const T lse = mx + std::log(total);
        for (auto off : plan.inner) po[base + off] = px[base + off] - lse;
      } else {
        for (auto off : plan.inner) po[base + off] = std::exp(px[base + off] - mx) / total;
      }
    }
  });
  maybe_record(op, {x}, out, [&] {
    return [out, plan](const Tensor& g, const std::vector<bool>&) {
      Tensor gx = Tensor::zeros(out.shape(), out.dtype());
      dispatch(out.dtype(), [&]<class T>() {
        const T* py = out.data<T>().data();
        const T* pg = g.data<T>().data();
        T* pr = gx.mutable_data<T>().data();
        for (auto base : plan.outer) {
          if constexpr (Log) {
            T gs = 0;
            for (auto off : plan.inner) gs += pg[base + off];
            for (auto off : plan.inner) pr[base + off] = pg[base + off] - std::exp(py[base + off]) * gs;
          } else {
            T dot = 0;
            for (auto off : plan.inner) dot += pg[base + off] * py[base + off];
            for (auto off : plan.inner) pr[base + off] = py[base + off] * (pg[base + off] - dot);
          }
        }
      });
      return std::vector<Tensor>{gx};
    };
  });
  return out;
}

}  // namespace

Tensor softmax(const Tensor& x, int axis) { return softmax_impl<false>("softmax", x, axis); }

Tensor log_softmax(const Tensor& x, int axis) { return softmax_impl<true>("log_softmax", x, axis); }

Tensor concat(std::initializer_list<Tensor> xs, int axis) {
  std::vector<Tensor> v(xs);
  return concat(std::span<const Tensor>(v), axis);
}

Tensor concat(std::span<const Tensor> xs, int axis) {
  if (xs.empty()) throw ValueError("concat: no inputs");
  const Tensor& first = xs.front();
  const int r = first.rank();
  const int a = normalize_axis("concat", axis, r);
  Shape out_shape = first.shape();
  out_shape[a] = 0;
  for (const auto& t : xs) {
    detail::require_defined("concat", t);
    detail::require_same_dtype("concat", first, t);
    if (t.rank() != r) throw ShapeError("concat: rank mismatch " + shape_str(t.shape()));
    for (int d = 0; d < r; ++d)
      if (d != a && t.dim(d) != first.dim(d))
        throw ShapeError("concat: shape mismatch " + shape_str(first.shape()) + " vs " +
                         shape_str(t.shape()) + " along axis " + std::to_string(d));
    out_shape[a] += t.dim(a);
  }
  Tensor out = Tensor::zeros(out_shape, first.dtype());
  std::int64_t outer = 1;
  for (int d = 0; d < a; ++d) outer *= out_shape[d];
  const std::int64_t out_row = shape_numel(out_shape) / std::max<std::int64_t>(outer, 1);
  std::vector<std::int64_t> widths;
  dispatch(first.dtype(), [&]<class T>() {
    T* po = out.mutable_data<T>().data();
    std::int64_t col = 0;
    for (const auto& t : xs) {
      const std::int64_t w = outer == 0 ? 0 : t.numel() / outer;
      widths.push_back(t.dim(a));
      const T* pt = t.data<T>().data();
      for (std::int64_t o = 0; o < outer; ++o) std::copy(pt + o * w, pt + (o + 1) * w, po + o * out_row + col);
      col += w;
    }
  });
  std::vector<Tensor> inputs(xs.begin(), xs.end());
  detail::maybe_record_list("concat", inputs, out, [&] {
    return [a, widths](const Tensor& g, const std::vector<bool>& needs) {
      std::vector<Tensor> grads(widths.size());
      std::int64_t start = 0;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        if (needs[i]) grads[i] = slice(g, a, start, start + widths[i]);
        start += widths[i];
      }
      return grads;
    };
  });
  return out;
}

Tensor slice(const Tensor& x, int axis, std::int64_t start, std::int64_t stop) {
  detail::require_defined("slice", x);
  const int a = normalize_axis("slice", axis, x.rank());
  const std::int64_t n = x.dim(a);
  if (start < 0 || stop > n || start > stop)
    throw ShapeError("slice: range [" + std::to_string(start) + "," + std::to_string(stop) +
                     ") invalid for axis of size " + std::to_string(n));
  Shape out_shape = x.shape();
  out_shape[a] = stop - start;
  Tensor out = Tensor::zeros(out_shape, x.dtype());
  std::int64_t outer = 1, inner = 1;
  for (int d = 0; d < a; ++d) outer *= x.dim(d);
  for (int d = a + 1; d < x.rank(); ++d) inner *= x.dim(d);
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    const std::int64_t len = (stop - start) * inner;
    for (std::int64_t o = 0; o < outer; ++o)
      std::copy(px + (o * n + start) * inner, px + (o * n + start) * inner + len, po + o * len);
  });
  maybe_record("slice", {x}, out, [&] {
    return [a, start, stop, n, r = x.rank()](const Tensor& g, const std::vector<bool>&) {
      std::vector<std::pair<std::int64_t, std::int64_t>> pads(r, {0, 0});
      pads[a] = {start, n - stop};
      return std::vector<Tensor>{pad(g, pads, 0.0)};
    };
  });
  return out;
}

Tensor reshape(const Tensor& x, Shape shape) {
  detail::require_defined("reshape", x);
  int infer = -1;
  std::int64_t known = 1;
  for (int i = 0; i < static_cast<int>(shape.size()); ++i) {
    if (shape[i] == -1) {
      if (infer >= 0) throw ShapeError("reshape: more than one inferred dimension");
      infer = i;
    } else {
      known *= shape[i];
    }
  }
  if (infer >= 0) {
    if (known == 0 || x.numel() % known != 0)
      throw ShapeError("reshape: cannot infer dimension for " + shape_str(x.shape()) + " -> " +
                       shape_str(shape));
    shape[infer] = x.numel() / known;
  }
  if (shape_numel(shape) != x.numel())
    throw ShapeError("reshape: element count differs, " + shape_str(x.shape()) + " -> " + shape_str(shape));
  Tensor out = x.detach();
  out.impl()->shape = shape;
  maybe_record("reshape", {x}, out, [&] {
    return [orig = x.shape()](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{reshape(g, orig)};
    };
  });
  return out;
}

Tensor permute(const Tensor& x, std::vector<int> order) {
  detail::require_defined("permute", x);
  const int r = x.rank();
  if (static_cast<int>(order.size()) != r) throw ShapeError("permute: order length != rank");
  std::vector<bool> seen(r, false);
  for (auto& o : order) {
    o = normalize_axis("permute", o, r);
    if (seen[o]) throw ShapeError("permute: repeated axis");
    seen[o] = true;
  }
  Shape out_shape(r);
  const auto in_strides = contiguous_strides(x.shape());
  std::vector<std::int64_t> st(r);
  for (int i = 0; i < r; ++i) {
    out_shape[i] = x.dim(order[i]);
    st[i] = in_strides[order[i]];
  }
  Tensor out = Tensor::zeros(out_shape, x.dtype());
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    if (r == 0 || out.numel() == 0) {
      if (r == 0) po[0] = px[0];
      return;
    }
    const std::int64_t inner = out_shape.back();
    const std::int64_t s_last = st.back();
    const std::int64_t rows = out.numel() / inner;
    std::vector<std::int64_t> idx(r, 0);
    std::int64_t off = 0;
    for (std::int64_t row = 0; row < rows; ++row) {
      T* o = po + row * inner;
      for (std::int64_t j = 0; j < inner; ++j) o[j] = px[off + j * s_last];
      for (int d = r - 2; d >= 0; --d) {
        if (++idx[d] < out_shape[d]) {
          off += st[d];
          break;
        }
        off -= st[d] * (out_shape[d] - 1);
        idx[d] = 0;
      }
    }
  });
  maybe_record("permute", {x}, out, [&] {
    std::vector<int> inverse(r);
    for (int i = 0; i < r; ++i) inverse[order[i]] = i;
    return [inverse](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{permute(g, inverse)};
    };
  });
  return out;
}

namespace {

// Copies `src` into `dst` at per-axis offsets (dst ⊇ src region), or the
// reverse when `extract` is set.
template <class T>
void copy_region(const T* src, const Shape& src_shape, T* dst, const Shape& dst_shape,
                 const std::vector<std::int64_t>& offsets, bool extract) {
  const int r = static_cast<int>(src_shape.size());
  const Shape& small = extract ? dst_shape : src_shape;
  const Shape& big = extract ? src_shape : dst_shape;
  if (shape_numel(small) == 0) return;
  const auto bs = contiguous_strides(big);
  std::int64_t base = 0;
  for (int d = 0; d < r; ++d) base += offsets[d] * bs[d];
  if (r == 0) {
    dst[0] = src[0];
    return;
  }
  const std::int64_t inner = small.back();
  const std::int64_t rows = shape_numel(small) / inner;
  std::vector<std::int64_t> idx(r, 0);
  std::int64_t off = base;
  for (std::int64_t row = 0; row < rows; ++row) {
    if (extract)
      std::copy(src + off, src + off + inner, dst + row * inner);
    else
      std::copy(src + row * inner, src + (row + 1) * inner, dst + off);
    for (int d = r - 2; d >= 0; --d) {
      if (++idx[d] < small[d]) {
        off += bs[d];
        break;
      }
      off -= bs[d] * (small[d] - 1);
      idx[d] = 0;
    }
  }
}

}  // namespace

Tensor pad(const Tensor& x, const std::vector<std::pair<std::int64_t, std::int64_t>>& pads_in, double value) {
  detail::require_defined("pad", x);
  const int r = x.rank();
  if (static_cast<int>(pads_in.size()) > r) throw ShapeError("pad: more pad entries than axes");
  std::vector<std::pair<std::int64_t, std::int64_t>> pads(pads_in);
  pads.resize(r, {0, 0});
  Shape out_shape = x.shape();
  std::vector<std::int64_t> offsets(r);
  for (int d = 0; d < r; ++d) {
    if (pads[d].first < 0 || pads[d].second < 0) throw ShapeError("pad: negative padding");
    out_shape[d] += pads[d].first + pads[d].second;
    offsets[d] = pads[d].first;
  }
  Tensor out = Tensor::full(out_shape, value, x.dtype());
  dispatch(x.dtype(), [&]<class T>() {
    copy_region<T>(x.data<T>().data(), x.shape(), out.mutable_data<T>().data(), out_shape, offsets, false);
  });
  maybe_record("pad", {x}, out, [&] {
    return [offsets, in_shape = x.shape()](const Tensor& g, const std::vector<bool>&) {
      Tensor gx = Tensor::zeros(in_shape, g.dtype());
      dispatch(g.dtype(), [&]<class T>() {
        copy_region<T>(g.data<T>().data(), g.shape(), gx.mutable_data<T>().data(), in_shape, offsets, true);
      });
      return std::vector<Tensor>{gx};
    };
  });
  return out;
}

Tensor index_select(const Tensor& x, int axis, const std::vector<std::int64_t>& indices) {
  detail::require_defined("index_select", x);
  const int a = normalize_axis("index_select", axis, x.rank());
  const std::int64_t n = x.dim(a);
  for (auto i : indices)
    if (i < 0 || i >= n)
      throw ShapeError("index_select: index " + std::to_string(i) + " out of range " + std::to_string(n));
  Shape out_shape = x.shape();
  out_shape[a] = static_cast<std::int64_t>(indices.size());
  Tensor out = Tensor::zeros(out_shape, x.dtype());
  std::int64_t outer = 1, inner = 1;
  for (int d = 0; d < a; ++d) outer *= x.dim(d);
  for (int d = a + 1; d < x.rank(); ++d) inner *= x.dim(d);
  const auto m = static_cast<std::int64_t>(indices.size());
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    for (std::int64_t o = 0; o < outer; ++o)
      for (std::int64_t k = 0; k < m; ++k) {
        const T* s = px + (o * n + indices[k]) * inner;
        std::copy(s, s + inner, po + (o * m + k) * inner);
      }
  });
  maybe_record("index_select", {x}, out, [&] {
    return [in_shape = x.shape(), indices, outer, inner, n, m](const Tensor& g, const std::vector<bool>&) {
      Tensor gx = Tensor::zeros(in_shape, g.dtype());
      dispatch(g.dtype(), [&]<class T>() {
        const T* pg = g.data<T>().data();
        T* pr = gx.mutable_data<T>().data();
        for (std::int64_t o = 0; o < outer; ++o)
          for (std::int64_t k = 0; k < m; ++k) {
            const T* s = pg + (o * m + k) * inner;
            T* d = pr + (o * n + indices[k]) * inner;
            for (std::int64_t j = 0; j < inner; ++j) d[j] += s[j];
          }
      });
      return std::vector<Tensor>{gx};
    };
  });
  return out;
}

namespace {

// Source taps for one output coordinate along an upsampled axis.
struct Taps {
  std::vector<std::int64_t> i0, i1;
  std::vector<double> w1;  // weight of i1; i0 gets 1 - w1
};

Taps make_taps(std::int64_t in, int scale, UpsampleMode mode) {
  const std::int64_t out = in * scale;
  Taps t;
  t.i0.resize(out);
  t.i1.resize(out);
  t.w1.resize(out);
  for (std::int64_t o = 0; o < out; ++o) {
    if (mode == UpsampleMode::nearest) {
      t.i0[o] = t.i1[o] = o / scale;
      t.w1[o] = 0.0;
      continue;
    }
    double src = (static_cast<double>(o) + 0.5) / scale - 0.5;
    if (src < 0) src = 0;
    auto lo = static_cast<std::int64_t>(std::floor(src));
    lo = std::min(lo, in - 1);
    const std::int64_t hi = std::min(lo + 1, in - 1);
    t.i0[o] = lo;
    t.i1[o] = hi;
    t.w1[o] = src - static_cast<double>(lo);
  }
  return t;
}

}  // namespace

Tensor upsample2d(const Tensor& x, int scale, UpsampleMode mode) {
  detail::require_defined("upsample2d", x);
  if (x.rank() < 2) throw ShapeError("upsample2d: needs rank >= 2");
  if (scale < 1) throw ValueError("upsample2d: scale must be >= 1");
  if (scale == 1) return x;
  const std::int64_t H = x.dim(-2), W = x.dim(-1);
  const std::int64_t Ho = H * scale, Wo = W * scale;
  const std::int64_t planes = x.numel() / (H * W);
  Shape out_shape = x.shape();
  out_shape[x.rank() - 2] = Ho;
  out_shape[x.rank() - 1] = Wo;
  const Taps th = make_taps(H, scale, mode), tw = make_taps(W, scale, mode);
  Tensor out = Tensor::zeros(out_shape, x.dtype());
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    for (std::int64_t p = 0; p < planes; ++p) {
      const T* src = px + p * H * W;
      T* dst = po + p * Ho * Wo;
      for (std::int64_t i = 0; i < Ho; ++i) {
        const T wy = static_cast<T>(th.w1[i]);
        const T* r0 = src + th.i0[i] * W;
        const T* r1 = src + th.i1[i] * W;
        for (std::int64_t j = 0; j < Wo; ++j) {
          const T wx = static_cast<T>(tw.w1[j]);
          const T top = r0[tw.i0[j]] * (1 - wx) + r0[tw.i1[j]] * wx;
          const T bot = r1[tw.i0[j]] * (1 - wx) + r1[tw.i1[j]] * wx;
          dst[i * Wo + j] = top * (1 - wy) + bot * wy;
        }
      }
    }
  });
  maybe_record("upsample2d", {x}, out, [&] {
    return [in_shape = x.shape(), th, tw, H, W, Ho, Wo, planes](const Tensor& g, const std::vector<bool>&) {
      Tensor gx = Tensor::zeros(in_shape, g.dtype());
      dispatch(g.dtype(), [&]<class T>() {
        const T* pg = g.data<T>().data();
        T* pr = gx.mutable_data<T>().data();
        for (std::int64_t p = 0; p < planes; ++p) {
          const T* src = pg + p * Ho * Wo;
          T* dst = pr + p * H * W;
          for (std::int64_t i = 0; i < Ho; ++i) {
            const T wy = static_cast<T>(th.w1[i]);
            T* r0 = dst + th.i0[i] * W;
            T* r1 = dst + th.i1[i] * W;
            for (std::int64_t j = 0; j < Wo; ++j) {
              const T wx = static_cast<T>(tw.w1[j]);
              const T v = src[i * Wo + j];
              r0[tw.i0[j]] += v * (1 - wy) * (1 - wx);
              r0[tw.i1[j]] += v * (1 - wy) * wx;
              r1[tw.i0[j]] += v * wy * (1 - wx);
              r1[tw.i1[j]] += v * wy * wx;
            }
          }
        }
      });
      return std::vector<Tensor>{gx};
    };
  });
  return out;
}

Tensor max_pool2d(const Tensor& x, int kernel, int stride) {
  detail::require_defined("max_pool2d", x);
  if (x.rank() != 4) throw ShapeError("max_pool2d: expects B×C×H×W, got " + shape_str(x.shape()));
  if (kernel < 1 || stride < 1) throw ValueError("max_pool2d: kernel and stride must be >= 1");
  const std::int64_t H = x.dim(2), W = x.dim(3);
  if (H < kernel || W < kernel)
    throw ShapeError("max_pool2d: kernel " + std::to_string(kernel) + " larger than input " +
                     shape_str(x.shape()));
  const std::int64_t Ho = (H - kernel) / stride + 1, Wo = (W - kernel) / stride + 1;
  const std::int64_t planes = x.dim(0) * x.dim(1);
  Tensor out = Tensor::zeros({x.dim(0), x.dim(1), Ho, Wo}, x.dtype());
  auto argmax = std::make_shared<std::vector<std::int64_t>>(static_cast<std::size_t>(out.numel()));
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    for (std::int64_t p = 0; p < planes; ++p)
      for (std::int64_t i = 0; i < Ho; ++i)
        for (std::int64_t j = 0; j < Wo; ++j) {
          std::int64_t best = p * H * W + (i * stride) * W + j * stride;
          for (int ki = 0; ki < kernel; ++ki)
            for (int kj = 0; kj < kernel; ++kj) {
              const std::int64_t off = p * H * W + (i * stride + ki) * W + (j * stride + kj);
              if (px[off] > px[best]) best = off;
            }
          const std::int64_t o = (p * Ho + i) * Wo + j;
          po[o] = px[best];
          (*argmax)[o] = best;
        }
  });
  maybe_record("max_pool2d", {x}, out, [&] {
    return [in_shape = x.shape(), argmax](const Tensor& g, const std::vector<bool>&) {
      Tensor gx = Tensor::zeros(in_shape, g.dtype());
      dispatch(g.dtype(), [&]<class T>() {
        const T* pg = g.data<T>().data();
        T* pr = gx.mutable_data<T>().data();
        for (std::size_t o = 0; o < argmax->size(); ++o) pr[(*argmax)[o]] += pg[o];
      });
      return std::vector<Tensor>{gx};
    };
  });
  return out;
}

Tensor layer_norm(const Tensor& x, std::vector<int> axes, double eps) {
  detail::require_defined("layer_norm", x);
  if (axes.empty()) throw ValueError("layer_norm: empty axis set");
  const auto plan = detail::make_reduce_plan(x.shape(), axes);
  Tensor out = Tensor::zeros(x.shape(), x.dtype());
  auto rstd = std::make_shared<std::vector<double>>(plan.outer.size());
  const auto count = static_cast<double>(plan.inner.size());
  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    T* po = out.mutable_data<T>().data();
    for (std::size_t i = 0; i < plan.outer.size(); ++i) {
      const T* b = px + plan.outer[i];
      T m = 0;
      for (auto off : plan.inner) m += b[off];
      m /= static_cast<T>(count);
      T v = 0;
      for (auto off : plan.inner) v += (b[off] - m) * (b[off] - m);
      v /= static_cast<T>(count);
      const T rs = T(1) / std::sqrt(v + static_cast<T>(eps));
      (*rstd)[i] = rs;
      T* o = po + plan.outer[i];
      for (auto off : plan.inner) o[off] = (b[off] - m) * rs;
    }
  });
  maybe_record("layer_norm", {x}, out, [&] {
    return [out, plan, rstd, count](const Tensor& g, const std::vector<bool>&) {
      Tensor gx = Tensor::zeros(out.shape(), out.dtype());
      dispatch(out.dtype(), [&]<class T>() {
        const T* py = out.data<T>().data();
        const T* pg = g.data<T>().data();
        T* pr = gx.mutable_data<T>().data();
        for (std::size_t i = 0; i < plan.outer.size(); ++i) {
          const std::int64_t base = plan.outer[i];
          T mg = 0, mgy = 0;
          for (auto off : plan.inner) {
            mg += pg[base + off];
            mgy += pg[base + off] * py[base + off];
          }
          mg /= static_cast<T>(count);
          mgy /= static_cast<T>(count);
          const T rs = static_cast<T>((*rstd)[i]);
          for (auto off : plan.inner)
            pr[base + off] = rs * (pg[base + off] - mg - py[base + off] * mgy);
        }
      });
      return std::vector<Tensor>{gx};
    };
  });
  return out;
}

Tensor instance_norm(const Tensor& x, double eps) {
  if (x.rank() != 4) throw ShapeError("instance_norm: expects B×C×H×W, got " + shape_str(x.shape()));
  return layer_norm(x, {2, 3}, eps);
}

Tensor dropout(const Tensor& x, double p, bool train, std::uint64_t seed) {
  detail::require_defined("dropout", x);
  if (p < 0.0 || p >= 1.0) throw ValueError("dropout: p must be in [0, 1)");
  if (!train || p == 0.0) return x;
  Tensor mask = Tensor::zeros(x.shape(), x.dtype());
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution keep(1.0 - p);
  dispatch(x.dtype(), [&]<class T>() {
    const T scale = static_cast<T>(1.0 / (1.0 - p));
    for (auto& m : mask.mutable_data<T>()) m = keep(rng) ? scale : T(0);
  });
  return mul(x, mask);
}

Tensor space_to_depth(const Tensor& x, int s) {
  if (x.rank() != 4) throw ShapeError("space_to_depth: expects B×C×H×W, got " + shape_str(x.shape()));
  if (s < 1) throw ValueError("space_to_depth: scale must be >= 1");
  if (s == 1) return x;
  const auto B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (H % s != 0 || W % s != 0)
    throw ShapeError("space_to_depth: " + shape_str(x.shape()) + " not divisible by " + std::to_string(s));
  Tensor t = reshape(x, {B, C, H / s, s, W / s, s});
  t = permute(t, {0, 1, 3, 5, 2, 4});
  return reshape(t, {B, C * s * s, H / s, W / s});
}

Tensor depth_to_space(const Tensor& x, int s) {
  if (x.rank() != 4) throw ShapeError("depth_to_space: expects B×C×H×W, got " + shape_str(x.shape()));
  if (s < 1) throw ValueError("depth_to_space: scale must be >= 1");
  if (s == 1) return x;
  const auto B = x.dim(0), C = x.dim(1), H = x.dim(2), W = x.dim(3);
  if (C % (s * s) != 0)
    throw ShapeError("depth_to_space: channels " + std::to_string(C) + " not divisible by " +
                     std::to_string(s * s));
  Tensor t = reshape(x, {B, C / (s * s), s, s, H, W});
  t = permute(t, {0, 1, 4, 2, 5, 3});
  return reshape(t, {B, C / (s * s), H * s, W * s});
}

}  // namespace ops
}  // namespace nnuzoo
