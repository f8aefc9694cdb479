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
#include <string>

#include "internal.hpp"
#include "nnuzoo/tensor/ops.hpp"
#include "nnuzoo/tensor/parallel.hpp"

namespace nnuzoo::ops {

using detail::maybe_record;

namespace {

struct ConvGeom {
  std::int64_t B, C, H, W;     // input
  std::int64_t O, kh, kw;      // output channels, kernel
  std::int64_t Ho, Wo;         // output spatial
  int stride, pad, dil, groups;
  std::int64_t Cg() const { return C / groups; }
  std::int64_t Og() const { return O / groups; }
  std::int64_t col_rows() const { return Cg() * kh * kw; }
  std::int64_t col_cols() const { return Ho * Wo; }
  bool depthwise() const { return groups == C && groups == O; }
  bool pointwise() const { return kh == 1 && kw == 1 && stride == 1 && pad == 0; }
};

// col[(c*kh + i)*kw + j, oy*Wo + ox] = x[c, oy*s - p + i*d, ox*s - p + j*d]
template <class T>
void im2col(const T* x, std::int64_t C, std::int64_t H, std::int64_t W, std::int64_t kh, std::int64_t kw,
            int s, int p, int d, std::int64_t Ho, std::int64_t Wo, T* col) {
  for (std::int64_t c = 0; c < C; ++c)
    for (std::int64_t i = 0; i < kh; ++i)
      for (std::int64_t j = 0; j < kw; ++j) {
        T* row = col + ((c * kh + i) * kw + j) * Ho * Wo;
        for (std::int64_t oy = 0; oy < Ho; ++oy) {
          const std::int64_t y = oy * s - p + i * d;
          T* r = row + oy * Wo;
          if (y < 0 || y >= H) {
            std::fill(r, r + Wo, T(0));
            continue;
          }
          const T* xr = x + (c * H + y) * W;
          for (std::int64_t ox = 0; ox < Wo; ++ox) {
            const std::int64_t xx = ox * s - p + j * d;
            r[ox] = (xx >= 0 && xx < W) ? xr[xx] : T(0);
          }
        }
      }
}

template <class T>
void col2im(const T* col, std::int64_t C, std::int64_t H, std::int64_t W, std::int64_t kh, std::int64_t kw,
            int s, int p, int d, std::int64_t Ho, std::int64_t Wo, T* x) {
  for (std::int64_t c = 0; c < C; ++c)
    for (std::int64_t i = 0; i < kh; ++i)
      for (std::int64_t j = 0; j < kw; ++j) {
        const T* row = col + ((c * kh + i) * kw + j) * Ho * Wo;
        for (std::int64_t oy = 0; oy < Ho; ++oy) {
          const std::int64_t y = oy * s - p + i * d;
          if (y < 0 || y >= H) continue;
          T* xr = x + (c * H + y) * W;
          const T* r = row + oy * Wo;
          for (std::int64_t ox = 0; ox < Wo; ++ox) {
            const std::int64_t xx = ox * s - p + j * d;
            if (xx >= 0 && xx < W) xr[xx] += r[ox];
          }
        }
      }
}

ConvGeom conv_geom(const Tensor& input, const Tensor& weight, const Conv2dOptions& o) {
  if (input.rank() != 4) throw ShapeError("conv2d: input must be B×C×H×W, got " + shape_str(input.shape()));
  if (weight.rank() != 4) throw ShapeError("conv2d: weight must be O×C/g×kh×kw, got " + shape_str(weight.shape()));
  if (o.stride < 1 || o.dilation < 1 || o.padding < 0 || o.groups < 1)
    throw ValueError("conv2d: stride/dilation/groups must be >= 1 and padding >= 0");
  ConvGeom g{input.dim(0), input.dim(1), input.dim(2), input.dim(3), weight.dim(0), weight.dim(2),
             weight.dim(3), 0, 0, o.stride, o.padding, o.dilation, o.groups};
  if (g.C % g.groups != 0 || g.O % g.groups != 0)
    throw ShapeError("conv2d: channels " + std::to_string(g.C) + "->" + std::to_string(g.O) +
                     " not divisible by groups " + std::to_string(g.groups));
  if (weight.dim(1) != g.Cg())
    throw ShapeError("conv2d: weight expects " + std::to_string(weight.dim(1)) + " channels per group, input has " +
                     std::to_string(g.Cg()) + " (input " + shape_str(input.shape()) + ", weight " +
                     shape_str(weight.shape()) + ")");
  const std::int64_t ekh = g.dil * (g.kh - 1) + 1, ekw = g.dil * (g.kw - 1) + 1;
  if (ekh > g.H + 2 * g.pad || ekw > g.W + 2 * g.pad)
    throw ShapeError("conv2d: kernel " + shape_str(weight.shape()) + " larger than padded input " +
                     shape_str(input.shape()));
  g.Ho = (g.H + 2 * g.pad - ekh) / g.stride + 1;
  g.Wo = (g.W + 2 * g.pad - ekw) / g.stride + 1;
  return g;
}

template <class T>
void depthwise_forward(const ConvGeom& g, const T* x, const T* w, T* y) {
  parallel_for(g.B, [&](std::int64_t b) {
    for (std::int64_t c = 0; c < g.C; ++c) {
      const T* xp = x + (b * g.C + c) * g.H * g.W;
      const T* wp = w + c * g.kh * g.kw;
      T* yp = y + (b * g.C + c) * g.Ho * g.Wo;
      for (std::int64_t oy = 0; oy < g.Ho; ++oy)
        for (std::int64_t ox = 0; ox < g.Wo; ++ox) {
          T acc = 0;
          for (std::int64_t i = 0; i < g.kh; ++i) {
            const std::int64_t iy = oy * g.stride - g.pad + i * g.dil;
            if (iy < 0 || iy >= g.H) continue;
            for (std::int64_t j = 0; j < g.kw; ++j) {
              const std::int64_t ix = ox * g.stride - g.pad + j * g.dil;
              if (ix < 0 || ix >= g.W) continue;
              acc += xp[iy * g.W + ix] * wp[i * g.kw + j];
            }
          }
          yp[oy * g.Wo + ox] = acc;
        }
    }
  });
}

template <class T>
void depthwise_backward(const ConvGeom& g, const T* x, const T* w, const T* gy, T* gx, T* gw) {
  std::vector<T> partial(gw ? static_cast<std::size_t>(g.B * g.C * g.kh * g.kw) : 0, T(0));
  parallel_for(g.B, [&](std::int64_t b) {
    for (std::int64_t c = 0; c < g.C; ++c) {
      const T* xp = x + (b * g.C + c) * g.H * g.W;
      const T* wp = w + c * g.kh * g.kw;
      const T* gyp = gy + (b * g.C + c) * g.Ho * g.Wo;
      T* gxp = gx ? gx + (b * g.C + c) * g.H * g.W : nullptr;
      T* gwp = gw ? partial.data() + (b * g.C + c) * g.kh * g.kw : nullptr;
      for (std::int64_t oy = 0; oy < g.Ho; ++oy)
        for (std::int64_t ox = 0; ox < g.Wo; ++ox) {
          const T v = gyp[oy * g.Wo + ox];
          for (std::int64_t i = 0; i < g.kh; ++i) {
            const std::int64_t iy = oy * g.stride - g.pad + i * g.dil;
            if (iy < 0 || iy >= g.H) continue;
            for (std::int64_t j = 0; j < g.kw; ++j) {
              const std::int64_t ix = ox * g.stride - g.pad + j * g.dil;
              if (ix < 0 || ix >= g.W) continue;
              if (gxp) gxp[iy * g.W + ix] += v * wp[i * g.kw + j];
              if (gwp) gwp[i * g.kw + j] += v * xp[iy * g.W + ix];
            }
          }
        }
    }
  });
  if (gw) {
    const std::int64_t n = g.C * g.kh * g.kw;
    for (std::int64_t b = 0; b < g.B; ++b)
      for (std::int64_t k = 0; k < n; ++k) gw[k] += partial[b * n + k];
  }
}

template <class T>
void conv_forward(const ConvGeom& g, const T* x, const T* w, T* y) {
  if (g.depthwise()) return depthwise_forward(g, x, w, y);
  const std::int64_t rows = g.col_rows(), cols = g.col_cols();
  parallel_for(g.B, [&](std::int64_t b) {
    std::vector<T> col(g.pointwise() ? 0 : static_cast<std::size_t>(rows * cols));
    for (int gr = 0; gr < g.groups; ++gr) {
      const T* xg = x + (b * g.C + gr * g.Cg()) * g.H * g.W;
      const T* src = xg;
      if (!g.pointwise()) {
        im2col(xg, g.Cg(), g.H, g.W, g.kh, g.kw, g.stride, g.pad, g.dil, g.Ho, g.Wo, col.data());
        src = col.data();
      }
      T* yg = y + (b * g.O + gr * g.Og()) * cols;
      detail::gemm<T>(false, false, g.Og(), cols, rows, w + gr * g.Og() * rows, src, yg, false);
    }
  });
}

template <class T>
void conv_backward(const ConvGeom& g, const T* x, const T* w, const T* gy, T* gx, T* gw) {
  if (g.depthwise()) return depthwise_backward(g, x, w, gy, gx, gw);
  const std::int64_t rows = g.col_rows(), cols = g.col_cols();
  const std::int64_t wsize = g.O * rows;
  std::vector<T> partial(gw ? static_cast<std::size_t>(g.B * wsize) : 0);
  parallel_for(g.B, [&](std::int64_t b) {
    std::vector<T> col(g.pointwise() ? 0 : static_cast<std::size_t>(rows * cols));
    std::vector<T> dcol(gx && !g.pointwise() ? static_cast<std::size_t>(rows * cols) : 0);
    for (int gr = 0; gr < g.groups; ++gr) {
      const T* xg = x + (b * g.C + gr * g.Cg()) * g.H * g.W;
      const T* gyg = gy + (b * g.O + gr * g.Og()) * cols;
      const T* wg = w + gr * g.Og() * rows;
      if (gw) {
        const T* src = xg;
        if (!g.pointwise()) {
          im2col(xg, g.Cg(), g.H, g.W, g.kh, g.kw, g.stride, g.pad, g.dil, g.Ho, g.Wo, col.data());
          src = col.data();
        }
        detail::gemm<T>(false, true, g.Og(), rows, cols, gyg, src, partial.data() + b * wsize + gr * g.Og() * rows,
                        false);
      }
      if (gx) {
        T* gxg = gx + (b * g.C + gr * g.Cg()) * g.H * g.W;
        if (g.pointwise()) {
          detail::gemm<T>(true, false, rows, cols, g.Og(), wg, gyg, gxg, true);
        } else {
          detail::gemm<T>(true, false, rows, cols, g.Og(), wg, gyg, dcol.data(), false);
          col2im(dcol.data(), g.Cg(), g.H, g.W, g.kh, g.kw, g.stride, g.pad, g.dil, g.Ho, g.Wo, gxg);
        }
      }
    }
  });
  if (gw) {
    for (std::int64_t b = 0; b < g.B; ++b) {
      const T* p = partial.data() + b * wsize;
      for (std::int64_t k = 0; k < wsize; ++k) gw[k] += p[k];
    }
  }
}

template <class T>
void add_channel_bias(T* y, const T* bias, std::int64_t B, std::int64_t O, std::int64_t plane) {
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t o = 0; o < O; ++o) {
      T* p = y + (b * O + o) * plane;
      const T v = bias[o];
      for (std::int64_t i = 0; i < plane; ++i) p[i] += v;
    }
}

Tensor channel_bias_grad(const Tensor& g) {
  const std::int64_t B = g.dim(0), O = g.dim(1), plane = g.dim(2) * g.dim(3);
  Tensor gb = Tensor::zeros({O}, g.dtype());
  dispatch(g.dtype(), [&]<class T>() {
    const T* pg = g.data<T>().data();
    T* pb = gb.mutable_data<T>().data();
    for (std::int64_t b = 0; b < B; ++b)
      for (std::int64_t o = 0; o < O; ++o) {
        const T* p = pg + (b * O + o) * plane;
        T acc = 0;
        for (std::int64_t i = 0; i < plane; ++i) acc += p[i];
        pb[o] += acc;
      }
  });
  return gb;
}

void check_bias(const char* op, const std::optional<Tensor>& bias, std::int64_t channels, const Tensor& input) {
  if (!bias) return;
  detail::require_defined(op, *bias);
  detail::require_same_dtype(op, input, *bias);
  if (bias->rank() != 1 || bias->dim(0) != channels)
    throw ShapeError(std::string(op) + ": bias must have shape [" + std::to_string(channels) + "], got " +
                     shape_str(bias->shape()));
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& weight, const std::optional<Tensor>& bias, int stride,
              int padding, int dilation, int groups) {
  return conv2d(input, weight, bias, Conv2dOptions{stride, padding, dilation, groups});
}

Tensor conv2d(const Tensor& input, const Tensor& weight, const std::optional<Tensor>& bias, Conv2dOptions opt) {
  detail::require_defined("conv2d", input);
  detail::require_defined("conv2d", weight);
  detail::require_same_dtype("conv2d", input, weight);
  const ConvGeom g = conv_geom(input, weight, opt);
  check_bias("conv2d", bias, g.O, input);
  Tensor out = Tensor::zeros({g.B, g.O, g.Ho, g.Wo}, input.dtype());
  dispatch(input.dtype(), [&]<class T>() {
    T* y = out.mutable_data<T>().data();
    conv_forward<T>(g, input.data<T>().data(), weight.data<T>().data(), y);
    if (bias) add_channel_bias<T>(y, bias->data<T>().data(), g.B, g.O, g.Ho * g.Wo);
  });
  const Tensor b = bias.value_or(Tensor());
  maybe_record("conv2d", {input, weight, b}, out, [&] {
    return [input, weight, g](const Tensor& gy, const std::vector<bool>& needs) {
      Tensor gx, gw, gb;
      dispatch(input.dtype(), [&]<class T>() {
        if (needs[0]) gx = Tensor::zeros(input.shape(), input.dtype());
        if (needs[1]) gw = Tensor::zeros(weight.shape(), weight.dtype());
        if (needs[0] || needs[1])
          conv_backward<T>(g, input.data<T>().data(), weight.data<T>().data(), gy.data<T>().data(),
                           needs[0] ? gx.mutable_data<T>().data() : nullptr,
                           needs[1] ? gw.mutable_data<T>().data() : nullptr);
      });
      if (needs[2]) gb = channel_bias_grad(gy);
      return std::vector<Tensor>{gx, gw, gb};
    };
  });
  return out;
}

Tensor conv_transpose2d(const Tensor& input, const Tensor& weight, const std::optional<Tensor>& bias, int stride,
                        int padding) {
  detail::require_defined("conv_transpose2d", input);
  detail::require_defined("conv_transpose2d", weight);
  detail::require_same_dtype("conv_transpose2d", input, weight);
  if (input.rank() != 4 || weight.rank() != 4)
    throw ShapeError("conv_transpose2d: expects 4-D input and weight, got " + shape_str(input.shape()) + " and " +
                     shape_str(weight.shape()));
  if (stride < 1 || padding < 0) throw ValueError("conv_transpose2d: stride must be >= 1, padding >= 0");
  if (weight.dim(0) != input.dim(1))
    throw ShapeError("conv_transpose2d: weight expects " + std::to_string(weight.dim(0)) + " input channels, got " +
                     std::to_string(input.dim(1)));
  const std::int64_t B = input.dim(0), Cin = input.dim(1), H = input.dim(2), W = input.dim(3);
  const std::int64_t Cout = weight.dim(1), kh = weight.dim(2), kw = weight.dim(3);
  const std::int64_t Ho = (H - 1) * stride - 2 * padding + kh;
  const std::int64_t Wo = (W - 1) * stride - 2 * padding + kw;
  if (Ho < 1 || Wo < 1) throw ShapeError("conv_transpose2d: empty output for input " + shape_str(input.shape()));
  check_bias("conv_transpose2d", bias, Cout, input);
  const std::int64_t rows = Cout * kh * kw, cols = H * W;
  Tensor out = Tensor::zeros({B, Cout, Ho, Wo}, input.dtype());
  dispatch(input.dtype(), [&]<class T>() {
    const T* px = input.data<T>().data();
    const T* pw = weight.data<T>().data();
    T* py = out.mutable_data<T>().data();
    parallel_for(B, [&](std::int64_t b) {
      std::vector<T> col(static_cast<std::size_t>(rows * cols));
      detail::gemm<T>(true, false, rows, cols, Cin, pw, px + b * Cin * cols, col.data(), false);
      col2im(col.data(), Cout, Ho, Wo, kh, kw, stride, padding, 1, H, W, py + b * Cout * Ho * Wo);
    });
    if (bias) add_channel_bias<T>(py, bias->data<T>().data(), B, Cout, Ho * Wo);
  });
  const Tensor b = bias.value_or(Tensor());
  maybe_record("conv_transpose2d", {input, weight, b}, out, [&] {
    return [=](const Tensor& gy, const std::vector<bool>& needs) {
      Tensor gx, gw, gb;
      dispatch(input.dtype(), [&]<class T>() {
        const T* px = input.data<T>().data();
        const T* pw = weight.data<T>().data();
        const T* pgy = gy.data<T>().data();
        if (needs[0]) gx = Tensor::zeros(input.shape(), input.dtype());
        std::vector<T> partial(needs[1] ? static_cast<std::size_t>(B * Cin * rows) : 0);
        T* pgx = needs[0] ? gx.mutable_data<T>().data() : nullptr;
        parallel_for(B, [&](std::int64_t bi) {
          std::vector<T> col(static_cast<std::size_t>(rows * cols));
          im2col(pgy + bi * Cout * Ho * Wo, Cout, Ho, Wo, kh, kw, stride, padding, 1, H, W, col.data());
          if (pgx) detail::gemm<T>(false, false, Cin, cols, rows, pw, col.data(), pgx + bi * Cin * cols, false);
          if (!partial.empty())
            detail::gemm<T>(false, true, Cin, rows, cols, px + bi * Cin * cols, col.data(),
                            partial.data() + bi * Cin * rows, false);
        });
        if (needs[1]) {
          gw = Tensor::zeros(weight.shape(), weight.dtype());
          T* pgw = gw.mutable_data<T>().data();
          const std::int64_t n = Cin * rows;
          for (std::int64_t bi = 0; bi < B; ++bi)
            for (std::int64_t k = 0; k < n; ++k) pgw[k] += partial[bi * n + k];
        }
      });
      if (needs[2]) gb = channel_bias_grad(gy);
      return std::vector<Tensor>{gx, gw, gb};
    };
  });
  return out;
}

}  // namespace nnuzoo::ops
