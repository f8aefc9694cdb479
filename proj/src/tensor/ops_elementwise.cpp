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

#include "internal.hpp"
#include "nnuzoo/tensor/ops.hpp"

namespace nnuzoo {

namespace detail {

#ifndef NDEBUG
void check_finite(const char* op, const Tensor& out) {
  if (!out.defined() || out.is_meta()) return;
  dispatch(out.dtype(), [&]<class T>() {
    for (T v : out.data<T>())
      if (!std::isfinite(v)) throw NonFiniteError(std::string(op) + ": non-finite output");
  });
}
#endif

namespace {

// Strides of `shape` right-aligned to `rank` with 0 on broadcast axes.
std::vector<std::int64_t> aligned_strides(const Shape& shape, const Shape& out) {
  const int r = static_cast<int>(out.size());
  const int off = r - static_cast<int>(shape.size());
  std::vector<std::int64_t> strides(r, 0);
  const auto cs = contiguous_strides(shape);
  for (int i = 0; i < static_cast<int>(shape.size()); ++i)
    strides[off + i] = shape[i] == 1 ? 0 : cs[i];
  return strides;
}

}  // namespace

Tensor expand_to(const Tensor& t, const Shape& shape) {
  if (t.shape() == shape) return t;
  Tensor out = Tensor::zeros(shape, t.dtype());
  const auto st = aligned_strides(t.shape(), shape);
  dispatch(t.dtype(), [&]<class T>() {
    const T* src = t.data<T>().data();
    T* dst = out.mutable_data<T>().data();
    const int r = static_cast<int>(shape.size());
    if (r == 0) {
      dst[0] = src[0];
      return;
    }
    const std::int64_t inner = shape.back();
    const std::int64_t s_last = st.back();
    const std::int64_t rows = inner == 0 ? 0 : shape_numel(shape) / inner;
    std::vector<std::int64_t> idx(r, 0);
    std::int64_t off = 0;
    for (std::int64_t row = 0; row < rows; ++row) {
      T* o = dst + row * inner;
      for (std::int64_t j = 0; j < inner; ++j) o[j] = src[off + j * s_last];
      for (int d = r - 2; d >= 0; --d) {
        if (++idx[d] < shape[d]) {
          off += st[d];
          break;
        }
        off -= st[d] * (shape[d] - 1);
        idx[d] = 0;
      }
    }
  });
  return out;
}

}  // namespace detail

namespace ops {

using detail::maybe_record;

namespace {

Shape broadcast_shape(const char* op, const Shape& a, const Shape& b) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r, 1);
  for (std::size_t i = 0; i < r; ++i) {
    const std::int64_t da = i < r - a.size() ? 1 : a[i - (r - a.size())];
    const std::int64_t db = i < r - b.size() ? 1 : b[i - (r - b.size())];
    if (da != db && da != 1 && db != 1)
      throw ShapeError(std::string(op) + ": cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    out[i] = da == 1 ? db : da;
  }
  return out;
}

template <class F>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, F f) {
  detail::require_defined(op, a);
  detail::require_defined(op, b);
  detail::require_same_dtype(op, a, b);
  const Shape out_shape = broadcast_shape(op, a.shape(), b.shape());
  Tensor out = Tensor::zeros(out_shape, a.dtype());
  dispatch(a.dtype(), [&]<class T>() {
    const T* pa = a.data<T>().data();
    const T* pb = b.data<T>().data();
    T* po = out.mutable_data<T>().data();
    const std::int64_t n = out.numel();
    if (a.shape() == b.shape()) {
      for (std::int64_t i = 0; i < n; ++i) po[i] = f(pa[i], pb[i]);
      return;
    }
    if (b.numel() == 1 && a.shape() == out_shape) {
      const T s = pb[0];
      for (std::int64_t i = 0; i < n; ++i) po[i] = f(pa[i], s);
      return;
    }
    if (a.numel() == 1 && b.shape() == out_shape) {
      const T s = pa[0];
      for (std::int64_t i = 0; i < n; ++i) po[i] = f(s, pb[i]);
      return;
    }
    const auto sa = detail::aligned_strides(a.shape(), out_shape);
    const auto sb = detail::aligned_strides(b.shape(), out_shape);
    const int r = static_cast<int>(out_shape.size());
    const std::int64_t inner = out_shape.back();
    if (inner == 0) return;
    const std::int64_t rows = n / inner;
    const std::int64_t la = sa.back(), lb = sb.back();
    std::vector<std::int64_t> idx(r, 0);
    std::int64_t oa = 0, ob = 0;
    for (std::int64_t row = 0; row < rows; ++row) {
      T* o = po + row * inner;
      for (std::int64_t j = 0; j < inner; ++j) o[j] = f(pa[oa + j * la], pb[ob + j * lb]);
      for (int d = r - 2; d >= 0; --d) {
        if (++idx[d] < out_shape[d]) {
          oa += sa[d];
          ob += sb[d];
          break;
        }
        oa -= sa[d] * (out_shape[d] - 1);
        ob -= sb[d] * (out_shape[d] - 1);
        idx[d] = 0;
      }
    }
  });
  return out;
}

template <class F>
Tensor unary(const char* op, const Tensor& x, F f) {
  detail::require_defined(op, x);
  Tensor out = Tensor::zeros(x.shape(), x.dtype());
  dispatch(x.dtype(), [&]<class T>() {
    auto src = x.data<T>();
    auto dst = out.mutable_data<T>();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = f(src[i]);
  });
  return out;
}

// out[i] = g[i] * f(x[i], y[i]) for adjoints of unary ops.
template <class F>
Tensor zip_grad(const Tensor& g, const Tensor& x, const Tensor& y, F f) {
  Tensor out = Tensor::zeros(x.shape(), x.dtype());
  dispatch(x.dtype(), [&]<class T>() {
    auto pg = g.data<T>();
    auto px = x.data<T>();
    auto py = y.data<T>();
    auto po = out.mutable_data<T>();
    for (std::size_t i = 0; i < po.size(); ++i) po[i] = pg[i] * f(px[i], py[i]);
  });
  return out;
}

}  // namespace

Tensor sum_to(const Tensor& g, const Shape& shape) {
  if (g.shape() == shape) return g;
  Tensor out = Tensor::zeros(shape, g.dtype());
  const Shape& gs = g.shape();
  const auto st = detail::aligned_strides(shape, gs);
  dispatch(g.dtype(), [&]<class T>() {
    const T* src = g.data<T>().data();
    T* dst = out.mutable_data<T>().data();
    const int r = static_cast<int>(gs.size());
    if (r == 0) {
      dst[0] += src[0];
      return;
    }
    const std::int64_t inner = gs.back();
    if (inner == 0) return;
    const std::int64_t rows = g.numel() / inner;
    const std::int64_t s_last = st.back();
    std::vector<std::int64_t> idx(r, 0);
    std::int64_t off = 0;
    for (std::int64_t row = 0; row < rows; ++row) {
      const T* s = src + row * inner;
      for (std::int64_t j = 0; j < inner; ++j) dst[off + j * s_last] += s[j];
      for (int d = r - 2; d >= 0; --d) {
        if (++idx[d] < gs[d]) {
          off += st[d];
          break;
        }
        off -= st[d] * (gs[d] - 1);
        idx[d] = 0;
      }
    }
  });
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  Tensor out = binary("add", a, b, [](auto x, auto y) { return x + y; });
  maybe_record("add", {a, b}, out, [=] {
    return [sa = a.shape(), sb = b.shape()](const Tensor& g, const std::vector<bool>& needs) {
      return std::vector<Tensor>{needs[0] ? sum_to(g, sa) : Tensor(), needs[1] ? sum_to(g, sb) : Tensor()};
    };
  });
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  Tensor out = binary("sub", a, b, [](auto x, auto y) { return x - y; });
  maybe_record("sub", {a, b}, out, [=] {
    return [sa = a.shape(), sb = b.shape()](const Tensor& g, const std::vector<bool>& needs) {
      return std::vector<Tensor>{needs[0] ? sum_to(g, sa) : Tensor(),
                                 needs[1] ? sum_to(neg(g), sb) : Tensor()};
    };
  });
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  Tensor out = binary("mul", a, b, [](auto x, auto y) { return x * y; });
  maybe_record("mul", {a, b}, out, [=] {
    return [a, b](const Tensor& g, const std::vector<bool>& needs) {
      return std::vector<Tensor>{needs[0] ? sum_to(mul(g, b), a.shape()) : Tensor(),
                                 needs[1] ? sum_to(mul(g, a), b.shape()) : Tensor()};
    };
  });
  return out;
}

Tensor div(const Tensor& a, const Tensor& b) {
  Tensor out = binary("div", a, b, [](auto x, auto y) { return x / y; });
  maybe_record("div", {a, b}, out, [=] {
    return [a, b, out](const Tensor& g, const std::vector<bool>& needs) {
      Tensor ga, gb;
      if (needs[0]) ga = sum_to(div(g, b), a.shape());
      if (needs[1]) gb = sum_to(neg(div(mul(g, out), b)), b.shape());
      return std::vector<Tensor>{ga, gb};
    };
  });
  return out;
}

Tensor add_scalar(const Tensor& x, double value) { return add(x, Tensor::scalar(value, x.dtype())); }

Tensor mul_scalar(const Tensor& x, double value) { return mul(x, Tensor::scalar(value, x.dtype())); }

Tensor neg(const Tensor& x) {
  Tensor out = unary("neg", x, [](auto v) { return -v; });
  maybe_record("neg", {x}, out, [] {
    return [](const Tensor& g, const std::vector<bool>&) { return std::vector<Tensor>{neg(g)}; };
  });
  return out;
}

Tensor exp(const Tensor& x) {
  Tensor out = unary("exp", x, [](auto v) { return std::exp(v); });
  maybe_record("exp", {x}, out, [=] {
    return [out](const Tensor& g, const std::vector<bool>&) { return std::vector<Tensor>{mul(g, out)}; };
  });
  return out;
}

Tensor log(const Tensor& x) {
  Tensor out = unary("log", x, [](auto v) { return std::log(v); });
  maybe_record("log", {x}, out, [=] {
    return [x](const Tensor& g, const std::vector<bool>&) { return std::vector<Tensor>{div(g, x)}; };
  });
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = unary("sigmoid", x, [](auto v) {
    using T = decltype(v);
    return v >= 0 ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
  });
  maybe_record("sigmoid", {x}, out, [=] {
    return [x, out](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{zip_grad(g, x, out, [](auto, auto s) { return s * (1 - s); })};
    };
  });
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = unary("relu", x, [](auto v) { return v > 0 ? v : decltype(v)(0); });
  maybe_record("relu", {x}, out, [=] {
    return [x](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{
          zip_grad(g, x, x, [](auto v, auto) { return v > 0 ? decltype(v)(1) : decltype(v)(0); })};
    };
  });
  return out;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  Tensor out = unary("leaky_relu", x, [slope](auto v) {
    using T = decltype(v);
    return v > 0 ? v : static_cast<T>(slope) * v;
  });
  maybe_record("leaky_relu", {x}, out, [=] {
    return [x, slope](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{zip_grad(g, x, x, [slope](auto v, auto) {
        using T = decltype(v);
        return v > 0 ? T(1) : static_cast<T>(slope);
      })};
    };
  });
  return out;
}

Tensor gelu(const Tensor& x) {
  Tensor out = unary("gelu", x, [](auto v) {
    using T = decltype(v);
    return T(0.5) * v * (T(1) + std::erf(v * static_cast<T>(M_SQRT1_2)));
  });
  maybe_record("gelu", {x}, out, [=] {
    return [x](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{zip_grad(g, x, x, [](auto v, auto) {
        using T = decltype(v);
        const T cdf = T(0.5) * (T(1) + std::erf(v * static_cast<T>(M_SQRT1_2)));
        const T pdf = std::exp(T(-0.5) * v * v) * static_cast<T>(0.5 * M_2_SQRTPI * M_SQRT1_2);
        return cdf + v * pdf;
      })};
    };
  });
  return out;
}

Tensor silu(const Tensor& x) {
  Tensor out = unary("silu", x, [](auto v) {
    using T = decltype(v);
    return v / (T(1) + std::exp(-v));
  });
  maybe_record("silu", {x}, out, [=] {
    return [x](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{zip_grad(g, x, x, [](auto v, auto) {
        using T = decltype(v);
        const T s = T(1) / (T(1) + std::exp(-v));
        return s * (T(1) + v * (T(1) - s));
      })};
    };
  });
  return out;
}

Tensor softplus(const Tensor& x) {
  Tensor out = unary("softplus", x, [](auto v) {
    using T = decltype(v);
    return v > T(20) ? v : std::log1p(std::exp(v));
  });
  maybe_record("softplus", {x}, out, [=] {
    return [x](const Tensor& g, const std::vector<bool>&) {
      return std::vector<Tensor>{zip_grad(g, x, x, [](auto v, auto) {
        using T = decltype(v);
        return v >= 0 ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
      })};
    };
  });
  return out;
}

namespace {

struct MatmulPlan {
  Shape out_shape;
  std::int64_t M, K, N, batches;
  std::vector<std::int64_t> a_off, b_off;  // per output batch, element offsets
};

MatmulPlan plan_matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() < 2 || b.rank() < 2)
    throw ShapeError("matmul: operands need rank >= 2, got " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()));
  MatmulPlan p;
  p.M = a.dim(-2);
  p.K = a.dim(-1);
  p.N = b.dim(-1);
  if (b.dim(-2) != p.K)
    throw ShapeError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  Shape ab(a.shape().begin(), a.shape().end() - 2);
  Shape bb(b.shape().begin(), b.shape().end() - 2);
  Shape batch = broadcast_shape("matmul", ab, bb);
  p.batches = shape_numel(batch);
  p.out_shape = batch;
  p.out_shape.push_back(p.M);
  p.out_shape.push_back(p.N);
  const auto sa = detail::aligned_strides(ab, batch);
  const auto sb = detail::aligned_strides(bb, batch);
  p.a_off.resize(p.batches);
  p.b_off.resize(p.batches);
  std::vector<std::int64_t> idx(batch.size(), 0);
  for (std::int64_t i = 0; i < p.batches; ++i) {
    std::int64_t oa = 0, ob = 0;
    for (std::size_t d = 0; d < batch.size(); ++d) {
      oa += idx[d] * sa[d];
      ob += idx[d] * sb[d];
    }
    p.a_off[i] = oa * p.M * p.K;
    p.b_off[i] = ob * p.K * p.N;
    for (int d = static_cast<int>(batch.size()) - 1; d >= 0; --d) {
      if (++idx[d] < batch[d]) break;
      idx[d] = 0;
    }
  }
  return p;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  detail::require_defined("matmul", a);
  detail::require_defined("matmul", b);
  detail::require_same_dtype("matmul", a, b);
  Tensor out;
  if (b.rank() == 2 && a.rank() >= 2) {
    // Shared right operand: one GEMM over all leading rows.
    if (b.dim(0) != a.dim(-1))
      throw ShapeError("matmul: inner dimensions differ, " + shape_str(a.shape()) + " x " +
                       shape_str(b.shape()));
    Shape os = a.shape();
    os.back() = b.dim(1);
    out = Tensor::zeros(os, a.dtype());
    const std::int64_t rows = a.numel() / a.dim(-1);
    dispatch(a.dtype(), [&]<class T>() {
      detail::gemm<T>(false, false, rows, b.dim(1), b.dim(0), a.data<T>().data(), b.data<T>().data(),
                      out.mutable_data<T>().data(), false);
    });
    maybe_record("matmul", {a, b}, out, [=] {
      return [a, b](const Tensor& g, const std::vector<bool>& needs) {
        Tensor ga, gb;
        const std::int64_t rows = a.numel() / a.dim(-1);
        const std::int64_t K = b.dim(0), N = b.dim(1);
        dispatch(a.dtype(), [&]<class T>() {
          if (needs[0]) {
            ga = Tensor::zeros(a.shape(), a.dtype());
            detail::gemm<T>(false, true, rows, K, N, g.data<T>().data(), b.data<T>().data(),
                            ga.mutable_data<T>().data(), false);
          }
          if (needs[1]) {
            gb = Tensor::zeros(b.shape(), b.dtype());
            detail::gemm<T>(true, false, K, N, rows, a.data<T>().data(), g.data<T>().data(),
                            gb.mutable_data<T>().data(), false);
          }
        });
        return std::vector<Tensor>{ga, gb};
      };
    });
    return out;
  }

  const MatmulPlan p = plan_matmul(a, b);
  out = Tensor::zeros(p.out_shape, a.dtype());
  dispatch(a.dtype(), [&]<class T>() {
    const T* pa = a.data<T>().data();
    const T* pb = b.data<T>().data();
    T* po = out.mutable_data<T>().data();
    for (std::int64_t i = 0; i < p.batches; ++i)
      detail::gemm<T>(false, false, p.M, p.N, p.K, pa + p.a_off[i], pb + p.b_off[i], po + i * p.M * p.N,
                      false);
  });
  maybe_record("matmul", {a, b}, out, [=] {
    return [a, b, p](const Tensor& g, const std::vector<bool>& needs) {
      Tensor ga, gb;
      dispatch(a.dtype(), [&]<class T>() {
        const T* pg = g.data<T>().data();
        if (needs[0]) {
          Shape full(p.out_shape.begin(), p.out_shape.end() - 2);
          full.push_back(p.M);
          full.push_back(p.K);
          Tensor acc = Tensor::zeros(full, a.dtype());
          T* pacc = acc.mutable_data<T>().data();
          for (std::int64_t i = 0; i < p.batches; ++i)
            detail::gemm<T>(false, true, p.M, p.K, p.N, pg + i * p.M * p.N, b.data<T>().data() + p.b_off[i],
                            pacc + i * p.M * p.K, false);
          ga = sum_to(acc, a.shape());
        }
        if (needs[1]) {
          Shape full(p.out_shape.begin(), p.out_shape.end() - 2);
          full.push_back(p.K);
          full.push_back(p.N);
          Tensor acc = Tensor::zeros(full, b.dtype());
          T* pacc = acc.mutable_data<T>().data();
          for (std::int64_t i = 0; i < p.batches; ++i)
            detail::gemm<T>(true, false, p.K, p.N, p.M, a.data<T>().data() + p.a_off[i], pg + i * p.M * p.N,
                            pacc + i * p.K * p.N, false);
          gb = sum_to(acc, b.shape());
        }
      });
      return std::vector<Tensor>{ga, gb};
    };
  });
  return out;
}

}  // namespace ops
}  // namespace nnuzoo
