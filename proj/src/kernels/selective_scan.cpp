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

#include "nnuzoo/kernels/selective_scan.hpp"

#include <cmath>
#include <memory>

#include "nnuzoo/tensor/ops.hpp"
#include "nnuzoo/tensor/parallel.hpp"
#include "tensor/internal.hpp"

namespace nnuzoo::kernels {

namespace {

struct Dims {
  std::int64_t batch, len, inner, state;
};

Dims validate(const Tensor& x, const ScanParams& p) {
  for (const Tensor* t : {&x, &p.delta, &p.A, &p.B, &p.C}) detail::require_defined("selective_scan", *t);
  if (x.rank() != 3) throw ShapeError("selective_scan: x must be B×L×E, got " + shape_str(x.shape()));
  const Dims d{x.dim(0), x.dim(1), x.dim(2), p.A.rank() == 2 ? p.A.dim(1) : -1};
  if (d.len == 0) throw ValueError("selective_scan: empty sequence (L = 0)");
  if (p.delta.shape() != x.shape())
    throw ShapeError("selective_scan: delta " + shape_str(p.delta.shape()) + " vs x " + shape_str(x.shape()));
  if (p.A.shape() != Shape{d.inner, d.state}) throw ShapeError("selective_scan: A must be E×N, got " + shape_str(p.A.shape()));
  const Shape bc{d.batch, d.len, d.state};
  if (p.B.shape() != bc || p.C.shape() != bc)
    throw ShapeError("selective_scan: B/C must be " + shape_str(bc) + ", got " + shape_str(p.B.shape()) + " and " +
                     shape_str(p.C.shape()));
  if (p.D.defined() && p.D.shape() != Shape{d.inner})
    throw ShapeError("selective_scan: D must have shape [E], got " + shape_str(p.D.shape()));
  for (const Tensor* t : {&p.delta, &p.A, &p.B, &p.C}) detail::require_same_dtype("selective_scan", x, *t);
  if (p.D.defined()) detail::require_same_dtype("selective_scan", x, p.D);
  dispatch(x.dtype(), [&]<class T>() {
    for (T v : p.delta.data<T>())
      if (!(v > T(0))) throw ValueError("selective_scan: delta must be strictly positive");
  });
  return d;
}

bool will_record(std::initializer_list<const Tensor*> inputs) {
  Tape* tape = Tape::active();
  if (!tape) return false;
  for (const Tensor* t : inputs)
    if (t->defined() && tape->tracks(*t)) return true;
  return false;
}

}  // namespace

Tensor selective_scan(const Tensor& x, const ScanParams& p) {
  const Dims d = validate(x, p);
  const bool record = will_record({&x, &p.delta, &p.A, &p.B, &p.C, &p.D});
  const std::int64_t EN = d.inner * d.state;
  Tensor y = Tensor::zeros(x.shape(), x.dtype());
  // All hidden states h_1..h_L per sample, kept only when a backward pass may follow.
  Tensor hist = record ? Tensor::zeros({d.batch, d.len, d.inner, d.state}, x.dtype()) : Tensor();

  dispatch(x.dtype(), [&]<class T>() {
    const T* px = x.data<T>().data();
    const T* pdt = p.delta.data<T>().data();
    const T* pA = p.A.data<T>().data();
    const T* pB = p.B.data<T>().data();
    const T* pC = p.C.data<T>().data();
    const T* pD = p.D.defined() ? p.D.data<T>().data() : nullptr;
    T* py = y.mutable_data<T>().data();
    T* ph = record ? hist.mutable_data<T>().data() : nullptr;
    parallel_for(d.batch, [&](std::int64_t b) {
      std::vector<T> h(static_cast<std::size_t>(EN), T(0));
      for (std::int64_t t = 0; t < d.len; ++t) {
        const std::int64_t row = (b * d.len + t);
        const T* xt = px + row * d.inner;
        const T* dt = pdt + row * d.inner;
        const T* Bt = pB + row * d.state;
        const T* Ct = pC + row * d.state;
        T* yt = py + row * d.inner;
        for (std::int64_t e = 0; e < d.inner; ++e) {
          T* he = h.data() + e * d.state;
          const T* Ae = pA + e * d.state;
          const T dx = dt[e] * xt[e];
          T acc = 0;
          for (std::int64_t n = 0; n < d.state; ++n) {
            he[n] = std::exp(dt[e] * Ae[n]) * he[n] + dx * Bt[n];
            acc += Ct[n] * he[n];
          }
          yt[e] = acc + (pD ? pD[e] * xt[e] : T(0));
        }
        if (ph) std::copy(h.begin(), h.end(), ph + row * EN);
      }
    });
  });

  if (!record) {
    detail::check_finite("selective_scan", y);
    return y;
  }
  std::vector<Tensor> inputs{x, p.delta, p.A, p.B, p.C};
  if (p.D.defined()) inputs.push_back(p.D);
  detail::maybe_record_list("selective_scan", inputs, y, [&] {
    return [x, p, hist, d, EN](const Tensor& g, const std::vector<bool>&) {
      Tensor gx = Tensor::zeros(x.shape(), x.dtype());
      Tensor gdt = Tensor::zeros(x.shape(), x.dtype());
      Tensor gB = Tensor::zeros(p.B.shape(), x.dtype());
      Tensor gC = Tensor::zeros(p.C.shape(), x.dtype());
      // Per-sample partials of the shared parameters, reduced in batch order.
      Tensor gA_parts = Tensor::zeros({d.batch, d.inner, d.state}, x.dtype());
      Tensor gD_parts = Tensor::zeros({d.batch, d.inner}, x.dtype());
      dispatch(x.dtype(), [&]<class T>() {
        const T* px = x.data<T>().data();
        const T* pdt = p.delta.data<T>().data();
        const T* pA = p.A.data<T>().data();
        const T* pB = p.B.data<T>().data();
        const T* pC = p.C.data<T>().data();
        const T* pD = p.D.defined() ? p.D.data<T>().data() : nullptr;
        const T* ph = hist.data<T>().data();
        const T* pg = g.data<T>().data();
        T* gxp = gx.mutable_data<T>().data();
        T* gdtp = gdt.mutable_data<T>().data();
        T* gBp = gB.mutable_data<T>().data();
        T* gCp = gC.mutable_data<T>().data();
        T* gAp = gA_parts.mutable_data<T>().data();
        T* gDp = gD_parts.mutable_data<T>().data();
        parallel_for(d.batch, [&](std::int64_t b) {
          std::vector<T> gh(static_cast<std::size_t>(EN), T(0));
          T* gA = gAp + b * EN;
          T* gD = gDp + b * d.inner;
          for (std::int64_t t = d.len - 1; t >= 0; --t) {
            const std::int64_t row = b * d.len + t;
            const T* xt = px + row * d.inner;
            const T* dt = pdt + row * d.inner;
            const T* Bt = pB + row * d.state;
            const T* Ct = pC + row * d.state;
            const T* ht = ph + row * EN;
            const T* hprev = t > 0 ? ph + (row - 1) * EN : nullptr;
            const T* gy = pg + row * d.inner;
            T* gxt = gxp + row * d.inner;
            T* gdtt = gdtp + row * d.inner;
            T* gBt = gBp + row * d.state;
            T* gCt = gCp + row * d.state;
            for (std::int64_t e = 0; e < d.inner; ++e) {
              const T* he = ht + e * d.state;
              const T* Ae = pA + e * d.state;
              T* ghe = gh.data() + e * d.state;
              T* gAe = gA + e * d.state;
              if (pD) {
                gD[e] += gy[e] * xt[e];
                gxt[e] += gy[e] * pD[e];
              }
              T gdelta = 0, gxe = 0;
              const T dx = dt[e] * xt[e];
              for (std::int64_t n = 0; n < d.state; ++n) {
                gCt[n] += gy[e] * he[n];
                const T gn = ghe[n] + gy[e] * Ct[n];
                const T a = std::exp(dt[e] * Ae[n]);
                if (hprev) {
                  const T ga = gn * hprev[e * d.state + n] * a;
                  gdelta += ga * Ae[n];
                  gAe[n] += ga * dt[e];
                }
                gdelta += gn * Bt[n] * xt[e];
                gBt[n] += gn * dx;
                gxe += gn * Bt[n];
                ghe[n] = gn * a;
              }
              gdtt[e] += gdelta;
              gxt[e] += gxe * dt[e];
            }
          }
        });
      });
      std::vector<Tensor> grads{gx, gdt, ops::sum(gA_parts, {0}), gB, gC};
      if (p.D.defined()) grads.push_back(ops::sum(gD_parts, {0}));
      return grads;
    };
  });
  return y;
}

}  // namespace nnuzoo::kernels
