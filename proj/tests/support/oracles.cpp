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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace nnuzoo::testing {

Tensor random_tensor(const Shape& shape, std::uint64_t seed, DType dtype, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(static_cast<std::size_t>(shape_numel(shape)));
  for (auto& e : v) e = dist(rng);
  return Tensor::from_vector(shape, v, dtype);
}

std::vector<double> conv2d_oracle(const std::vector<double>& x, const Shape& xs, const std::vector<double>& w,
                                  const Shape& ws, const std::vector<double>* bias, int stride, int pad, int dil,
                                  int groups, Shape* out_shape) {
  const auto B = xs[0], C = xs[1], H = xs[2], W = xs[3];
  const auto O = ws[0], Cg = ws[1], kh = ws[2], kw = ws[3];
  const auto Og = O / groups;
  const auto Ho = (H + 2 * pad - dil * (kh - 1) - 1) / stride + 1;
  const auto Wo = (W + 2 * pad - dil * (kw - 1) - 1) / stride + 1;
  *out_shape = {B, O, Ho, Wo};
  std::vector<double> y(static_cast<std::size_t>(B * O * Ho * Wo), 0.0);
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t o = 0; o < O; ++o) {
      const auto g = o / Og;
      for (std::int64_t oy = 0; oy < Ho; ++oy)
        for (std::int64_t ox = 0; ox < Wo; ++ox) {
          double acc = bias ? (*bias)[o] : 0.0;
          for (std::int64_t c = 0; c < Cg; ++c)
            for (std::int64_t i = 0; i < kh; ++i)
              for (std::int64_t j = 0; j < kw; ++j) {
                const auto iy = oy * stride - pad + i * dil;
                const auto ix = ox * stride - pad + j * dil;
                if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
                const auto cin = g * Cg + c;
                acc += x[((b * C + cin) * H + iy) * W + ix] * w[((o * Cg + c) * kh + i) * kw + j];
              }
          y[((b * O + o) * Ho + oy) * Wo + ox] = acc;
        }
    }
  return y;
}

std::vector<double> conv_transpose2d_oracle(const std::vector<double>& x, const Shape& xs,
                                            const std::vector<double>& w, const Shape& ws,
                                            const std::vector<double>* bias, int stride, int pad,
                                            Shape* out_shape) {
  const auto B = xs[0], Cin = xs[1], H = xs[2], W = xs[3];
  const auto Cout = ws[1], kh = ws[2], kw = ws[3];
  const auto Ho = (H - 1) * stride - 2 * pad + kh;
  const auto Wo = (W - 1) * stride - 2 * pad + kw;
  *out_shape = {B, Cout, Ho, Wo};
  std::vector<double> y(static_cast<std::size_t>(B * Cout * Ho * Wo), 0.0);
  for (std::int64_t b = 0; b < B; ++b)
    for (std::int64_t ci = 0; ci < Cin; ++ci)
      for (std::int64_t iy = 0; iy < H; ++iy)
        for (std::int64_t ix = 0; ix < W; ++ix)
          for (std::int64_t co = 0; co < Cout; ++co)
            for (std::int64_t i = 0; i < kh; ++i)
              for (std::int64_t j = 0; j < kw; ++j) {
                const auto oy = iy * stride - pad + i;
                const auto ox = ix * stride - pad + j;
                if (oy < 0 || oy >= Ho || ox < 0 || ox >= Wo) continue;
                y[((b * Cout + co) * Ho + oy) * Wo + ox] +=
                    x[((b * Cin + ci) * H + iy) * W + ix] * w[((ci * Cout + co) * kh + i) * kw + j];
              }
  if (bias)
    for (std::int64_t b = 0; b < B; ++b)
      for (std::int64_t co = 0; co < Cout; ++co)
        for (std::int64_t k = 0; k < Ho * Wo; ++k) y[(b * Cout + co) * Ho * Wo + k] += (*bias)[co];
  return y;
}

double gelu_ref(double v) { return 0.5 * v * (1.0 + std::erf(v / std::sqrt(2.0))); }

double silu_ref(double v) { return v / (1.0 + std::exp(-v)); }

std::vector<double> layer_norm_rows_ref(const std::vector<double>& x, std::int64_t rows, std::int64_t cols,
                                        double eps) {
  std::vector<double> y(x.size());
  for (std::int64_t r = 0; r < rows; ++r) {
    double m = 0.0;
    for (std::int64_t c = 0; c < cols; ++c) m += x[r * cols + c];
    m /= static_cast<double>(cols);
    double v = 0.0;
    for (std::int64_t c = 0; c < cols; ++c) v += (x[r * cols + c] - m) * (x[r * cols + c] - m);
    v /= static_cast<double>(cols);
    for (std::int64_t c = 0; c < cols; ++c) y[r * cols + c] = (x[r * cols + c] - m) / std::sqrt(v + eps);
  }
  return y;
}

double dot(const Tensor& a, const Tensor& b) {
  const auto va = a.to_vector();
  const auto vb = b.to_vector();
  double s = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
  return s;
}

std::vector<double> scan_ref(const std::vector<double>& x, const std::vector<double>& delta,
                             const std::vector<double>& A, const std::vector<double>& Bm,
                             const std::vector<double>& Cm, const std::vector<double>& D, std::int64_t Bt,
                             std::int64_t L, std::int64_t E, std::int64_t N) {
  std::vector<double> y(x.size(), 0.0);
  for (std::int64_t b = 0; b < Bt; ++b)
    for (std::int64_t e = 0; e < E; ++e) {
      std::vector<double> h(static_cast<std::size_t>(N), 0.0);
      for (std::int64_t t = 0; t < L; ++t) {
        const auto r = b * L + t;
        const double dt = delta[r * E + e], xv = x[r * E + e];
        double out = D.empty() ? 0.0 : D[e] * xv;
        for (std::int64_t n = 0; n < N; ++n) {
          h[n] = std::exp(dt * A[e * N + n]) * h[n] + dt * Bm[r * N + n] * xv;
          out += Cm[r * N + n] * h[n];
        }
        y[r * E + e] = out;
      }
    }
  return y;
}

std::vector<double> ss2d_direction_ref(const std::vector<double>& x, std::int64_t Bt, std::int64_t E, std::int64_t H,
                                       std::int64_t W, const ScanProjRef& p, int direction) {
  const std::int64_t L = H * W, R = p.R, N = p.N, P = R + 2 * N;
  // grid (row, col) for each sequence position
  std::vector<std::pair<std::int64_t, std::int64_t>> pos(static_cast<std::size_t>(L));
  for (std::int64_t s = 0; s < L; ++s) {
    const std::int64_t k = direction % 2 == 1 ? L - 1 - s : s;
    pos[s] = direction < 2 ? std::make_pair(k / W, k % W) : std::make_pair(k % H, k / H);
  }
  std::vector<double> seq(static_cast<std::size_t>(Bt * L * E)), delta(seq.size());
  std::vector<double> Bm(static_cast<std::size_t>(Bt * L * N)), Cm(Bm.size());
  for (std::int64_t b = 0; b < Bt; ++b)
    for (std::int64_t s = 0; s < L; ++s) {
      const auto [r, c] = pos[s];
      double* tok = &seq[(b * L + s) * E];
      for (std::int64_t e = 0; e < E; ++e) tok[e] = x[((b * E + e) * H + r) * W + c];
      std::vector<double> proj(static_cast<std::size_t>(P), 0.0);
      for (std::int64_t j = 0; j < P; ++j)
        for (std::int64_t e = 0; e < E; ++e) proj[j] += tok[e] * p.x_proj[e * P + j];
      for (std::int64_t e = 0; e < E; ++e) {
        double z = p.dt_bias[e];
        for (std::int64_t k = 0; k < R; ++k) z += proj[k] * p.dt_proj[k * E + e];
        delta[(b * L + s) * E + e] = std::log1p(std::exp(z));
      }
      for (std::int64_t n = 0; n < N; ++n) {
        Bm[(b * L + s) * N + n] = proj[R + n];
        Cm[(b * L + s) * N + n] = proj[R + N + n];
      }
    }
  std::vector<double> A(p.A_log.size());
  for (std::size_t i = 0; i < A.size(); ++i) A[i] = -std::exp(p.A_log[i]);
  const auto ys = scan_ref(seq, delta, A, Bm, Cm, p.D, Bt, L, E, N);
  std::vector<double> out(x.size());
  for (std::int64_t b = 0; b < Bt; ++b)
    for (std::int64_t s = 0; s < L; ++s) {
      const auto [r, c] = pos[s];
      for (std::int64_t e = 0; e < E; ++e) out[((b * E + e) * H + r) * W + c] = ys[(b * L + s) * E + e];
    }
  return out;
}

std::vector<double> mhsa_ref(const std::vector<double>& x, std::int64_t Bt, std::int64_t L, std::int64_t C, int heads,
                             const std::vector<double>& qw, const std::vector<double>& kw,
                             const std::vector<double>& vw, const std::vector<double>& ow,
                             const std::vector<double>& qb, const std::vector<double>& kb,
                             const std::vector<double>& vb, const std::vector<double>& ob,
                             const std::function<double(int, std::int64_t, std::int64_t)>& logit_bias) {
  auto proj = [&](const std::vector<double>& w, const std::vector<double>& bias) {
    std::vector<double> r(static_cast<std::size_t>(Bt * L * C), 0.0);
    for (std::int64_t i = 0; i < Bt * L; ++i)
      for (std::int64_t o = 0; o < C; ++o) {
        double acc = bias.empty() ? 0.0 : bias[o];
        for (std::int64_t c = 0; c < C; ++c) acc += x[i * C + c] * w[c * C + o];
        r[i * C + o] = acc;
      }
    return r;
  };
  const auto q = proj(qw, qb), k = proj(kw, kb), v = proj(vw, vb);
  const std::int64_t d = C / heads;
  std::vector<double> mid(q.size(), 0.0);
  for (std::int64_t b = 0; b < Bt; ++b)
    for (int h = 0; h < heads; ++h)
      for (std::int64_t i = 0; i < L; ++i) {
        std::vector<double> s(static_cast<std::size_t>(L));
        double mx = -1e300;
        for (std::int64_t j = 0; j < L; ++j) {
          double acc = 0.0;
          for (std::int64_t t = 0; t < d; ++t) acc += q[(b * L + i) * C + h * d + t] * k[(b * L + j) * C + h * d + t];
          s[j] = acc / std::sqrt(static_cast<double>(d));
          if (logit_bias) s[j] += logit_bias(h, i, j);
          mx = std::max(mx, s[j]);
        }
        double z = 0.0;
        for (auto& e : s) z += (e = std::exp(e - mx));
        for (std::int64_t j = 0; j < L; ++j)
          for (std::int64_t t = 0; t < d; ++t) mid[(b * L + i) * C + h * d + t] += s[j] / z * v[(b * L + j) * C + h * d + t];
      }
  std::vector<double> out(mid.size(), 0.0);
  for (std::int64_t i = 0; i < Bt * L; ++i)
    for (std::int64_t o = 0; o < C; ++o) {
      double acc = ob.empty() ? 0.0 : ob[o];
      for (std::int64_t c = 0; c < C; ++c) acc += mid[i * C + c] * ow[c * C + o];
      out[i * C + o] = acc;
    }
  return out;
}

}  // namespace nnuzoo::testing
