#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "mfdiff/core/error.hpp"
#include "mfdiff/core/gemm.hpp"
#include "mfdiff/core/rng.hpp"
#include "mfdiff/core/tensor.hpp"

// Layers for the conditional U-Net. Activations are (batch, height, width,
// channels); every layer provides an explicit backward pass that accumulates
// parameter gradients in place and returns the input gradient.

namespace mfdiff::nn {

template <class Real>
struct Workspace {
  std::vector<Real> col;   // im2col scratch
  std::vector<Real> dcol;  // col gradient scratch
};

template <class Real>
void fanin_uniform_init(std::vector<Real>& w, std::size_t fan_in, Rng& rng) {
  const Real bound = Real(1) / std::sqrt(static_cast<Real>(fan_in));
  rng.fill_uniform(std::span<Real>(w), -bound, bound);
}

template <class Real>
Real sigmoid(Real x) {
  return Real(1) / (Real(1) + std::exp(-x));
}

// swish(x) = x * sigmoid(x)
template <class Real>
Tensor<Real> swish(const Tensor<Real>& x) {
  Tensor<Real> y = x;
  Real* p = y.data();
  for (std::size_t i = 0; i < y.size(); ++i) p[i] *= sigmoid(p[i]);
  return y;
}

// dx given upstream dy and cached pre-activation x.
template <class Real>
Tensor<Real> swish_backward(const Tensor<Real>& dy, const Tensor<Real>& x) {
  Tensor<Real> dx = dy;
  Real* d = dx.data();
  const Real* xp = x.data();
  for (std::size_t i = 0; i < dx.size(); ++i) {
    const Real s = sigmoid(xp[i]);
    d[i] *= s * (Real(1) + xp[i] * (Real(1) - s));
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Dense: rows are samples. y = x W + b with W stored (in x out) row-major.
// ---------------------------------------------------------------------------
template <class Real>
struct Dense {
  int in = 0, out = 0;
  std::vector<Real> w, b;
  std::vector<Real> gw, gb;

  Dense() = default;
  Dense(int in_, int out_, Rng& rng, bool zero_init = false) : in(in_), out(out_) {
    w.assign(static_cast<std::size_t>(in) * out, Real(0));
    b.assign(static_cast<std::size_t>(out), Real(0));
    gw.assign(w.size(), Real(0));
    gb.assign(b.size(), Real(0));
    if (!zero_init) fanin_uniform_init(w, static_cast<std::size_t>(in), rng);
  }

  struct Cache {
    Tensor<Real> x;
  };

  Tensor<Real> forward(const Tensor<Real>& x, Cache* cache = nullptr) const {
    if (x.rank() != 2 || x.dim(1) != in)
      throw ContractError("Dense: input must be (batch, " + std::to_string(in) + "), got " + x.shape_str());
    const int m = x.dim(0);
    Tensor<Real> y({m, out});
    gemm<Real>(false, false, m, out, in, Real(1), x.data(), w.data(), Real(0), y.data());
    for (int i = 0; i < m; ++i) {
      Real* row = y.data() + static_cast<std::size_t>(i) * out;
      for (int j = 0; j < out; ++j) row[j] += b[static_cast<std::size_t>(j)];
    }
    if (cache) cache->x = x;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy, const Cache& cache) {
    const int m = dy.dim(0);
    gemm<Real>(true, false, in, out, m, Real(1), cache.x.data(), dy.data(), Real(1), gw.data());
    for (int i = 0; i < m; ++i) {
      const Real* row = dy.data() + static_cast<std::size_t>(i) * out;
      for (int j = 0; j < out; ++j) gb[static_cast<std::size_t>(j)] += row[j];
    }
    Tensor<Real> dx({m, in});
    gemm<Real>(false, true, m, in, out, Real(1), dy.data(), w.data(), Real(0), dx.data());
    return dx;
  }

  template <class Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    fn(prefix + ".w", w, gw);
    fn(prefix + ".b", b, gb);
  }
};

// ---------------------------------------------------------------------------
// Conv2d: 3x3 zero-padded or 1x1, stride 1, NHWC. Kernel stored as a
// (k*k*cin x cout) matrix whose rows follow the im2col tap order.
// ---------------------------------------------------------------------------
template <class Real>
struct Conv2d {
  int cin = 0, cout = 0, ksize = 3;
  std::vector<Real> w, b;
  std::vector<Real> gw, gb;

  Conv2d() = default;
  Conv2d(int cin_, int cout_, int ksize_, Rng& rng, bool zero_init = false)
      : cin(cin_), cout(cout_), ksize(ksize_) {
    if (ksize != 1 && ksize != 3) throw ConfigError("Conv2d: kernel size must be 1 or 3");
    w.assign(static_cast<std::size_t>(ksize) * ksize * cin * cout, Real(0));
    b.assign(static_cast<std::size_t>(cout), Real(0));
    gw.assign(w.size(), Real(0));
    gb.assign(b.size(), Real(0));
    if (!zero_init) fanin_uniform_init(w, static_cast<std::size_t>(ksize) * ksize * cin, rng);
  }

  struct Cache {
    Tensor<Real> x;
  };

  // col has one row of k*k*cin values per output pixel.
  void im2col(const Tensor<Real>& x, std::vector<Real>& col) const {
    const int n = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const std::size_t row_len = 9u * static_cast<std::size_t>(cin);
    col.assign(static_cast<std::size_t>(n) * h * wd * row_len, Real(0));
    const std::size_t strip = 3u * static_cast<std::size_t>(cin);  // one tap row: 3 taps x cin
    for (int nn = 0; nn < n; ++nn)
      for (int i = 0; i < h; ++i) {
        Real* row0 = col.data() + ((static_cast<std::size_t>(nn) * h + i) * wd) * row_len;
        for (int dy = -1; dy <= 1; ++dy) {
          const int src_i = i + dy;
          if (src_i < 0 || src_i >= h) continue;
          const Real* src = &x.at4(nn, src_i, 0, 0);
          const std::size_t tap_off = static_cast<std::size_t>(dy + 1) * strip;
          // interior columns: contiguous 3*cin copy
          for (int j = 1; j + 1 < wd; ++j)
            std::memcpy(row0 + static_cast<std::size_t>(j) * row_len + tap_off,
                        src + static_cast<std::size_t>(j - 1) * cin, strip * sizeof(Real));
          // j = 0: taps -1 missing
          std::memcpy(row0 + tap_off + static_cast<std::size_t>(cin), src,
                      2u * static_cast<std::size_t>(cin) * sizeof(Real));
          // j = wd-1: tap +1 missing
          if (wd > 1)
            std::memcpy(row0 + static_cast<std::size_t>(wd - 1) * row_len + tap_off,
                        src + static_cast<std::size_t>(wd - 2) * cin,
                        2u * static_cast<std::size_t>(cin) * sizeof(Real));
        }
      }
  }

  // Adjoint of im2col: scatter-add column gradients back onto pixels.
  void col2im_add(const std::vector<Real>& dcol, Tensor<Real>& dx) const {
    const int n = dx.dim(0), h = dx.dim(1), wd = dx.dim(2);
    const std::size_t row_len = 9u * static_cast<std::size_t>(cin);
    for (int nn = 0; nn < n; ++nn)
      for (int i = 0; i < h; ++i)
        for (int j = 0; j < wd; ++j) {
          const Real* row =
              dcol.data() + ((static_cast<std::size_t>(nn) * h + i) * wd + j) * row_len;
          for (int dy = -1; dy <= 1; ++dy) {
            const int si = i + dy;
            if (si < 0 || si >= h) continue;
            for (int dxo = -1; dxo <= 1; ++dxo) {
              const int sj = j + dxo;
              if (sj < 0 || sj >= wd) continue;
              const Real* src = row + (static_cast<std::size_t>(dy + 1) * 3 + (dxo + 1)) * cin;
              Real* dst = &dx.at4(nn, si, sj, 0);
              for (int c = 0; c < cin; ++c) dst[c] += src[c];
            }
          }
        }
  }

  Tensor<Real> forward(const Tensor<Real>& x, Workspace<Real>& ws, Cache* cache = nullptr) const {
    if (x.rank() != 4 || x.dim(3) != cin)
      throw ContractError("Conv2d: expected (n,h,w," + std::to_string(cin) + "), got " + x.shape_str());
    const int n = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const int pixels = n * h * wd;
    Tensor<Real> y({n, h, wd, cout});
    if (ksize == 1) {
      gemm<Real>(false, false, pixels, cout, cin, Real(1), x.data(), w.data(), Real(0), y.data());
    } else {
      im2col(x, ws.col);
      gemm<Real>(false, false, pixels, cout, 9 * cin, Real(1), ws.col.data(), w.data(), Real(0),
                 y.data());
    }
    Real* yp = y.data();
    for (int p = 0; p < pixels; ++p) {
      Real* row = yp + static_cast<std::size_t>(p) * cout;
      for (int c = 0; c < cout; ++c) row[c] += b[static_cast<std::size_t>(c)];
    }
    if (cache) cache->x = x;
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy, Workspace<Real>& ws, const Cache& cache) {
    const Tensor<Real>& x = cache.x;
    const int n = x.dim(0), h = x.dim(1), wd = x.dim(2);
    const int pixels = n * h * wd;
    const Real* dyp = dy.data();
    for (int p = 0; p < pixels; ++p) {
      const Real* row = dyp + static_cast<std::size_t>(p) * cout;
      for (int c = 0; c < cout; ++c) gb[static_cast<std::size_t>(c)] += row[c];
    }
    Tensor<Real> dx({n, h, wd, cin});
    if (ksize == 1) {
      gemm<Real>(true, false, cin, cout, pixels, Real(1), x.data(), dy.data(), Real(1), gw.data());
      gemm<Real>(false, true, pixels, cin, cout, Real(1), dy.data(), w.data(), Real(0), dx.data());
    } else {
      im2col(x, ws.col);
      gemm<Real>(true, false, 9 * cin, cout, pixels, Real(1), ws.col.data(), dy.data(), Real(1),
                 gw.data());
      ws.dcol.assign(static_cast<std::size_t>(pixels) * 9 * cin, Real(0));
      gemm<Real>(false, true, pixels, 9 * cin, cout, Real(1), dy.data(), w.data(), Real(0),
                 ws.dcol.data());
      col2im_add(ws.dcol, dx);
    }
    return dx;
  }

  template <class Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    fn(prefix + ".w", w, gw);
    fn(prefix + ".b", b, gb);
  }
};

// ---------------------------------------------------------------------------
// GroupNorm over (h, w, channels-in-group) per sample, with per-channel affine.
// ---------------------------------------------------------------------------
template <class Real>
struct GroupNorm {
  int channels = 0, groups = 0;
  Real eps = Real(1e-5);
  std::vector<Real> gamma, beta;
  std::vector<Real> ggamma, gbeta;

  GroupNorm() = default;
  GroupNorm(int channels_, int groups_) : channels(channels_), groups(groups_) {
    if (groups < 1 || channels % groups != 0)
      throw ConfigError("GroupNorm: channels (" + std::to_string(channels) +
                        ") must be divisible by groups (" + std::to_string(groups) + ")");
    gamma.assign(static_cast<std::size_t>(channels), Real(1));
    beta.assign(static_cast<std::size_t>(channels), Real(0));
    ggamma.assign(gamma.size(), Real(0));
    gbeta.assign(beta.size(), Real(0));
  }

  struct Cache {
    Tensor<Real> xhat;
    std::vector<Real> invstd;  // n * groups
  };

  Tensor<Real> forward(const Tensor<Real>& x, Cache* cache = nullptr) const {
    const int n = x.dim(0), h = x.dim(1), wd = x.dim(2);
    if (x.dim(3) != channels) throw ContractError("GroupNorm: channel mismatch");
    const int cpg = channels / groups;
    Tensor<Real> y({n, h, wd, channels});
    std::vector<Real> invstd(static_cast<std::size_t>(n) * groups);
    const std::size_t plane = static_cast<std::size_t>(h) * wd;
    const double m = static_cast<double>(plane) * cpg;
    for (int nn = 0; nn < n; ++nn) {
      const Real* xb = &x.at4(nn, 0, 0, 0);
      Real* yb = &y.at4(nn, 0, 0, 0);
      for (int g = 0; g < groups; ++g) {
        const int c0 = g * cpg;
        double sum = 0, sum2 = 0;
        for (std::size_t p = 0; p < plane; ++p) {
          const Real* px = xb + p * channels + c0;
          for (int c = 0; c < cpg; ++c) {
            const double v = static_cast<double>(px[c]);
            sum += v;
            sum2 += v * v;
          }
        }
        const double mean = sum / m;
        const double var = sum2 / m - mean * mean;
        const Real istd = static_cast<Real>(1.0 / std::sqrt(var + static_cast<double>(eps)));
        invstd[static_cast<std::size_t>(nn) * groups + g] = istd;
        for (std::size_t p = 0; p < plane; ++p) {
          const Real* px = xb + p * channels + c0;
          Real* py = yb + p * channels + c0;
          for (int c = 0; c < cpg; ++c)
            py[c] = (px[c] - static_cast<Real>(mean)) * istd;
        }
      }
    }
    if (cache) {
      cache->xhat = y;
      cache->invstd = invstd;
    }
    // affine
    Real* yp = y.data();
    const std::size_t pixels = static_cast<std::size_t>(n) * h * wd;
    for (std::size_t p = 0; p < pixels; ++p) {
      Real* row = yp + p * channels;
      for (int c = 0; c < channels; ++c) row[c] = row[c] * gamma[static_cast<std::size_t>(c)] + beta[static_cast<std::size_t>(c)];
    }
    return y;
  }

  Tensor<Real> backward(const Tensor<Real>& dy, const Cache& cache) {
    const Tensor<Real>& xhat = cache.xhat;
    const int n = dy.dim(0), h = dy.dim(1), wd = dy.dim(2);
    const int cpg = channels / groups;
    const std::size_t plane = static_cast<std::size_t>(h) * wd;
    const std::size_t pixels = static_cast<std::size_t>(n) * h * wd;

    const Real* dyp = dy.data();
    const Real* xh = xhat.data();
    for (std::size_t p = 0; p < pixels; ++p) {
      const Real* drow = dyp + p * channels;
      const Real* xrow = xh + p * channels;
      for (int c = 0; c < channels; ++c) {
        ggamma[static_cast<std::size_t>(c)] += drow[c] * xrow[c];
        gbeta[static_cast<std::size_t>(c)] += drow[c];
      }
    }

    Tensor<Real> dx({n, h, wd, channels});
    const double m = static_cast<double>(plane) * cpg;
    for (int nn = 0; nn < n; ++nn) {
      for (int g = 0; g < groups; ++g) {
        const int c0 = g * cpg;
        const Real istd = cache.invstd[static_cast<std::size_t>(nn) * groups + g];
        // dxhat = dy * gamma; reduce its mean and its projection on xhat.
        double sum_d = 0, sum_dx = 0;
        const std::size_t base = (static_cast<std::size_t>(nn) * plane) * channels;
        for (std::size_t p = 0; p < plane; ++p) {
          const Real* drow = dyp + base + p * channels + c0;
          const Real* xrow = xh + base + p * channels + c0;
          for (int c = 0; c < cpg; ++c) {
            const double dxh = static_cast<double>(drow[c]) * gamma[static_cast<std::size_t>(c0 + c)];
            sum_d += dxh;
            sum_dx += dxh * static_cast<double>(xrow[c]);
          }
        }
        const Real mean_d = static_cast<Real>(sum_d / m);
        const Real mean_dx = static_cast<Real>(sum_dx / m);
        for (std::size_t p = 0; p < plane; ++p) {
          const Real* drow = dyp + base + p * channels + c0;
          const Real* xrow = xh + base + p * channels + c0;
          Real* orow = dx.data() + base + p * channels + c0;
          for (int c = 0; c < cpg; ++c) {
            const Real dxh = drow[c] * gamma[static_cast<std::size_t>(c0 + c)];
            orow[c] = istd * (dxh - mean_d - xrow[c] * mean_dx);
          }
        }
      }
    }
    return dx;
  }

  template <class Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    fn(prefix + ".gamma", gamma, ggamma);
    fn(prefix + ".beta", beta, gbeta);
  }
};

// ---------------------------------------------------------------------------
// Single-head dot-product self-attention over spatial positions, residual.
// ---------------------------------------------------------------------------
template <class Real>
struct Attention {
  int channels = 0;
  Dense<Real> q, k, v, proj;

  Attention() = default;
  Attention(int channels_, Rng& rng)
      : channels(channels_),
        q(channels_, channels_, rng),
        k(channels_, channels_, rng),
        v(channels_, channels_, rng),
        proj(channels_, channels_, rng) {}

  struct Cache {
    typename Dense<Real>::Cache qc, kc, vc, pc;
    Tensor<Real> qv, kv, vv;  // projected tokens, (n*t, c)
    Tensor<Real> attn;        // (n, t, t) softmax weights
    int n = 0, t = 0;
  };

  // x viewed as (n, h*w, c) token matrices.
  Tensor<Real> forward(const Tensor<Real>& x, Cache* cache = nullptr) const {
    const int n = x.dim(0), h = x.dim(1), wd = x.dim(2);
    if (x.dim(3) != channels) throw ContractError("Attention: channel mismatch");
    const int t = h * wd;
    Tensor<Real> flat({n * t, channels});
    std::memcpy(flat.data(), x.data(), sizeof(Real) * x.size());

    Tensor<Real> qv = q.forward(flat, cache ? &cache->qc : nullptr);
    Tensor<Real> kv = k.forward(flat, cache ? &cache->kc : nullptr);
    Tensor<Real> vv = v.forward(flat, cache ? &cache->vc : nullptr);

    const Real scale = Real(1) / std::sqrt(static_cast<Real>(channels));
    Tensor<Real> attn({n, t, t});
    Tensor<Real> ov({n * t, channels});
    for (int nn = 0; nn < n; ++nn) {
      const Real* qs = qv.data() + static_cast<std::size_t>(nn) * t * channels;
      const Real* ks = kv.data() + static_cast<std::size_t>(nn) * t * channels;
      const Real* vs = vv.data() + static_cast<std::size_t>(nn) * t * channels;
      Real* as = attn.data() + static_cast<std::size_t>(nn) * t * t;
      gemm<Real>(false, true, t, t, channels, scale, qs, ks, Real(0), as);
      for (int i = 0; i < t; ++i) {
        Real* row = as + static_cast<std::size_t>(i) * t;
        Real mx = row[0];
        for (int j = 1; j < t; ++j) mx = std::max(mx, row[j]);
        Real sum = 0;
        for (int j = 0; j < t; ++j) {
          row[j] = std::exp(row[j] - mx);
          sum += row[j];
        }
        const Real inv = Real(1) / sum;
        for (int j = 0; j < t; ++j) row[j] *= inv;
      }
      gemm<Real>(false, false, t, channels, t, Real(1), as, vs, Real(0),
                 ov.data() + static_cast<std::size_t>(nn) * t * channels);
    }

    Tensor<Real> y = proj.forward(ov, cache ? &cache->pc : nullptr);
    // residual
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += flat[i];

    if (cache) {
      cache->qv = std::move(qv);
      cache->kv = std::move(kv);
      cache->vv = std::move(vv);
      cache->attn = std::move(attn);
      cache->n = n;
      cache->t = t;
    }
    Tensor<Real> out({n, h, wd, channels});
    std::memcpy(out.data(), y.data(), sizeof(Real) * y.size());
    return out;
  }

  Tensor<Real> backward(const Tensor<Real>& dy, Cache& cache) {
    const int n = dy.dim(0), h = dy.dim(1), wd = dy.dim(2);
    const int t = cache.t;
    Tensor<Real> dflat({n * t, channels});
    std::memcpy(dflat.data(), dy.data(), sizeof(Real) * dy.size());

    Tensor<Real> dov = proj.backward(dflat, cache.pc);

    const Real scale = Real(1) / std::sqrt(static_cast<Real>(channels));
    Tensor<Real> dq({n * t, channels}), dk({n * t, channels}), dv({n * t, channels});
    std::vector<Real> dattn(static_cast<std::size_t>(t) * t);
    for (int nn = 0; nn < n; ++nn) {
      const std::size_t off = static_cast<std::size_t>(nn) * t * channels;
      const Real* as = cache.attn.data() + static_cast<std::size_t>(nn) * t * t;
      const Real* vs = cache.vv.data() + off;
      const Real* qs = cache.qv.data() + off;
      const Real* ks = cache.kv.data() + off;
      const Real* dos = dov.data() + off;
      // dV = A^T dO ; dA = dO V^T
      gemm<Real>(true, false, t, channels, t, Real(1), as, dos, Real(0), dv.data() + off);
      gemm<Real>(false, true, t, t, channels, Real(1), dos, vs, Real(0), dattn.data());
      // softmax backward, rows
      for (int i = 0; i < t; ++i) {
        Real* drow = dattn.data() + static_cast<std::size_t>(i) * t;
        const Real* arow = as + static_cast<std::size_t>(i) * t;
        Real acc = 0;
        for (int j = 0; j < t; ++j) acc += drow[j] * arow[j];
        for (int j = 0; j < t; ++j) drow[j] = arow[j] * (drow[j] - acc);
      }
      // dQ = dS K * scale ; dK = dS^T Q * scale
      gemm<Real>(false, false, t, channels, t, scale, dattn.data(), ks, Real(0), dq.data() + off);
      gemm<Real>(true, false, t, channels, t, scale, dattn.data(), qs, Real(0), dk.data() + off);
    }

    Tensor<Real> dx_flat = q.backward(dq, cache.qc);
    {
      Tensor<Real> tmp = k.backward(dk, cache.kc);
      axpy(Real(1), tmp, dx_flat);
    }
    {
      Tensor<Real> tmp = v.backward(dv, cache.vc);
      axpy(Real(1), tmp, dx_flat);
    }
    // residual path
    axpy(Real(1), dflat, dx_flat);

    Tensor<Real> dx({n, h, wd, channels});
    std::memcpy(dx.data(), dx_flat.data(), sizeof(Real) * dx.size());
    return dx;
  }

  template <class Fn>
  void visit(const std::string& prefix, Fn&& fn) {
    q.visit(prefix + ".q", fn);
    k.visit(prefix + ".k", fn);
    v.visit(prefix + ".v", fn);
    proj.visit(prefix + ".proj", fn);
  }
};

// ---------------------------------------------------------------------------
// FIR resampling with the normalized binomial kernel [1,3,3,1]/8. The 2x
// upsampler is defined as 4 * adjoint(downsampler), which preserves constants
// away from the zero-padded border.
// ---------------------------------------------------------------------------
namespace detail {
template <class Real>
inline constexpr Real fir_tap(int i) {
  constexpr double taps[4] = {0.125, 0.375, 0.375, 0.125};
  return static_cast<Real>(taps[i]);
}
}  // namespace detail

// (n, h, w, c) -> (n, h/2, w/2, c); output pixel i reads input rows 2i-1 .. 2i+2.
template <class Real>
Tensor<Real> fir_down2(const Tensor<Real>& x) {
  const int n = x.dim(0), h = x.dim(1), wd = x.dim(2), c = x.dim(3);
  if (h % 2 || wd % 2) throw ContractError("fir_down2: odd spatial extent");
  const int ho = h / 2, wo = wd / 2;
  Tensor<Real> y({n, ho, wo, c});
  for (int nn = 0; nn < n; ++nn)
    for (int i = 0; i < ho; ++i)
      for (int a = 0; a < 4; ++a) {
        const int si = 2 * i - 1 + a;
        if (si < 0 || si >= h) continue;
        const Real ka = detail::fir_tap<Real>(a);
        for (int j = 0; j < wo; ++j) {
          Real* dst = &y.at4(nn, i, j, 0);
          for (int bb = 0; bb < 4; ++bb) {
            const int sj = 2 * j - 1 + bb;
            if (sj < 0 || sj >= wd) continue;
            const Real kk = ka * detail::fir_tap<Real>(bb);
            const Real* src = &x.at4(nn, si, sj, 0);
            for (int cc = 0; cc < c; ++cc) dst[cc] += kk * src[cc];
          }
        }
      }
  return y;
}

// Exact adjoint of fir_down2: (n, h, w, c) -> (n, 2h, 2w, c).
template <class Real>
Tensor<Real> fir_down2_adjoint(const Tensor<Real>& g) {
  const int n = g.dim(0), ho = g.dim(1), wo = g.dim(2), c = g.dim(3);
  const int h = 2 * ho, wd = 2 * wo;
  Tensor<Real> out({n, h, wd, c});
  for (int nn = 0; nn < n; ++nn)
    for (int i = 0; i < ho; ++i)
      for (int a = 0; a < 4; ++a) {
        const int si = 2 * i - 1 + a;
        if (si < 0 || si >= h) continue;
        const Real ka = detail::fir_tap<Real>(a);
        for (int j = 0; j < wo; ++j) {
          const Real* src = &g.at4(nn, i, j, 0);
          for (int bb = 0; bb < 4; ++bb) {
            const int sj = 2 * j - 1 + bb;
            if (sj < 0 || sj >= wd) continue;
            const Real kk = ka * detail::fir_tap<Real>(bb);
            Real* dst = &out.at4(nn, si, sj, 0);
            for (int cc = 0; cc < c; ++cc) dst[cc] += kk * src[cc];
          }
        }
      }
  return out;
}

template <class Real>
Tensor<Real> fir_up2(const Tensor<Real>& x) {
  Tensor<Real> y = fir_down2_adjoint(x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= Real(4);
  return y;
}

template <class Real>
Tensor<Real> fir_up2_adjoint(const Tensor<Real>& g) {
  Tensor<Real> y = fir_down2(g);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= Real(4);
  return y;
}

// Channel concatenation a ++ b along the last axis.
template <class Real>
Tensor<Real> concat_channels(const Tensor<Real>& a, const Tensor<Real>& b) {
  const int n = a.dim(0), h = a.dim(1), wd = a.dim(2);
  if (b.dim(0) != n || b.dim(1) != h || b.dim(2) != wd)
    throw ContractError("concat_channels: spatial shape mismatch");
  const int ca = a.dim(3), cb = b.dim(3);
  Tensor<Real> out({n, h, wd, ca + cb});
  const std::size_t pixels = static_cast<std::size_t>(n) * h * wd;
  for (std::size_t p = 0; p < pixels; ++p) {
    std::memcpy(out.data() + p * (ca + cb), a.data() + p * ca, sizeof(Real) * ca);
    std::memcpy(out.data() + p * (ca + cb) + ca, b.data() + p * cb, sizeof(Real) * cb);
  }
  return out;
}

template <class Real>
void split_channels(const Tensor<Real>& g, Tensor<Real>& da, Tensor<Real>& db, int ca, int cb) {
  const int n = g.dim(0), h = g.dim(1), wd = g.dim(2);
  da.reshape({n, h, wd, ca});
  db.reshape({n, h, wd, cb});
  const std::size_t pixels = static_cast<std::size_t>(n) * h * wd;
  for (std::size_t p = 0; p < pixels; ++p) {
    std::memcpy(da.data() + p * ca, g.data() + p * (ca + cb), sizeof(Real) * ca);
    std::memcpy(db.data() + p * cb, g.data() + p * (ca + cb) + ca, sizeof(Real) * cb);
  }
}

}  // namespace mfdiff::nn
