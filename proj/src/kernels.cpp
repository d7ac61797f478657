#include "wvdnet/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <vector>

namespace wvdnet::kernels {

namespace {

int g_threads = 0;

template <typename F>
void for_each_index(Backend backend, std::size_t n, F&& f) {
  if (backend == Backend::omp) {
    const int threads = g_threads > 0 ? g_threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
    for (long i = 0; i < static_cast<long>(n); ++i) f(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

constexpr std::size_t kLanes = 8;

// Dot product with kLanes independent partial sums, reduced in lane order.
template <typename T>
T dot_lanes(const T* a, const T* b, std::size_t n) {
  T acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l] * b[i + l];
  }
  for (; i < n; ++i) acc[0] += a[i] * b[i];
  T s{};
  for (std::size_t l = 0; l < kLanes; ++l) s += acc[l];
  return s;
}

template <typename T>
T sum_lanes(const T* a, std::size_t n) {
  T acc[kLanes] = {};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += a[i + l];
  }
  for (; i < n; ++i) acc[0] += a[i];
  T s{};
  for (std::size_t l = 0; l < kLanes; ++l) s += acc[l];
  return s;
}

// out (oh x ow) += valid cross-correlation of `in` (row pitch in_w) with k (kh x kw).
template <typename T>
void correlate_accumulate(const T* in, std::size_t in_w, const T* k, std::size_t kh, std::size_t kw,
                          std::size_t stride, T* out, std::size_t oh, std::size_t ow) {
  if (kh == 3 && kw == 3 && stride == 1) {
    const T k0 = k[0], k1 = k[1], k2 = k[2], k3 = k[3], k4 = k[4], k5 = k[5], k6 = k[6], k7 = k[7], k8 = k[8];
    for (std::size_t y = 0; y < oh; ++y) {
      const T* r0 = in + y * in_w;
      const T* r1 = r0 + in_w;
      const T* r2 = r1 + in_w;
      T* o = out + y * ow;
      for (std::size_t x = 0; x < ow; ++x) {
        o[x] += k0 * r0[x] + k1 * r0[x + 1] + k2 * r0[x + 2] + k3 * r1[x] + k4 * r1[x + 1] + k5 * r1[x + 2] +
                k6 * r2[x] + k7 * r2[x + 1] + k8 * r2[x + 2];
      }
    }
    return;
  }
  for (std::size_t y = 0; y < oh; ++y) {
    T* o = out + y * ow;
    for (std::size_t x = 0; x < ow; ++x) {
      T acc{};
      for (std::size_t ky = 0; ky < kh; ++ky) {
        const T* r = in + (y * stride + ky) * in_w + x * stride;
        for (std::size_t kx = 0; kx < kw; ++kx) acc += k[ky * kw + kx] * r[kx];
      }
      o[x] += acc;
    }
  }
}

// Copies a C x H x W block into a zeroed C x (H+2p) x (W+2p) buffer.
template <typename T>
std::vector<T> pad_planes(const T* in, std::size_t c, std::size_t h, std::size_t w, std::size_t p) {
  const std::size_t ph = h + 2 * p;
  const std::size_t pw = w + 2 * p;
  std::vector<T> out(c * ph * pw, T{});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      std::copy_n(in + (ch * h + y) * w, w, out.data() + (ch * ph + y + p) * pw + p);
    }
  }
  return out;
}

}  // namespace

void set_num_threads(int n) { g_threads = n; }

int num_threads() { return g_threads > 0 ? g_threads : omp_get_max_threads(); }

void wvd_rows(std::span<const cplx> x, std::span<const double> window, std::span<const std::size_t> times,
              const FftPlan& plan, std::span<cplx> rows, Backend backend) {
  const std::size_t n_bins = plan.size();
  const long len = static_cast<long>(x.size());
  const long half = static_cast<long>(window.size() / 2);
  const long nb = static_cast<long>(n_bins);
  for_each_index(backend, times.size(), [&](std::size_t r) {
    std::span<cplx> row = rows.subspan(r * n_bins, n_bins);
    std::fill(row.begin(), row.end(), cplx{});
    const long n = static_cast<long>(times[r]);
    const long reach = std::min({half, n, len - 1 - n});
    for (long m = -reach; m <= reach; ++m) {
      const long bin = ((m % nb) + nb) % nb;
      row[static_cast<std::size_t>(bin)] += window[static_cast<std::size_t>(m + half)] *
                                            x[static_cast<std::size_t>(n + m)] *
                                            std::conj(x[static_cast<std::size_t>(n - m)]);
    }
    plan.forward(row);
  });
}

template <typename T>
void conv2d_forward(const ConvGeometry& g, const T* in, const T* weights, const T* bias, T* out,
                    Backend backend) {
  const std::size_t oh = g.out_h(), ow = g.out_w();
  const std::size_t ph = g.in_h + 2 * g.padding, pw = g.in_w + 2 * g.padding;
  const std::vector<T> padded = pad_planes(in, g.in_ch, g.in_h, g.in_w, g.padding);
  const std::size_t ksize = g.kernel_h * g.kernel_w;
  for_each_index(backend, g.out_ch, [&](std::size_t oc) {
    T* o = out + oc * oh * ow;
    std::fill(o, o + oh * ow, bias ? bias[oc] : T{});
    for (std::size_t ic = 0; ic < g.in_ch; ++ic) {
      correlate_accumulate(padded.data() + ic * ph * pw, pw, weights + (oc * g.in_ch + ic) * ksize, g.kernel_h,
                           g.kernel_w, g.stride, o, oh, ow);
    }
  });
}

template <typename T>
void conv2d_backward_input(const ConvGeometry& g, const T* grad_out, const T* weights, T* grad_in,
                           Backend backend) {
  const std::size_t oh = g.out_h(), ow = g.out_w();
  const std::size_t ksize = g.kernel_h * g.kernel_w;
  const std::size_t plane = g.in_h * g.in_w;

  if (g.stride == 1 && g.kernel_h == g.kernel_w && g.padding + 1 <= g.kernel_h) {
    // Full correlation of the gradient with the flipped kernel.
    const std::size_t q = g.kernel_h - 1 - g.padding;
    const std::vector<T> gp = pad_planes(grad_out, g.out_ch, oh, ow, q);
    const std::size_t gh = oh + 2 * q, gw = ow + 2 * q;
    std::vector<T> flipped(g.in_ch * g.out_ch * ksize);
    for (std::size_t oc = 0; oc < g.out_ch; ++oc) {
      for (std::size_t ic = 0; ic < g.in_ch; ++ic) {
        const T* w = weights + (oc * g.in_ch + ic) * ksize;
        T* f = flipped.data() + (ic * g.out_ch + oc) * ksize;
        for (std::size_t i = 0; i < ksize; ++i) f[i] = w[ksize - 1 - i];
      }
    }
    for_each_index(backend, g.in_ch, [&](std::size_t ic) {
      T* gi = grad_in + ic * plane;
      std::fill(gi, gi + plane, T{});
      for (std::size_t oc = 0; oc < g.out_ch; ++oc) {
        correlate_accumulate(gp.data() + oc * gh * gw, gw, flipped.data() + (ic * g.out_ch + oc) * ksize,
                             g.kernel_h, g.kernel_w, 1, gi, g.in_h, g.in_w);
      }
    });
    return;
  }

  const std::size_t ph = g.in_h + 2 * g.padding, pw = g.in_w + 2 * g.padding;
  for_each_index(backend, g.in_ch, [&](std::size_t ic) {
    std::vector<T> acc(ph * pw, T{});
    for (std::size_t oc = 0; oc < g.out_ch; ++oc) {
      const T* w = weights + (oc * g.in_ch + ic) * ksize;
      const T* go = grad_out + oc * oh * ow;
      for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
          const T gv = go[y * ow + x];
          for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
            T* r = acc.data() + (y * g.stride + ky) * pw + x * g.stride;
            for (std::size_t kx = 0; kx < g.kernel_w; ++kx) r[kx] += w[ky * g.kernel_w + kx] * gv;
          }
        }
      }
    }
    T* gi = grad_in + ic * plane;
    for (std::size_t y = 0; y < g.in_h; ++y) {
      std::copy_n(acc.data() + (y + g.padding) * pw + g.padding, g.in_w, gi + y * g.in_w);
    }
  });
}

template <typename T>
void conv2d_backward_params(const ConvGeometry& g, const T* grad_out, const T* in, T* grad_w, T* grad_b,
                            Backend backend) {
  const std::size_t oh = g.out_h(), ow = g.out_w();
  const std::size_t ph = g.in_h + 2 * g.padding, pw = g.in_w + 2 * g.padding;
  const std::size_t ksize = g.kernel_h * g.kernel_w;
  const std::vector<T> padded = pad_planes(in, g.in_ch, g.in_h, g.in_w, g.padding);
  const bool fast = g.kernel_h == 3 && g.kernel_w == 3 && g.stride == 1;

  for_each_index(backend, g.out_ch, [&](std::size_t oc) {
    const T* go = grad_out + oc * oh * ow;
    if (grad_b) grad_b[oc] += sum_lanes(go, oh * ow);
    for (std::size_t ic = 0; ic < g.in_ch; ++ic) {
      const T* src = padded.data() + ic * ph * pw;
      T* gw = grad_w + (oc * g.in_ch + ic) * ksize;
      if (fast) {
        T acc[9][kLanes] = {};
        for (std::size_t y = 0; y < oh; ++y) {
          const T* gr = go + y * ow;
          const T* rows[3] = {src + y * pw, src + (y + 1) * pw, src + (y + 2) * pw};
          std::size_t x = 0;
          for (; x + kLanes <= ow; x += kLanes) {
            for (std::size_t k = 0; k < 9; ++k) {
              const T* r = rows[k / 3] + x + k % 3;
              for (std::size_t l = 0; l < kLanes; ++l) acc[k][l] += gr[x + l] * r[l];
            }
          }
          for (; x < ow; ++x) {
            for (std::size_t k = 0; k < 9; ++k) acc[k][0] += gr[x] * rows[k / 3][x + k % 3];
          }
        }
        for (std::size_t k = 0; k < 9; ++k) {
          T s{};
          for (std::size_t l = 0; l < kLanes; ++l) s += acc[k][l];
          gw[k] += s;
        }
      } else {
        for (std::size_t ky = 0; ky < g.kernel_h; ++ky) {
          for (std::size_t kx = 0; kx < g.kernel_w; ++kx) {
            T s{};
            for (std::size_t y = 0; y < oh; ++y) {
              const T* r = src + (y * g.stride + ky) * pw + kx;
              for (std::size_t x = 0; x < ow; ++x) s += go[y * ow + x] * r[x * g.stride];
            }
            gw[ky * g.kernel_w + kx] += s;
          }
        }
      }
    }
  });
}

template <typename T>
void linear_forward(std::size_t batch, std::size_t in_f, std::size_t out_f, const T* x, const T* w,
                    const T* b, T* y, Backend backend) {
  for_each_index(backend, out_f, [&](std::size_t o) {
    const T* wr = w + o * in_f;
    for (std::size_t n = 0; n < batch; ++n) {
      y[n * out_f + o] = (b ? b[o] : T{}) + dot_lanes(wr, x + n * in_f, in_f);
    }
  });
}

template <typename T>
void linear_backward_input(std::size_t batch, std::size_t in_f, std::size_t out_f, const T* grad_y,
                           const T* w, T* grad_x, Backend backend) {
  constexpr std::size_t kTile = 1024;
  const std::size_t tiles = (in_f + kTile - 1) / kTile;
  for_each_index(backend, tiles, [&](std::size_t t) {
    const std::size_t lo = t * kTile;
    const std::size_t hi = std::min(in_f, lo + kTile);
    for (std::size_t n = 0; n < batch; ++n) std::fill(grad_x + n * in_f + lo, grad_x + n * in_f + hi, T{});
    for (std::size_t o = 0; o < out_f; ++o) {
      const T* wr = w + o * in_f;
      for (std::size_t n = 0; n < batch; ++n) {
        const T gy = grad_y[n * out_f + o];
        if (gy == T{}) continue;
        T* gx = grad_x + n * in_f;
        for (std::size_t i = lo; i < hi; ++i) gx[i] += gy * wr[i];
      }
    }
  });
}

template <typename T>
void linear_backward_params(std::size_t batch, std::size_t in_f, std::size_t out_f, const T* grad_y,
                            const T* x, T* grad_w, T* grad_b, Backend backend) {
  for_each_index(backend, out_f, [&](std::size_t o) {
    T* gw = grad_w + o * in_f;
    for (std::size_t n = 0; n < batch; ++n) {
      const T gy = grad_y[n * out_f + o];
      if (grad_b) grad_b[o] += gy;
      if (gy == T{}) continue;
      const T* xr = x + n * in_f;
      for (std::size_t i = 0; i < in_f; ++i) gw[i] += gy * xr[i];
    }
  });
}

#define WVDNET_INSTANTIATE(T)                                                                                 \
  template void conv2d_forward<T>(const ConvGeometry&, const T*, const T*, const T*, T*, Backend);            \
  template void conv2d_backward_input<T>(const ConvGeometry&, const T*, const T*, T*, Backend);               \
  template void conv2d_backward_params<T>(const ConvGeometry&, const T*, const T*, T*, T*, Backend);          \
  template void linear_forward<T>(std::size_t, std::size_t, std::size_t, const T*, const T*, const T*, T*,    \
                                  Backend);                                                                   \
  template void linear_backward_input<T>(std::size_t, std::size_t, std::size_t, const T*, const T*, T*,      \
                                         Backend);                                                            \
  template void linear_backward_params<T>(std::size_t, std::size_t, std::size_t, const T*, const T*, T*, T*,  \
                                          Backend);

WVDNET_INSTANTIATE(float)
WVDNET_INSTANTIATE(double)

#undef WVDNET_INSTANTIATE

}  // namespace wvdnet::kernels
