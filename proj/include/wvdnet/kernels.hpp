#pragma once

#include <cstddef>
#include <span>

#include "wvdnet/fft.hpp"

// Data-parallel inner loops. Every kernel has a serial reference and an
// OpenMP version. Work is split only along independent outputs (rows,
// channels, tiles), and each output element is accumulated in the same order
// by both backends, so their results are bitwise identical.
namespace wvdnet::kernels {

enum class Backend { serial, omp };

// Threads used by the omp backend (0 = OpenMP default).
void set_num_threads(int n);
int num_threads();

// ---- time-frequency ------------------------------------------------------

// Lag-windowed WVD rows. `window` has odd length 2L+1 and is indexed by
// m + L. For each n in `times` writes row
//   sum_m window[m+L] * x[n+m] * conj(x[n-m]) * exp(-j 2 pi k m / n_bins)
// for k < n_bins into `rows` (times.size() x n_bins, row-major), via an
// n_bins-point FFT over the lag axis. Lags that wrap past n_bins/2 fold onto
// the same bin, which keeps the result equal to the defining sum.
void wvd_rows(std::span<const cplx> x, std::span<const double> window, std::span<const std::size_t> times,
              const FftPlan& plan, std::span<cplx> rows, Backend backend);

// ---- convolution (single sample, CHW layout) -------------------------------

struct ConvGeometry {
  std::size_t in_ch, in_h, in_w;
  std::size_t out_ch, kernel_h, kernel_w;
  std::size_t stride, padding;

  std::size_t out_h() const { return (in_h + 2 * padding - kernel_h) / stride + 1; }
  std::size_t out_w() const { return (in_w + 2 * padding - kernel_w) / stride + 1; }
};

// out[oc] = bias[oc] + sum_ic correlate(in[ic], w[oc, ic])
template <typename T>
void conv2d_forward(const ConvGeometry& g, const T* in, const T* weights, const T* bias, T* out,
                    Backend backend);

// grad_in = d(out)/d(in)^T grad_out. Overwrites grad_in.
template <typename T>
void conv2d_backward_input(const ConvGeometry& g, const T* grad_out, const T* weights, T* grad_in,
                           Backend backend);

// Accumulates into grad_w and grad_b (does not zero them).
template <typename T>
void conv2d_backward_params(const ConvGeometry& g, const T* grad_out, const T* in, T* grad_w, T* grad_b,
                            Backend backend);

// ---- dense (batched, row-major) -----------------------------------------------

// y[n, o] = b[o] + sum_i x[n, i] * w[o, i]
template <typename T>
void linear_forward(std::size_t batch, std::size_t in_f, std::size_t out_f, const T* x, const T* w,
                    const T* b, T* y, Backend backend);

// grad_x[n, i] = sum_o grad_y[n, o] * w[o, i]. Overwrites grad_x.
template <typename T>
void linear_backward_input(std::size_t batch, std::size_t in_f, std::size_t out_f, const T* grad_y,
                           const T* w, T* grad_x, Backend backend);

// grad_w[o, i] += sum_n grad_y[n, o] * x[n, i]; grad_b[o] += sum_n grad_y[n, o]
template <typename T>
void linear_backward_params(std::size_t batch, std::size_t in_f, std::size_t out_f, const T* grad_y,
                            const T* x, T* grad_w, T* grad_b, Backend backend);

}  // namespace wvdnet::kernels
