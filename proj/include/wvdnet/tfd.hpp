#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wvdnet/analytic.hpp"
#include "wvdnet/kernels.hpp"

namespace wvdnet {

enum class TfdKind { pseudo_wvd, wvd, spectrogram };

std::string to_string(TfdKind kind);
TfdKind tfd_kind_from_string(const std::string& s);

// Time x frequency energy array. Rows are time, columns frequency (increasing).
struct TFDImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major, rows * cols
  std::vector<double> time_axis_s;
  std::vector<double> freq_axis_hz;
  double source_rate_hz = 0.0;
  TfdKind kind = TfdKind::pseudo_wvd;

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// Symmetric odd-length taper over the lag axis with a peak of exactly 1.
struct LagWindow {
  std::vector<double> coefficients;
  std::string name;

  std::size_t half_length() const { return coefficients.size() / 2; }
};

LagWindow hamming_lag_window(std::size_t length);
LagWindow rectangular_lag_window(std::size_t length);

// min(127, largest odd number <= signal_len / 4), at least 1.
std::size_t default_lag_window_length(std::size_t signal_len);

// Smallest stride keeping the image at or below max_rows time rows.
std::size_t default_time_stride(std::size_t signal_len, std::size_t max_rows = 1200);

inline constexpr std::size_t kDefaultFreqBins = 512;

// x[n+m] * conj(x[n-m]); zero whenever either index is outside the signal.
cplx ambiguity_product(const ComplexSignal& x, long n, long m);

// Complex lag spectrum before the real part is taken (rows x n_freq_bins).
// The WVD kernel is conjugate symmetric in m, so the imaginary part is
// round-off only.
std::vector<cplx> pseudo_wvd_lag_spectrum(const ComplexSignal& x, const LagWindow& window, std::size_t time_stride,
                                          std::size_t n_freq_bins,
                                          kernels::Backend backend = kernels::Backend::omp);

// Discrete pseudo Wigner-Ville distribution,
//   W[n][k] = 2 Re sum_m h[m] x[n+m] conj(x[n-m]) exp(-j 2 pi k m / n_freq_bins),
// evaluated at n = 0, stride, 2 stride, ... Column k is k * fs / (2 n_freq_bins) Hz.
// Values stay signed; negativity is handled by normalize_image.
TFDImage pseudo_wvd(const ComplexSignal& x, const LagWindow& window, std::size_t time_stride,
                    std::size_t n_freq_bins, kernels::Backend backend = kernels::Backend::omp);

// Plain WVD: rectangular window over every lag the frequency grid resolves
// without folding (|m| <= min(n_freq_bins - 1, (N - 1) / 2)).
TFDImage wvd(const ComplexSignal& x, std::size_t time_stride, std::size_t n_freq_bins,
             kernels::Backend backend = kernels::Backend::omp);

// Per-row sum of W divided by 2 * n_freq_bins; equals |x[n]|^2 for a
// stride-1 plain WVD image.
std::vector<double> wvd_time_marginal(const TFDImage& image, const ComplexSignal& x);

// Squared-magnitude STFT with a Hamming analysis window; columns are bins
// 0 .. window_len/2.
TFDImage spectrogram(const ComplexSignal& x, std::size_t window_len, std::size_t hop);

// Bilinear interpolation on corner-aligned grids (corners map to corners).
TFDImage resize_bilinear(const TFDImage& image, std::size_t out_rows, std::size_t out_cols);

// Clamp negatives to zero then min-max scale to [0, 1]; a constant image maps
// to all zeros. With log_compress, log1p(1000 v / max) is applied after the
// clamp.
TFDImage normalize_image(const TFDImage& image, bool log_compress = false);

}  // namespace wvdnet
