#include "wvdnet/tfd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wvdnet/error.hpp"

namespace wvdnet {

std::string to_string(TfdKind kind) {
  switch (kind) {
    case TfdKind::pseudo_wvd: return "pseudo_wvd";
    case TfdKind::wvd: return "wvd";
    case TfdKind::spectrogram: return "spectrogram";
  }
  return "unknown";
}

TfdKind tfd_kind_from_string(const std::string& s) {
  if (s == "pseudo_wvd") return TfdKind::pseudo_wvd;
  if (s == "wvd") return TfdKind::wvd;
  if (s == "spectrogram") return TfdKind::spectrogram;
  throw DataError("unknown TFD kind '" + s + "'");
}

namespace {

void check_window_length(std::size_t length) {
  if (length == 0 || length % 2 == 0) throw InvalidArgument("lag window length must be odd");
}

std::vector<double> hamming(std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length == 1) return w;
  for (std::size_t i = 0; i < length; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(length - 1));
  }
  return w;
}

}  // namespace

LagWindow hamming_lag_window(std::size_t length) {
  check_window_length(length);
  std::vector<double> w = hamming(length);
  for (std::size_t i = 0; i < length / 2; ++i) w[length - 1 - i] = w[i];
  w[length / 2] = 1.0;
  return LagWindow{std::move(w), "hamming-" + std::to_string(length)};
}

LagWindow rectangular_lag_window(std::size_t length) {
  check_window_length(length);
  return LagWindow{std::vector<double>(length, 1.0), "rectangular-" + std::to_string(length)};
}

std::size_t default_lag_window_length(std::size_t signal_len) {
  std::size_t len = signal_len / 4;
  if (len % 2 == 0) len = len == 0 ? 1 : len - 1;
  return std::min<std::size_t>(127, len);
}

std::size_t default_time_stride(std::size_t signal_len, std::size_t max_rows) {
  if (max_rows == 0) throw InvalidArgument("max_rows must be positive");
  return std::max<std::size_t>(1, (signal_len + max_rows - 1) / max_rows);
}

cplx ambiguity_product(const ComplexSignal& x, long n, long m) {
  const long len = static_cast<long>(x.size());
  const long a = n + m;
  const long b = n - m;
  if (a < 0 || a >= len || b < 0 || b >= len) return {};
  return x.samples[static_cast<std::size_t>(a)] * std::conj(x.samples[static_cast<std::size_t>(b)]);
}

namespace {

std::vector<std::size_t> row_times(std::size_t len, std::size_t stride) {
  std::vector<std::size_t> times;
  for (std::size_t n = 0; n < len; n += stride) times.push_back(n);
  return times;
}

TFDImage make_image(const ComplexSignal& x, std::size_t stride, std::size_t n_bins, TfdKind kind,
                    const std::vector<cplx>& lag_spectrum) {
  TFDImage img;
  const auto times = row_times(x.size(), stride);
  img.rows = times.size();
  img.cols = n_bins;
  img.kind = kind;
  img.source_rate_hz = x.sample_rate_hz;
  img.values.resize(lag_spectrum.size());
  for (std::size_t i = 0; i < lag_spectrum.size(); ++i) img.values[i] = 2.0 * lag_spectrum[i].real();
  img.time_axis_s.resize(img.rows);
  for (std::size_t r = 0; r < img.rows; ++r) img.time_axis_s[r] = static_cast<double>(times[r]) / x.sample_rate_hz;
  img.freq_axis_hz.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    img.freq_axis_hz[k] = static_cast<double>(k) * x.sample_rate_hz / (2.0 * static_cast<double>(n_bins));
  }
  return img;
}

}  // namespace

std::vector<cplx> pseudo_wvd_lag_spectrum(const ComplexSignal& x, const LagWindow& window, std::size_t time_stride,
                                          std::size_t n_freq_bins, kernels::Backend backend) {
  if (x.size() == 0) throw InvalidArgument("pseudo_wvd: empty signal");
  check_window_length(window.coefficients.size());
  if (time_stride == 0) throw InvalidArgument("pseudo_wvd: time stride must be positive");
  if (n_freq_bins == 0) throw InvalidArgument("pseudo_wvd: need at least one frequency bin");
  if (window.coefficients.size() > 2 * n_freq_bins - 1) {
    throw InvalidArgument("pseudo_wvd: lag window longer than 2 * n_freq_bins - 1");
  }
  const auto times = row_times(x.size(), time_stride);
  std::vector<cplx> rows(times.size() * n_freq_bins);
  const FftPlan plan(n_freq_bins);
  kernels::wvd_rows(x.samples, window.coefficients, times, plan, rows, backend);
  return rows;
}

TFDImage pseudo_wvd(const ComplexSignal& x, const LagWindow& window, std::size_t time_stride,
                    std::size_t n_freq_bins, kernels::Backend backend) {
  const auto spectrum = pseudo_wvd_lag_spectrum(x, window, time_stride, n_freq_bins, backend);
  return make_image(x, time_stride, n_freq_bins, TfdKind::pseudo_wvd, spectrum);
}

TFDImage wvd(const ComplexSignal& x, std::size_t time_stride, std::size_t n_freq_bins, kernels::Backend backend) {
  if (x.size() == 0) throw InvalidArgument("wvd: empty signal");
  if (n_freq_bins == 0) throw InvalidArgument("wvd: need at least one frequency bin");
  const std::size_t reach = std::min(n_freq_bins - 1, (x.size() - 1) / 2);
  const auto spectrum = pseudo_wvd_lag_spectrum(x, rectangular_lag_window(2 * reach + 1), time_stride,
                                                n_freq_bins, backend);
  return make_image(x, time_stride, n_freq_bins, TfdKind::wvd, spectrum);
}

std::vector<double> wvd_time_marginal(const TFDImage& image, const ComplexSignal& x) {
  if (image.rows != x.size()) {
    throw InvalidArgument("wvd_time_marginal: image has " + std::to_string(image.rows) + " rows but signal has " +
                          std::to_string(x.size()) + " samples (stride-1 image required)");
  }
  std::vector<double> marginal(image.rows);
  const double scale = 1.0 / (2.0 * static_cast<double>(image.cols));
  for (std::size_t r = 0; r < image.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < image.cols; ++c) s += image.at(r, c);
    marginal[r] = s * scale;
  }
  return marginal;
}

TFDImage spectrogram(const ComplexSignal& x, std::size_t window_len, std::size_t hop) {
  if (hop == 0) throw InvalidArgument("spectrogram: hop must be positive");
  if (window_len == 0 || window_len > x.size()) {
    throw InvalidArgument("spectrogram: window length must be in [1, signal length]");
  }
  const std::vector<double> window = hamming(window_len);
  const std::size_t frames = 1 + (x.size() - window_len) / hop;
  const std::size_t bins = window_len / 2 + 1;
  const FftPlan plan(window_len);

  TFDImage img;
  img.rows = frames;
  img.cols = bins;
  img.kind = TfdKind::spectrogram;
  img.source_rate_hz = x.sample_rate_hz;
  img.values.resize(frames * bins);
  img.time_axis_s.resize(frames);
  img.freq_axis_hz.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    img.freq_axis_hz[k] = static_cast<double>(k) * x.sample_rate_hz / static_cast<double>(window_len);
  }
  std::vector<cplx> frame(window_len);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < window_len; ++i) frame[i] = x.samples[start + i] * window[i];
    plan.forward(frame);
    for (std::size_t k = 0; k < bins; ++k) img.values[f * bins + k] = std::norm(frame[k]);
    img.time_axis_s[f] = (static_cast<double>(start) + static_cast<double>(window_len) / 2.0) / x.sample_rate_hz;
  }
  return img;
}

namespace {

struct Sample1d {
  std::size_t lo, hi;
  double frac;
};

std::vector<Sample1d> corner_aligned(std::size_t in, std::size_t out) {
  std::vector<Sample1d> s(out);
  for (std::size_t i = 0; i < out; ++i) {
    const double pos = out == 1 ? 0.5 * static_cast<double>(in - 1)
                                : static_cast<double>(i) * static_cast<double>(in - 1) / static_cast<double>(out - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    lo = std::min(lo, in - 1);
    const std::size_t hi = std::min(lo + 1, in - 1);
    s[i] = {lo, hi, pos - static_cast<double>(lo)};
  }
  return s;
}

std::vector<double> resample_axis(const std::vector<double>& axis, const std::vector<Sample1d>& map) {
  std::vector<double> out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i) {
    out[i] = axis[map[i].lo] + map[i].frac * (axis[map[i].hi] - axis[map[i].lo]);
  }
  return out;
}

}  // namespace

TFDImage resize_bilinear(const TFDImage& image, std::size_t out_rows, std::size_t out_cols) {
  if (out_rows == 0 || out_cols == 0) throw InvalidArgument("resize_bilinear: output dimensions must be positive");
  if (image.rows < 2 || image.cols < 2) throw InvalidArgument("resize_bilinear: input must be at least 2x2");
  if (image.rows == out_rows && image.cols == out_cols) return image;

  const auto rmap = corner_aligned(image.rows, out_rows);
  const auto cmap = corner_aligned(image.cols, out_cols);
  TFDImage out;
  out.rows = out_rows;
  out.cols = out_cols;
  out.kind = image.kind;
  out.source_rate_hz = image.source_rate_hz;
  out.values.resize(out_rows * out_cols);
  for (std::size_t r = 0; r < out_rows; ++r) {
    const auto& rs = rmap[r];
    for (std::size_t c = 0; c < out_cols; ++c) {
      const auto& cs = cmap[c];
      const double top = image.at(rs.lo, cs.lo) + cs.frac * (image.at(rs.lo, cs.hi) - image.at(rs.lo, cs.lo));
      const double bottom = image.at(rs.hi, cs.lo) + cs.frac * (image.at(rs.hi, cs.hi) - image.at(rs.hi, cs.lo));
      out.at(r, c) = top + rs.frac * (bottom - top);
    }
  }
  out.time_axis_s = resample_axis(image.time_axis_s, rmap);
  out.freq_axis_hz = resample_axis(image.freq_axis_hz, cmap);
  return out;
}

TFDImage normalize_image(const TFDImage& image, bool log_compress) {
  TFDImage out = image;
  for (auto& v : out.values) v = std::max(v, 0.0);
  if (out.values.empty()) return out;
  if (log_compress) {
    const double peak = *std::max_element(out.values.begin(), out.values.end());
    if (peak > 0.0) {
      for (auto& v : out.values) v = std::log1p(1000.0 * v / peak);
    }
  }
  const auto [lo_it, hi_it] = std::minmax_element(out.values.begin(), out.values.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  if (!(range > 0.0)) {
    std::fill(out.values.begin(), out.values.end(), 0.0);
    return out;
  }
  for (auto& v : out.values) v = (v - lo) / range;
  return out;
}

}  // namespace wvdnet
