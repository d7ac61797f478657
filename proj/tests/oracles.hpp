#pragma once

// Brute-force references the library results are checked against. Nothing
// here calls into the code under test except plain data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

inline std::vector<cplx> dft(const std::vector<cplx>& x, bool inverse = false) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s{};
    for (std::size_t i = 0; i < n; ++i) {
      const double a = sign * 2.0 * std::numbers::pi * static_cast<double>((k * i) % n) / static_cast<double>(n);
      s += x[i] * cplx(std::cos(a), std::sin(a));
    }
    out[k] = inverse ? s / static_cast<double>(n) : s;
  }
  return out;
}

inline double dft_magnitude(const std::vector<double>& taps, double freq, double rate) {
  cplx s{};
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double a = -2.0 * std::numbers::pi * freq * static_cast<double>(i) / rate;
    s += taps[i] * cplx(std::cos(a), std::sin(a));
  }
  return std::abs(s);
}

// Index of the largest |X[k]| over k in [0, n/2].
inline std::size_t peak_bin(const std::vector<double>& x) {
  std::vector<cplx> c(x.begin(), x.end());
  const auto X = dft(c);
  std::size_t best = 0;
  for (std::size_t k = 1; k <= x.size() / 2; ++k) {
    if (std::abs(X[k]) > std::abs(X[best])) best = k;
  }
  return best;
}

// The defining sum of the discrete pseudo-WVD at time n, bin k, with a lag
// window h of odd length 2L+1 (h[L] the center). Out-of-range samples are 0.
inline cplx pwvd_sum(const std::vector<cplx>& x, const std::vector<double>& h, long n, std::size_t k,
                     std::size_t n_bins) {
  const long len = static_cast<long>(x.size());
  const long half = static_cast<long>(h.size() / 2);
  cplx s{};
  for (long m = -half; m <= half; ++m) {
    if (n + m < 0 || n + m >= len || n - m < 0 || n - m >= len) continue;
    const double a = -2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(m) /
                     static_cast<double>(n_bins);
    s += h[static_cast<std::size_t>(m + half)] * x[static_cast<std::size_t>(n + m)] *
         std::conj(x[static_cast<std::size_t>(n - m)]) * cplx(std::cos(a), std::sin(a));
  }
  return s;
}

// Analytic signal by direct DFT, for comparison with the FFT path.
inline std::vector<cplx> analytic(const std::vector<double>& x) {
  const std::size_t n = x.size();
  auto X = dft(std::vector<cplx>(x.begin(), x.end()));
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) X[k] *= 2.0;
    else if (2 * k > n) X[k] = 0.0;
  }
  return dft(X, true);
}

inline std::vector<double> hamming(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

// Plain nested-loop cross-correlation, [C,H,W] input, [O,C,k,k] weights.
inline std::vector<double> conv2d(const std::vector<double>& in, std::size_t c, std::size_t h, std::size_t w,
                                  const std::vector<double>& wt, const std::vector<double>& bias, std::size_t o,
                                  std::size_t k, std::size_t stride, std::size_t pad) {
  const std::size_t oh = (h + 2 * pad - k) / stride + 1, ow = (w + 2 * pad - k) / stride + 1;
  std::vector<double> out(o * oh * ow);
  for (std::size_t oc = 0; oc < o; ++oc)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        double s = bias.empty() ? 0.0 : bias[oc];
        for (std::size_t ic = 0; ic < c; ++ic)
          for (std::size_t ky = 0; ky < k; ++ky)
            for (std::size_t kx = 0; kx < k; ++kx) {
              const long iy = static_cast<long>(y * stride + ky) - static_cast<long>(pad);
              const long ix = static_cast<long>(x * stride + kx) - static_cast<long>(pad);
              if (iy < 0 || ix < 0 || iy >= static_cast<long>(h) || ix >= static_cast<long>(w)) continue;
              s += in[(ic * h + static_cast<std::size_t>(iy)) * w + static_cast<std::size_t>(ix)] *
                   wt[((oc * c + ic) * k + ky) * k + kx];
            }
        out[(oc * oh + y) * ow + x] = s;
      }
  return out;
}

// Central differences of a scalar function with respect to each entry of v.
inline std::vector<double> numeric_gradient(std::vector<double>& v, const std::function<double()>& f,
                                            double eps = 1e-6) {
  std::vector<double> g(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double keep = v[i];
    v[i] = keep + eps;
    const double up = f();
    v[i] = keep - eps;
    const double down = f();
    v[i] = keep;
    g[i] = (up - down) / (2 * eps);
  }
  return g;
}

// Max relative error, entries with |reference| below floor compared absolutely.
inline double max_rel_error(const std::vector<double>& got, const std::vector<double>& want, double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double d = std::abs(got[i] - want[i]);
    const double scale = std::max(std::abs(want[i]), std::abs(got[i]));
    worst = std::max(worst, scale < floor ? d : d / scale);
  }
  return worst;
}

// Byte-level WAV writer independent of the library encoder.
inline void put_le(std::string& s, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline std::string wav_pcm16(const std::vector<std::vector<std::int16_t>>& channels, std::uint32_t rate,
                             const std::string& extra_chunk_before_data = "") {
  const std::size_t ch = channels.size(), frames = channels[0].size();
  std::string fmt, data, out;
  put_le(fmt, 1, 2);
  put_le(fmt, ch, 2);
  put_le(fmt, rate, 4);
  put_le(fmt, rate * ch * 2, 4);
  put_le(fmt, ch * 2, 2);
  put_le(fmt, 16, 2);
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t c = 0; c < ch; ++c) put_le(data, static_cast<std::uint16_t>(channels[c][f]), 2);
  std::string body = "WAVEfmt ";
  put_le(body, fmt.size(), 4);
  body += fmt + extra_chunk_before_data + "data";
  put_le(body, data.size(), 4);
  body += data;
  out = "RIFF";
  put_le(out, body.size(), 4);
  return out + body;
}

}  // namespace oracle
