#include "wvdnet/fft.hpp"

#include <cmath>
#include <numbers>

#include "wvdnet/error.hpp"

namespace wvdnet {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("fft: empty input");
  m_ = is_power_of_two(n) ? n : next_power_of_two(2 * n - 1);

  bitrev_.resize(m_);
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < m_) ++bits;
  for (std::size_t i = 0; i < m_; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  twiddles_.resize(m_ / 2);
  for (std::size_t i = 0; i < m_ / 2; ++i) {
    twiddles_[i] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m_));
  }

  if (m_ != n_) {
    chirp_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      // i^2 mod 2n keeps the phase argument small and exact.
      const auto sq = static_cast<double>((i * i) % (2 * n_));
      chirp_[i] = std::polar(1.0, -std::numbers::pi * sq / static_cast<double>(n_));
    }
    chirp_fft_.assign(m_, cplx{});
    chirp_fft_[0] = std::conj(chirp_[0]);
    for (std::size_t i = 1; i < n_; ++i) {
      chirp_fft_[i] = std::conj(chirp_[i]);
      chirp_fft_[m_ - i] = std::conj(chirp_[i]);
    }
    radix2(chirp_fft_, false);
  }
}

void FftPlan::radix2(std::span<cplx> a, bool inverse) const {
  const std::size_t m = a.size();
  for (std::size_t i = 0; i < m; ++i) {
    if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= m; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t step = m / len;
    for (std::size_t start = 0; start < m; start += len) {
      for (std::size_t j = 0; j < half; ++j) {
        cplx w = twiddles_[j * step];
        if (inverse) w = std::conj(w);
        const cplx u = a[start + j];
        const cplx v = a[start + j + half] * w;
        a[start + j] = u + v;
        a[start + j + half] = u - v;
      }
    }
  }
}

void FftPlan::bluestein(std::span<cplx> data, bool inverse) const {
  std::vector<cplx> work(m_, cplx{});
  for (std::size_t i = 0; i < n_; ++i) {
    const cplx c = inverse ? std::conj(chirp_[i]) : chirp_[i];
    work[i] = data[i] * c;
  }
  radix2(work, false);
  for (std::size_t i = 0; i < m_; ++i) {
    work[i] *= inverse ? std::conj(chirp_fft_[(m_ - i) % m_]) : chirp_fft_[i];
  }
  radix2(work, true);
  const double scale = 1.0 / static_cast<double>(m_);
  for (std::size_t i = 0; i < n_; ++i) {
    const cplx c = inverse ? std::conj(chirp_[i]) : chirp_[i];
    data[i] = work[i] * scale * c;
  }
}

void FftPlan::forward(std::span<cplx> data) const {
  if (data.size() != n_) throw InvalidArgument("fft: length does not match plan");
  if (m_ == n_) {
    radix2(data, false);
  } else {
    bluestein(data, false);
  }
}

void FftPlan::inverse(std::span<cplx> data) const {
  if (data.size() != n_) throw InvalidArgument("fft: length does not match plan");
  if (m_ == n_) {
    radix2(data, true);
  } else {
    bluestein(data, true);
  }
  const double scale = 1.0 / static_cast<double>(n_);
  for (auto& v : data) v *= scale;
}

std::vector<cplx> fft(std::span<const cplx> samples, bool inverse) {
  if (samples.empty()) throw InvalidArgument("fft: empty input");
  std::vector<cplx> out(samples.begin(), samples.end());
  const FftPlan plan(out.size());
  if (inverse) {
    plan.inverse(out);
  } else {
    plan.forward(out);
  }
  return out;
}

}  // namespace wvdnet
