#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wvdnet {

using cplx = std::complex<double>;

// Precomputed DFT of a fixed length. Powers of two use an iterative radix-2
// transform; every other length goes through Bluestein's chirp-z algorithm.
//
// Forward: X[k] = sum_n x[n] exp(-j 2 pi k n / N). Inverse carries the 1/N.
// A plan is immutable after construction and may be shared between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

 private:
  void radix2(std::span<cplx> data, bool inverse) const;
  void bluestein(std::span<cplx> data, bool inverse) const;

  std::size_t n_;
  std::size_t m_;                  // radix-2 working length (== n_ when n_ is a power of two)
  std::vector<std::size_t> bitrev_;
  std::vector<cplx> twiddles_;     // exp(-j 2 pi i / m_), i < m_/2
  std::vector<cplx> chirp_;        // exp(-j pi i^2 / n_), Bluestein only
  std::vector<cplx> chirp_fft_;    // FFT of the conjugate chirp filter, Bluestein only
};

// One-shot transform; builds a plan internally.
std::vector<cplx> fft(std::span<const cplx> samples, bool inverse = false);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

}  // namespace wvdnet
