#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wvdnet {

// Uniformly sampled real waveform. Amplitudes are nominally in [-1, 1].
struct Signal {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;

  Signal() = default;
  Signal(std::vector<double> s, double rate);

  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / sample_rate_hz; }
};

// Linear-phase FIR low-pass. Taps are symmetric, odd in count and sum to one.
struct FirFilter {
  std::vector<double> taps;
  double cutoff_hz = 0.0;
  double sample_rate_hz = 0.0;
  std::string design;

  // |H(f)| evaluated directly from the taps.
  double magnitude_at(double freq_hz) const;
};

// Mean across channels. All channels must share length and sample rate.
Signal average_channels(std::span<const Signal> channels);

// Hamming-windowed sinc low-pass normalized to unit DC gain.
FirFilter design_lowpass(double cutoff_hz, double sample_rate_hz, std::size_t num_taps);

// Zero-padded convolution returning an output of the input's length,
// aligned on the filter's center tap.
std::vector<double> filter_same(std::span<const double> x, const FirFilter& filter);

enum class RatePolicy {
  exact,             // source / target must be an integer
  largest_divisor,   // pick the largest integer k dividing the source rate with source / k >= target
};

// Working rate actually used for a requested target: the source rate itself
// when no downsampling is needed, else source / k for the largest integer k
// that divides the (integral) source rate and keeps the rate >= target.
double choose_working_rate(double source_rate_hz, double requested_rate_hz);

inline constexpr std::size_t kAntiAliasTaps = 63;
inline constexpr double kAntiAliasFraction = 0.45;  // of the target Nyquist

// Anti-alias filter at 0.45 x target Nyquist followed by keeping every k-th
// sample. Returns the input unchanged when the target equals the source rate.
Signal decimate(const Signal& signal, double target_rate_hz, RatePolicy policy = RatePolicy::exact);

// Centered crop when longer, symmetric zero pad (extra sample at the end) when shorter.
Signal pad_or_truncate(const Signal& signal, std::size_t target_len);

// Sum of squared samples.
double energy(std::span<const double> x);

}  // namespace wvdnet
