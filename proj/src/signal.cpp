#include "wvdnet/signal.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "wvdnet/error.hpp"

namespace wvdnet {

Signal::Signal(std::vector<double> s, double rate) : samples(std::move(s)), sample_rate_hz(rate) {
  if (!(rate > 0.0)) throw InvalidArgument("sample rate must be positive");
}

double FirFilter::magnitude_at(double freq_hz) const {
  std::complex<double> acc{};
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    acc += taps[i] * std::polar(1.0, -w * static_cast<double>(i));
  }
  return std::abs(acc);
}

Signal average_channels(std::span<const Signal> channels) {
  if (channels.empty()) throw InvalidArgument("average_channels: no channels");
  const auto& first = channels.front();
  for (const auto& ch : channels) {
    if (ch.size() != first.size()) throw InvalidArgument("average_channels: channel length mismatch");
    if (ch.sample_rate_hz != first.sample_rate_hz) {
      throw InvalidArgument("average_channels: channel sample rate mismatch");
    }
  }
  if (channels.size() == 1) return first;

  std::vector<double> out(first.size(), 0.0);
  for (const auto& ch : channels) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += ch.samples[i];
  }
  const double scale = 1.0 / static_cast<double>(channels.size());
  for (auto& v : out) v *= scale;
  return Signal(std::move(out), first.sample_rate_hz);
}

FirFilter design_lowpass(double cutoff_hz, double sample_rate_hz, std::size_t num_taps) {
  if (!(sample_rate_hz > 0.0)) throw InvalidArgument("design_lowpass: sample rate must be positive");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= sample_rate_hz / 2.0) {
    throw InvalidArgument("design_lowpass: cutoff must lie in (0, Nyquist)");
  }
  if (num_taps == 0 || num_taps % 2 == 0) throw InvalidArgument("design_lowpass: tap count must be odd");

  const double fc = cutoff_hz / sample_rate_hz;  // cycles per sample
  const auto center = static_cast<long>(num_taps / 2);
  std::vector<double> taps(num_taps);
  for (std::size_t i = 0; i < num_taps; ++i) {
    const long m = static_cast<long>(i) - center;
    const double sinc =
        m == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * m) / (std::numbers::pi * m);
    const double window =
        num_taps == 1 ? 1.0
                      : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / static_cast<double>(num_taps - 1));
    taps[i] = sinc * window;
  }
  // Normalize then force exact symmetry; the pairwise average is symmetric bit for bit.
  const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (auto& t : taps) t /= sum;
  for (std::size_t i = 0; i < num_taps / 2; ++i) {
    const double avg = 0.5 * (taps[i] + taps[num_taps - 1 - i]);
    taps[i] = avg;
    taps[num_taps - 1 - i] = avg;
  }

  std::ostringstream design;
  design << "hamming-windowed sinc, " << num_taps << " taps";
  return FirFilter{std::move(taps), cutoff_hz, sample_rate_hz, design.str()};
}

namespace {

// Filtered value at output index n (same-length, centered, zero padded).
double filtered_at(std::span<const double> x, std::span<const double> taps, long n) {
  const long half = static_cast<long>(taps.size() / 2);
  const long len = static_cast<long>(x.size());
  double acc = 0.0;
  for (long i = 0; i < static_cast<long>(taps.size()); ++i) {
    const long j = n + half - i;
    if (j >= 0 && j < len) acc += taps[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
  }
  return acc;
}

long integral_rate(double rate) {
  const double r = std::round(rate);
  if (std::abs(r - rate) > 1e-9 * rate) return 0;
  return static_cast<long>(r);
}

}  // namespace

std::vector<double> filter_same(std::span<const double> x, const FirFilter& filter) {
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = filtered_at(x, filter.taps, static_cast<long>(n));
  return out;
}

double choose_working_rate(double source_rate_hz, double requested_rate_hz) {
  if (!(source_rate_hz > 0.0) || !(requested_rate_hz > 0.0)) {
    throw InvalidArgument("choose_working_rate: rates must be positive");
  }
  if (requested_rate_hz >= source_rate_hz) return source_rate_hz;
  const long src = integral_rate(source_rate_hz);
  if (src == 0) return source_rate_hz;
  for (long k = static_cast<long>(std::floor(source_rate_hz / requested_rate_hz)); k > 1; --k) {
    if (src % k == 0) return static_cast<double>(src / k);
  }
  return source_rate_hz;
}

Signal decimate(const Signal& signal, double target_rate_hz, RatePolicy policy) {
  if (!(target_rate_hz > 0.0)) throw InvalidArgument("decimate: target rate must be positive");
  if (target_rate_hz > signal.sample_rate_hz) {
    throw InvalidArgument("decimate: target rate exceeds source rate (upsampling is not supported)");
  }
  if (policy == RatePolicy::largest_divisor) {
    target_rate_hz = choose_working_rate(signal.sample_rate_hz, target_rate_hz);
  }
  if (target_rate_hz == signal.sample_rate_hz) return signal;

  const double ratio = signal.sample_rate_hz / target_rate_hz;
  const double k_rounded = std::round(ratio);
  if (std::abs(ratio - k_rounded) > 1e-9 * ratio) {
    std::ostringstream msg;
    msg << "decimate: ratio " << signal.sample_rate_hz << "/" << target_rate_hz
        << " is not an integer; pre-resample or request an integer-ratio rate such as "
        << choose_working_rate(signal.sample_rate_hz, target_rate_hz) << " Hz";
    throw InvalidArgument(msg.str());
  }
  const auto k = static_cast<std::size_t>(k_rounded);
  const FirFilter filter =
      design_lowpass(kAntiAliasFraction * target_rate_hz / 2.0, signal.sample_rate_hz, kAntiAliasTaps);

  const std::size_t out_len = (signal.size() + k - 1) / k;
  std::vector<double> out(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    out[i] = filtered_at(signal.samples, filter.taps, static_cast<long>(i * k));
  }
  return Signal(std::move(out), target_rate_hz);
}

Signal pad_or_truncate(const Signal& signal, std::size_t target_len) {
  if (target_len == 0) throw InvalidArgument("pad_or_truncate: target length must be positive");
  const std::size_t len = signal.size();
  if (len == target_len) return signal;
  std::vector<double> out(target_len, 0.0);
  if (len > target_len) {
    const std::size_t start = (len - target_len) / 2;
    std::copy_n(signal.samples.begin() + static_cast<std::ptrdiff_t>(start), target_len, out.begin());
  } else {
    const std::size_t offset = (target_len - len) / 2;
    std::copy(signal.samples.begin(), signal.samples.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
  }
  return Signal(std::move(out), signal.sample_rate_hz);
}

double energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace wvdnet
