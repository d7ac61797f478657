#include "wvdnet/analytic.hpp"

#include "wvdnet/error.hpp"

namespace wvdnet {

ComplexSignal::ComplexSignal(std::vector<cplx> s, double rate) : samples(std::move(s)), sample_rate_hz(rate) {
  if (!(rate > 0.0)) throw InvalidArgument("sample rate must be positive");
}

ComplexSignal analytic_signal(const Signal& signal) {
  const std::size_t n = signal.size();
  if (n < 2) throw InvalidArgument("analytic_signal: need at least 2 samples");

  std::vector<cplx> spectrum(signal.samples.begin(), signal.samples.end());
  const FftPlan plan(n);
  plan.forward(spectrum);

  // Bins 1 .. ceil(n/2)-1 are strictly positive frequencies.
  const std::size_t positive_end = (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k) spectrum[k] *= 2.0;
  for (std::size_t k = n / 2 + 1; k < n; ++k) spectrum[k] = 0.0;

  plan.inverse(spectrum);
  return ComplexSignal(std::move(spectrum), signal.sample_rate_hz);
}

ComplexSignal analytic_signal(const ComplexSignal& signal) {
  std::vector<double> re(signal.size());
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (signal.samples[i].imag() != 0.0) throw InvalidArgument("analytic_signal: input must be real-valued");
    re[i] = signal.samples[i].real();
  }
  return analytic_signal(Signal(std::move(re), signal.sample_rate_hz));
}

}  // namespace wvdnet
