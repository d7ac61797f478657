#pragma once

#include <vector>

#include "wvdnet/fft.hpp"
#include "wvdnet/signal.hpp"

namespace wvdnet {

struct ComplexSignal {
  std::vector<cplx> samples;
  double sample_rate_hz = 0.0;

  ComplexSignal() = default;
  ComplexSignal(std::vector<cplx> s, double rate);

  std::size_t size() const { return samples.size(); }
};

// Analytic signal via the frequency-domain Hilbert construction: keep DC (and
// Nyquist for even lengths), double the positive frequencies, zero the
// negative ones. The real part reproduces the input.
ComplexSignal analytic_signal(const Signal& signal);

// Overload for inputs that may carry an imaginary part; any nonzero
// imaginary component is rejected.
ComplexSignal analytic_signal(const ComplexSignal& signal);

}  // namespace wvdnet
