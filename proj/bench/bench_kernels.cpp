// Serial reference vs OpenMP backend on the hot loops. Arg 0 = serial, 1 = omp.

#include <benchmark/benchmark.h>

#include <vector>

#include "wvdnet/analytic.hpp"
#include "wvdnet/kernels.hpp"
#include "wvdnet/pipeline.hpp"
#include "wvdnet/rng.hpp"
#include "wvdnet/tfd.hpp"

using namespace wvdnet;

namespace {

kernels::Backend backend(const benchmark::State& s) {
  return s.range(0) ? kernels::Backend::omp : kernels::Backend::serial;
}

Signal noise(std::size_t n, double rate) {
  Rng rng(1);
  std::vector<double> x(n);
  for (double& v : x) v = rng.normal();
  return Signal(x, rate);
}

std::vector<float> random_floats(std::size_t n) {
  Rng rng(2);
  std::vector<float> v(n);
  for (float& f : v) f = static_cast<float>(rng.uniform(-1, 1));
  return v;
}

void BM_PseudoWvd(benchmark::State& state) {
  const ComplexSignal x = analytic_signal(noise(16000, 4000));
  const LagWindow h = hamming_lag_window(127);
  for (auto _ : state) benchmark::DoNotOptimize(pseudo_wvd(x, h, 14, 512, backend(state)));
}
BENCHMARK(BM_PseudoWvd)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ClipToImage(benchmark::State& state) {
  const Signal clip = noise(4 * 44100, 44100);
  const PipelineConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(clip_to_image({clip}, cfg, backend(state)));
}
BENCHMARK(BM_ClipToImage)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// First conv stage of the reference network at 150x150.
void BM_ConvForward(benchmark::State& state) {
  const kernels::ConvGeometry g{16, 75, 75, 32, 3, 3, 1, 1};
  const auto in = random_floats(g.in_ch * g.in_h * g.in_w);
  const auto w = random_floats(g.out_ch * g.in_ch * 9);
  const auto b = random_floats(g.out_ch);
  std::vector<float> out(g.out_ch * g.out_h() * g.out_w());
  for (auto _ : state) {
    kernels::conv2d_forward(g, in.data(), w.data(), b.data(), out.data(), backend(state));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ConvForward)->Arg(0)->Arg(1);

void BM_ConvBackward(benchmark::State& state) {
  const kernels::ConvGeometry g{16, 75, 75, 32, 3, 3, 1, 1};
  const auto in = random_floats(g.in_ch * g.in_h * g.in_w);
  const auto w = random_floats(g.out_ch * g.in_ch * 9);
  const auto go = random_floats(g.out_ch * g.out_h() * g.out_w());
  std::vector<float> gi(in.size()), gw(w.size()), gb(g.out_ch);
  for (auto _ : state) {
    kernels::conv2d_backward_input(g, go.data(), w.data(), gi.data(), backend(state));
    kernels::conv2d_backward_params(g, go.data(), in.data(), gw.data(), gb.data(), backend(state));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_ConvBackward)->Arg(0)->Arg(1);

void BM_LinearForward(benchmark::State& state) {
  const std::size_t batch = 8, in_f = 20736, out_f = 500;
  const auto x = random_floats(batch * in_f);
  const auto w = random_floats(in_f * out_f);
  const auto b = random_floats(out_f);
  std::vector<float> y(batch * out_f);
  for (auto _ : state) {
    kernels::linear_forward(batch, in_f, out_f, x.data(), w.data(), b.data(), y.data(), backend(state));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_LinearForward)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
