#include "wvdnet/synth.hpp"

#include <cmath>
#include <numbers>

#include "wvdnet/error.hpp"
#include "wvdnet/wav.hpp"

namespace fs = std::filesystem;

namespace wvdnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const char* kKindNames[kMaxSynthClasses] = {"tone", "chirp", "noise", "am_tone", "tone_pair"};

// Short raised-cosine fades so clip edges do not click.
void fade(std::vector<double>& x, std::size_t n) {
  n = std::min(n, x.size() / 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    x[i] *= g;
    x[x.size() - 1 - i] *= g;
  }
}

void scale_peak(std::vector<double>& x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0) {
    for (double& v : x) v *= peak / m;
  }
}

}  // namespace

void SynthConfig::validate() const {
  if (num_classes < 1 || num_classes > kMaxSynthClasses) {
    throw InvalidArgument("synth: num_classes must be 1-" + std::to_string(kMaxSynthClasses));
  }
  if (clips_per_class == 0) throw InvalidArgument("synth: clips_per_class must be positive");
  if (!(sample_rate_hz >= 2000.0)) throw InvalidArgument("synth: sample rate must be at least 2000 Hz");
  if (!(seconds > 0)) throw InvalidArgument("synth: seconds must be positive");
  if (!(tone_low_hz > 0 && tone_low_hz < tone_high_hz && tone_high_hz < sample_rate_hz / 2)) {
    throw InvalidArgument("synth: tone band must satisfy 0 < low < high < Nyquist");
  }
}

std::vector<std::string> synth_class_names(std::size_t num_classes) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < num_classes && c < kMaxSynthClasses; ++c) {
    names.push_back(std::to_string(c) + "_" + kKindNames[c]);
  }
  return names;
}

Signal synth_clip(SynthKind kind, const SynthConfig& cfg, Rng& rng) {
  const double fs = cfg.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(cfg.seconds * fs));
  std::vector<double> x(n, 0.0);
  const double phase0 = rng.uniform(0.0, kTwoPi);

  switch (kind) {
    case SynthKind::tone: {
      const double f = rng.uniform(cfg.tone_low_hz, cfg.tone_high_hz);
      for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(kTwoPi * f * static_cast<double>(i) / fs + phase0);
      break;
    }
    case SynthKind::chirp: {
      const double f0 = rng.uniform(150.0, 300.0);
      const double f1 = rng.uniform(650.0, 850.0);
      const double rate = (f1 - f0) / cfg.seconds;
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        x[i] = std::sin(kTwoPi * (f0 * t + 0.5 * rate * t * t) + phase0);
      }
      break;
    }
    case SynthKind::noise_burst: {
      const double lo = rng.uniform(200.0, 400.0);
      const double hi = lo + rng.uniform(200.0, 400.0);
      const FirFilter low_hi = design_lowpass(hi, fs, 101);
      const FirFilter low_lo = design_lowpass(lo, fs, 101);
      FirFilter band = low_hi;
      for (std::size_t k = 0; k < band.taps.size(); ++k) band.taps[k] -= low_lo.taps[k];
      std::vector<double> white(n);
      for (double& v : white) v = rng.normal();
      const std::vector<double> noise = filter_same(white, band);
      const std::size_t bursts = 2 + rng.below(3);
      for (std::size_t b = 0; b < bursts; ++b) {
        const double len = rng.uniform(0.3, 0.8);
        const double start = rng.uniform(0.0, cfg.seconds - len);
        const auto i0 = static_cast<std::size_t>(start * fs);
        const auto m = static_cast<std::size_t>(len * fs);
        for (std::size_t i = 0; i < m && i0 + i < n; ++i) {
          const double env = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(m));
          x[i0 + i] += env * env * noise[i0 + i];
        }
      }
      break;
    }
    case SynthKind::am_tone: {
      const double f = rng.uniform(300.0, 700.0);
      const double fm = rng.uniform(2.0, 6.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        x[i] = (0.6 + 0.4 * std::sin(kTwoPi * fm * t)) * std::sin(kTwoPi * f * t + phase0);
      }
      break;
    }
    case SynthKind::tone_pair: {
      const double f1 = rng.uniform(200.0, 450.0);
      const double f2 = f1 + rng.uniform(150.0, 400.0);
      const double phase1 = rng.uniform(0.0, kTwoPi);
      for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / fs;
        x[i] = std::sin(kTwoPi * f1 * t + phase0) + std::sin(kTwoPi * f2 * t + phase1);
      }
      break;
    }
  }
  fade(x, static_cast<std::size_t>(0.01 * fs));
  scale_peak(x, rng.uniform(0.3, 0.8));
  return Signal(std::move(x), fs);
}

std::vector<fs::path> synth_dataset(const SynthConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  const auto names = synth_class_names(cfg.num_classes);
  std::vector<fs::path> written;
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    const fs::path dir = out_dir / names[c];
    fs::create_directories(dir);
    for (std::size_t j = 0; j < cfg.clips_per_class; ++j) {
      Rng rng(cfg.seed * 0x9e3779b97f4a7c15ULL + c * 1000003ULL + j);
      const Signal s = synth_clip(static_cast<SynthKind>(c), cfg, rng);
      char file[64];
      std::snprintf(file, sizeof file, "%s_%03zu.wav", names[c].c_str(), j);
      write_wav({s}, dir / file);
      written.push_back(dir / file);
    }
  }
  return written;
}

}  // namespace wvdnet
