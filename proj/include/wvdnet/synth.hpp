#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wvdnet/rng.hpp"
#include "wvdnet/signal.hpp"

namespace wvdnet {

// Class ids of the synthetic set, in label order.
enum class SynthKind { tone = 0, chirp = 1, noise_burst = 2, am_tone = 3, tone_pair = 4 };

inline constexpr std::size_t kMaxSynthClasses = 5;

struct SynthConfig {
  std::size_t num_classes = 3;
  std::size_t clips_per_class = 50;
  std::uint64_t seed = 0;
  double sample_rate_hz = 8000.0;
  double seconds = 4.0;
  double tone_low_hz = 250.0;  // class-0 tone frequency range
  double tone_high_hz = 750.0;

  void validate() const;
};

// Folder names "<id>_<kind>", e.g. "0_tone".
std::vector<std::string> synth_class_names(std::size_t num_classes);

// All content lies within 150-900 Hz so it survives decimation to 4 kHz.
Signal synth_clip(SynthKind kind, const SynthConfig& cfg, Rng& rng);

// Writes <out>/<class>/<class>_NNN.wav (PCM16); returns the paths written.
// Clip j of class c draws from its own stream, so output is byte-identical
// for a given seed.
std::vector<std::filesystem::path> synth_dataset(const SynthConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace wvdnet
