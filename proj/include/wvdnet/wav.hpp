#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wvdnet/signal.hpp"

namespace wvdnet {

enum class WavEncoding { pcm16, float32 };

struct WavInfo {
  WavEncoding encoding = WavEncoding::pcm16;
  std::size_t channels = 0;
  double sample_rate_hz = 0.0;
  std::size_t frames = 0;
};

// RIFF/WAVE with PCM 16-bit or IEEE float 32-bit samples (WAVE_FORMAT_EXTENSIBLE
// accepted for either). Unknown chunks are skipped. Returns one Signal per
// channel; int16 samples are divided by 32768.
std::vector<Signal> decode_wav(std::string_view bytes);
std::vector<Signal> read_wav(const std::filesystem::path& path);

// Header-only parse; throws DataError like decode_wav.
WavInfo wav_info(std::string_view bytes);

// Channels must share length and rate. pcm16 clamps to [-1, 1) and rounds
// to the nearest step of 1/32768.
std::string encode_wav(const std::vector<Signal>& channels, WavEncoding encoding = WavEncoding::pcm16);
void write_wav(const std::vector<Signal>& channels, const std::filesystem::path& path,
               WavEncoding encoding = WavEncoding::pcm16);

}  // namespace wvdnet
