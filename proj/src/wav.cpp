#include "wvdnet/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"

namespace wvdnet {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t le16(const char* p) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) | (static_cast<unsigned char>(p[1]) << 8));
}

std::uint32_t le32(const char* p) {
  return static_cast<std::uint32_t>(le16(p)) | (static_cast<std::uint32_t>(le16(p + 2)) << 16);
}

struct Parsed {
  WavInfo info;
  std::string_view data;
};

Parsed parse(std::string_view bytes, bool need_data) {
  if (bytes.size() < 12) throw DataError("wav: file shorter than the RIFF header");
  if (bytes.substr(0, 4) != "RIFF") throw DataError("wav: missing 'RIFF' chunk id");
  if (bytes.substr(8, 4) != "WAVE") throw DataError("wav: RIFF form type is not 'WAVE'");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, block_align = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 8) throw DataError("wav: truncated chunk header at byte " + std::to_string(pos));
    const std::string id(bytes.substr(pos, 4));
    const std::size_t size = le32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      throw DataError("wav: chunk '" + id + "' truncated (declares " + std::to_string(size) + " bytes, " +
                      std::to_string(bytes.size() - body) + " available)");
    }
    if (id == "fmt ") {
      if (size < 16) throw DataError("wav: chunk 'fmt ' too short");
      const char* f = bytes.data() + body;
      format = le16(f);
      channels = le16(f + 2);
      rate = le32(f + 4);
      block_align = le16(f + 12);
      bits = le16(f + 14);
      if (format == kFormatExtensible) {
        if (size < 40) throw DataError("wav: chunk 'fmt ' too short for WAVE_FORMAT_EXTENSIBLE");
        format = le16(f + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw DataError("wav: chunk 'data' precedes chunk 'fmt '");
      const bool pcm16 = format == kFormatPcm && bits == 16;
      const bool f32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !f32) {
        throw DataError("wav: chunk 'fmt ' declares unsupported encoding (format " + std::to_string(format) + ", " +
                        std::to_string(bits) + " bits); only PCM16 and float32 are supported");
      }
      if (channels == 0) throw DataError("wav: chunk 'fmt ' declares zero channels");
      if (rate == 0) throw DataError("wav: chunk 'fmt ' declares a zero sample rate");
      const std::size_t frame_bytes = channels * (bits / 8u);
      if (block_align != frame_bytes) throw DataError("wav: chunk 'fmt ' block align does not match channels*bits");
      if (size % frame_bytes != 0) throw DataError("wav: chunk 'data' is not a whole number of frames");
      Parsed p;
      p.info.encoding = pcm16 ? WavEncoding::pcm16 : WavEncoding::float32;
      p.info.channels = channels;
      p.info.sample_rate_hz = rate;
      p.info.frames = size / frame_bytes;
      p.data = bytes.substr(body, size);
      return p;
    }
    pos = body + size + (size & 1u);
    if (pos > bytes.size() && need_data) break;
  }
  throw DataError(have_fmt ? "wav: no 'data' chunk" : "wav: no 'fmt ' chunk");
}

}  // namespace

WavInfo wav_info(std::string_view bytes) { return parse(bytes, false).info; }

std::vector<Signal> decode_wav(std::string_view bytes) {
  const Parsed p = parse(bytes, true);
  const std::size_t ch = p.info.channels;
  std::vector<std::vector<double>> samples(ch, std::vector<double>(p.info.frames));
  const char* d = p.data.data();
  for (std::size_t f = 0; f < p.info.frames; ++f) {
    for (std::size_t c = 0; c < ch; ++c) {
      if (p.info.encoding == WavEncoding::pcm16) {
        const auto v = static_cast<std::int16_t>(le16(d + 2 * (f * ch + c)));
        samples[c][f] = static_cast<double>(v) / 32768.0;
      } else {
        const std::uint32_t bits = le32(d + 4 * (f * ch + c));
        float v;
        std::memcpy(&v, &bits, sizeof v);
        samples[c][f] = v;
      }
    }
  }
  std::vector<Signal> out;
  for (auto& s : samples) out.emplace_back(std::move(s), p.info.sample_rate_hz);
  return out;
}

std::vector<Signal> read_wav(const std::filesystem::path& path) { return decode_wav(read_file(path)); }

namespace {

void put16(std::string& s, std::uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& s, std::uint32_t v) {
  put16(s, static_cast<std::uint16_t>(v & 0xffff));
  put16(s, static_cast<std::uint16_t>(v >> 16));
}

}  // namespace

std::string encode_wav(const std::vector<Signal>& channels, WavEncoding encoding) {
  if (channels.empty()) throw InvalidArgument("encode_wav: no channels");
  const std::size_t frames = channels.front().size();
  const double rate = channels.front().sample_rate_hz;
  for (const auto& c : channels) {
    if (c.size() != frames || c.sample_rate_hz != rate) {
      throw InvalidArgument("encode_wav: channels differ in length or rate");
    }
  }
  if (rate != std::round(rate)) throw InvalidArgument("encode_wav: sample rate must be an integer");
  const std::uint16_t bits = encoding == WavEncoding::pcm16 ? 16 : 32;
  const auto ch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(frames * ch * (bits / 8u));

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, encoding == WavEncoding::pcm16 ? kFormatPcm : kFormatFloat);
  put16(out, ch);
  put32(out, static_cast<std::uint32_t>(rate));
  put32(out, static_cast<std::uint32_t>(rate) * ch * (bits / 8u));
  put16(out, static_cast<std::uint16_t>(ch * (bits / 8u)));
  put16(out, bits);
  out += "data";
  put32(out, data_bytes);
  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& c : channels) {
      if (encoding == WavEncoding::pcm16) {
        const double scaled = std::round(std::clamp(c.samples[f], -1.0, 1.0) * 32768.0);
        put16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0))));
      } else {
        const float v = static_cast<float>(c.samples[f]);
        std::uint32_t b;
        std::memcpy(&b, &v, sizeof b);
        put32(out, b);
      }
    }
  }
  return out;
}

void write_wav(const std::vector<Signal>& channels, const std::filesystem::path& path, WavEncoding encoding) {
  write_file_atomic(path, encode_wav(channels, encoding));
}

}  // namespace wvdnet
