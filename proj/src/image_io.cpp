#include "wvdnet/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "wvdnet/error.hpp"
#include "wvdnet/fileutil.hpp"

namespace wvdnet {

void write_png(const TFDImage& image, const std::filesystem::path& path) {
  if (image.rows == 0 || image.cols == 0) throw InvalidArgument("write_png: empty image");
  std::vector<unsigned char> pixels(image.rows * image.cols);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const double v = std::clamp(image.values[i], 0.0, 1.0);
    pixels[i] = static_cast<unsigned char>(std::lround(255.0 * v));
  }

  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.cols);
  png.height = static_cast<png_uint_32>(image.rows);
  png.format = PNG_FORMAT_GRAY;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(png, size, 0, pixels.data(), 0, nullptr)) {
    throw DataError(std::string("write_png: ") + png.message);
  }
  std::string buffer(size, '\0');
  if (!png_image_write_to_memory(&png, buffer.data(), &size, 0, pixels.data(), 0, nullptr)) {
    throw DataError(std::string("write_png: ") + png.message);
  }
  buffer.resize(size);
  write_file_atomic(path, buffer);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("tfd csv: bad number for ") + what + ": '" + s + "'");
  }
}

}  // namespace

std::string tfd_to_csv(const TFDImage& image) {
  std::string out;
  out += "# kind=" + to_string(image.kind) + ",source_rate_hz=" + fmt(image.source_rate_hz) +
         ",rows=" + std::to_string(image.rows) + ",cols=" + std::to_string(image.cols) + "\n";
  out += "time_s";
  for (double f : image.freq_axis_hz) out += "," + fmt(f);
  out += "\n";
  for (std::size_t r = 0; r < image.rows; ++r) {
    out += fmt(image.time_axis_s[r]);
    for (std::size_t c = 0; c < image.cols; ++c) out += "," + fmt(image.at(r, c));
    out += "\n";
  }
  return out;
}

TFDImage tfd_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw DataError("tfd csv: missing metadata line");

  TFDImage img;
  for (const auto& kv : split_commas(line.substr(2))) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("tfd csv: malformed metadata entry '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    if (key == "kind") {
      img.kind = tfd_kind_from_string(value);
    } else if (key == "source_rate_hz") {
      img.source_rate_hz = parse_double(value, "source_rate_hz");
    } else if (key == "rows") {
      img.rows = static_cast<std::size_t>(parse_double(value, "rows"));
    } else if (key == "cols") {
      img.cols = static_cast<std::size_t>(parse_double(value, "cols"));
    } else {
      throw DataError("tfd csv: unknown metadata key '" + key + "'");
    }
  }

  if (!std::getline(in, line)) throw DataError("tfd csv: missing axis header line");
  auto header = split_commas(line);
  if (header.empty() || header[0] != "time_s" || header.size() != img.cols + 1) {
    throw DataError("tfd csv: axis header does not match cols");
  }
  for (std::size_t c = 0; c < img.cols; ++c) img.freq_axis_hz.push_back(parse_double(header[c + 1], "frequency"));

  img.values.reserve(img.rows * img.cols);
  for (std::size_t r = 0; r < img.rows; ++r) {
    if (!std::getline(in, line)) throw DataError("tfd csv: expected " + std::to_string(img.rows) + " rows");
    const auto fields = split_commas(line);
    if (fields.size() != img.cols + 1) throw DataError("tfd csv: row " + std::to_string(r) + " has wrong width");
    img.time_axis_s.push_back(parse_double(fields[0], "time"));
    for (std::size_t c = 0; c < img.cols; ++c) img.values.push_back(parse_double(fields[c + 1], "value"));
  }
  return img;
}

void write_tfd_csv(const TFDImage& image, const std::filesystem::path& path) {
  write_file_atomic(path, tfd_to_csv(image));
}

TFDImage read_tfd_csv(const std::filesystem::path& path) { return tfd_from_csv(read_file(path)); }

}  // namespace wvdnet
