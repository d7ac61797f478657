#pragma once

#include <filesystem>
#include <string>

#include "wvdnet/tfd.hpp"

namespace wvdnet {

// 8-bit grayscale PNG, pixel = round(255 * clamp(v, 0, 1)). Row 0 (earliest
// time) is the top of the image; frequency increases left to right.
void write_png(const TFDImage& image, const std::filesystem::path& path);

// CSV with a two-line header:
//   # kind=<kind>,source_rate_hz=<rate>,rows=<R>,cols=<C>
//   time_s,<freq_0>,...,<freq_C-1>
// followed by one line per time row: <time_s>,<v_0>,...,<v_C-1>.
// Numbers use %.17g so the file round-trips doubles exactly.
std::string tfd_to_csv(const TFDImage& image);
TFDImage tfd_from_csv(const std::string& text);

void write_tfd_csv(const TFDImage& image, const std::filesystem::path& path);
TFDImage read_tfd_csv(const std::filesystem::path& path);

}  // namespace wvdnet
