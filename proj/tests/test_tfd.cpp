#include <catch2/catch_amalgamated.hpp>

#include <png.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "oracles.hpp"
#include "wvdnet/analytic.hpp"
#include "wvdnet/error.hpp"
#include "wvdnet/image_io.hpp"
#include "wvdnet/rng.hpp"
#include "wvdnet/tfd.hpp"

using namespace wvdnet;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

ComplexSignal random_complex(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> x(n);
  for (auto& v : x) v = cplx(rng.normal(), rng.normal());
  return ComplexSignal(x, 1000);
}

ComplexSignal analytic_tone(double f, double rate, std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2 * std::numbers::pi * f * i / rate);
  return analytic_signal(Signal(x, rate));
}

std::size_t row_argmax(const TFDImage& img, std::size_t r) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < img.cols; ++c) {
    if (img.at(r, c) > img.at(r, best)) best = c;
  }
  return best;
}

TFDImage small_image(std::size_t rows, std::size_t cols, std::vector<double> v) {
  TFDImage img;
  img.rows = rows;
  img.cols = cols;
  img.values = std::move(v);
  for (std::size_t r = 0; r < rows; ++r) img.time_axis_s.push_back(0.25 * r);
  for (std::size_t c = 0; c < cols; ++c) img.freq_axis_hz.push_back(10.0 * c);
  img.source_rate_hz = 100;
  return img;
}

}  // namespace

TEST_CASE("ambiguity_product") {
  const ComplexSignal x = random_complex(32, 1);
  for (long n = 0; n < 32; ++n) CHECK_THAT(ambiguity_product(x, n, 0).real(), WithinAbs(std::norm(x.samples[n]), 1e-14));
  CHECK(ambiguity_product(x, 0, 1) == cplx(0, 0));
  CHECK(ambiguity_product(x, 31, 1) == cplx(0, 0));

  const ComplexSignal ones(std::vector<cplx>(16, cplx(1, 0)), 1000);
  CHECK(ambiguity_product(ones, 7, 3) == cplx(1, 0));

  const double theta = 0.3;
  std::vector<cplx> e(64);
  for (std::size_t i = 0; i < 64; ++i) e[i] = std::polar(1.0, theta * i);
  const ComplexSignal ex(e, 1000);
  for (long n : {10L, 20L, 30L}) {
    CHECK(std::abs(ambiguity_product(ex, n, 4) - std::polar(1.0, 2 * theta * 4)) < 1e-12);
  }
}

TEST_CASE("lag windows") {
  const LagWindow h = hamming_lag_window(127);
  REQUIRE(h.coefficients.size() == 127);
  CHECK(h.coefficients[63] == 1.0);
  for (std::size_t i = 0; i < 127; ++i) CHECK(h.coefficients[i] == h.coefficients[126 - i]);
  CHECK_THROWS_AS(hamming_lag_window(64), InvalidArgument);
  CHECK_THROWS_AS(rectangular_lag_window(0), InvalidArgument);
  CHECK(default_lag_window_length(16000) == 127);
  CHECK(default_lag_window_length(100) == 25);
  CHECK(default_lag_window_length(104) == 25);
  CHECK(default_time_stride(16000) == 14);
  CHECK(default_time_stride(1200) == 1);
}

TEST_CASE("pseudo_wvd equals the defining sum") {
  for (auto [len, wlen, bins, stride] : {std::tuple{200u, 63u, 64u, 3u}, std::tuple{512u, 127u, 128u, 7u},
                                         std::tuple{101u, 31u, 16u, 1u}, std::tuple{64u, 31u, 100u, 2u}}) {
    const ComplexSignal x = random_complex(len, len + wlen);
    const LagWindow h = hamming_lag_window(wlen);
    const TFDImage img = pseudo_wvd(x, h, stride, bins);
    REQUIRE(img.cols == bins);
    REQUIRE(img.rows == (len + stride - 1) / stride);
    double worst = 0, peak = 0;
    for (std::size_t r = 0; r < img.rows; ++r) {
      for (std::size_t k = 0; k < bins; ++k) {
        const double want = 2 * oracle::pwvd_sum(x.samples, h.coefficients, static_cast<long>(r * stride), k, bins).real();
        worst = std::max(worst, std::abs(img.at(r, k) - want));
        peak = std::max(peak, std::abs(want));
      }
    }
    CHECK(worst <= 1e-9 * peak);
  }
}

TEST_CASE("pseudo_wvd is real") {
  const ComplexSignal x = random_complex(300, 9);
  const auto rows = pseudo_wvd_lag_spectrum(x, hamming_lag_window(101), 1, 128);
  double im = 0, re = 0;
  for (const auto& v : rows) {
    im = std::max(im, std::abs(v.imag()));
    re = std::max(re, std::abs(v.real()));
  }
  CHECK(im < 1e-9 * re);
}

TEST_CASE("pseudo_wvd axes and degenerate input") {
  const ComplexSignal zero(std::vector<cplx>(100, cplx{}), 4000);
  const TFDImage img = pseudo_wvd(zero, hamming_lag_window(31), 1, 64);
  for (double v : img.values) CHECK(v == 0.0);
  CHECK(img.freq_axis_hz.front() == 0.0);
  CHECK_THAT(img.freq_axis_hz[1], WithinAbs(4000.0 / 128, 1e-12));
  for (std::size_t k = 1; k < img.cols; ++k) CHECK(img.freq_axis_hz[k] > img.freq_axis_hz[k - 1]);
  CHECK(img.freq_axis_hz.back() < 2000.0);
  CHECK(img.kind == TfdKind::pseudo_wvd);
  CHECK(img.source_rate_hz == 4000);

  CHECK_THROWS_AS(pseudo_wvd(ComplexSignal({}, 4000), hamming_lag_window(31), 1, 64), InvalidArgument);
  CHECK_THROWS_AS(pseudo_wvd(zero, hamming_lag_window(129), 1, 64), InvalidArgument);
  CHECK_THROWS_AS(pseudo_wvd(zero, LagWindow{std::vector<double>(4, 1.0), "even"}, 1, 64), InvalidArgument);
}

TEST_CASE("tone and chirp localization") {
  const ComplexSignal t = analytic_tone(500, 4000, 4000);
  const TFDImage tw = pseudo_wvd(t, rectangular_lag_window(127), 5, 512);
  const std::size_t bin = 128;  // 500 Hz at 4000 / 1024 Hz per bin
  for (std::size_t r = 0; r < tw.rows; ++r) {
    if (tw.time_axis_s[r] < 0.1 || tw.time_axis_s[r] > 0.9) continue;
    CHECK(row_argmax(tw, r) == bin);
  }
  // Hamming window, and the brute-force value at one row agrees.
  const TFDImage th = pseudo_wvd(t, hamming_lag_window(127), 5, 512);
  for (std::size_t r = 20; r + 20 < th.rows; ++r) CHECK(row_argmax(th, r) == bin);
  const auto direct = oracle::pwvd_sum(t.samples, rectangular_lag_window(127).coefficients, 2000, bin, 512);
  CHECK_THAT(tw.at(400, bin), WithinAbs(2 * direct.real(), 1e-9 * std::abs(direct)));

  const double fs = 4000;
  std::vector<double> c(8000);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double s = i / fs;
    c[i] = std::cos(2 * std::numbers::pi * (200 * s + 0.5 * 500 * s * s));
  }
  const TFDImage cw = pseudo_wvd(analytic_signal(Signal(c, fs)), hamming_lag_window(127), 8, 512);
  const double bin_hz = fs / 1024;
  for (std::size_t r = 0; r < cw.rows; ++r) {
    const double s = cw.time_axis_s[r];
    if (s < 0.1 || s > 1.9) continue;
    const double want = (200 + 500 * s) / bin_hz;
    CHECK(std::abs(static_cast<double>(row_argmax(cw, r)) - want) <= 1.0);
  }
}

TEST_CASE("lag window suppresses the two-tone cross term") {
  const double fs = 4000;
  std::vector<double> x(4000);
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = std::cos(2 * std::numbers::pi * 500 * i / fs) + std::cos(2 * std::numbers::pi * 1500 * i / fs);
  const ComplexSignal z = analytic_signal(Signal(x, fs));
  const std::size_t mid = 256;  // 1000 Hz
  auto mid_energy = [&](const TFDImage& img) {
    double e = 0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < img.rows; ++r) {
      if (img.time_axis_s[r] < 0.2 || img.time_axis_s[r] > 0.8) continue;
      e += img.at(r, mid) * img.at(r, mid);
      ++n;
    }
    return e / static_cast<double>(n);
  };
  const double pseudo = mid_energy(pseudo_wvd(z, hamming_lag_window(127), 4, 512));
  const double plain = mid_energy(wvd(z, 4, 512));
  CHECK(plain > 10 * pseudo);
}

TEST_CASE("time marginal of the full WVD") {
  Rng rng(256);
  std::vector<double> r(256);
  for (double& v : r) v = rng.normal();
  const ComplexSignal x = analytic_signal(Signal(r, 1000));
  const TFDImage img = wvd(x, 1, 512);
  const auto m = wvd_time_marginal(img, x);
  for (std::size_t n = 1; n + 1 < 256; ++n) {
    const double want = std::norm(x.samples[n]);
    CHECK(std::abs(m[n] - want) <= 1e-6 * want);
  }

  std::vector<cplx> imp(64, cplx{});
  imp[20] = 1.0;
  const ComplexSignal d(imp, 1000);
  const auto md = wvd_time_marginal(wvd(d, 1, 64), d);
  for (std::size_t n = 0; n < 64; ++n) CHECK_THAT(md[n], WithinAbs(n == 20 ? 1.0 : 0.0, 1e-6));

  const ComplexSignal z(std::vector<cplx>(32, cplx{}), 1000);
  for (double v : wvd_time_marginal(wvd(z, 1, 32), z)) CHECK(v == 0.0);

  CHECK_THROWS_AS(wvd_time_marginal(wvd(x, 2, 512), x), InvalidArgument);
}

TEST_CASE("spectrogram") {
  const ComplexSignal zero(std::vector<cplx>(1024, cplx{}), 4000);
  for (double v : spectrogram(zero, 256, 64).values) CHECK(v == 0.0);

  const ComplexSignal t = analytic_tone(500, 4000, 4000);
  const TFDImage s = spectrogram(t, 256, 128);
  CHECK(s.cols == 129);
  CHECK(s.kind == TfdKind::spectrogram);
  for (std::size_t r = 0; r < s.rows; ++r) CHECK(row_argmax(s, r) == 32);

  const ComplexSignal noise = random_complex(65536, 77);
  const TFDImage sn = spectrogram(noise, 64, 64);
  std::vector<double> col(sn.cols, 0.0);
  for (std::size_t r = 0; r < sn.rows; ++r)
    for (std::size_t c = 0; c < sn.cols; ++c) col[c] += sn.at(r, c);
  std::vector<double> sorted = col;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  for (double v : col) CHECK((v < 3 * median && v > median / 3));

  CHECK_THROWS_AS(spectrogram(t, 256, 0), InvalidArgument);
  CHECK_THROWS_AS(spectrogram(t, 5000, 1), InvalidArgument);
}

TEST_CASE("resize_bilinear") {
  const TFDImage a = small_image(2, 2, {0, 1, 0, 1});
  const TFDImage b = resize_bilinear(a, 2, 3);
  REQUIRE(b.cols == 3);
  CHECK_THAT(b.at(0, 1), WithinAbs(0.5, 1e-15));
  CHECK_THAT(b.at(1, 1), WithinAbs(0.5, 1e-15));
  CHECK(b.time_axis_s.size() == 2);
  CHECK(b.freq_axis_hz.size() == 3);
  CHECK_THAT(b.freq_axis_hz[1], WithinAbs(5.0, 1e-12));

  const TFDImage same = resize_bilinear(a, 2, 2);
  CHECK(same.values == a.values);

  const TFDImage k = resize_bilinear(small_image(3, 4, std::vector<double>(12, 0.7)), 7, 5);
  for (double v : k.values) CHECK_THAT(v, WithinAbs(0.7, 1e-15));

  std::vector<double> plane;
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 6; ++c) plane.push_back(0.5 * r - 0.25 * c + 1.0);
  const TFDImage p = resize_bilinear(small_image(5, 6, plane), 13, 9);
  CHECK(*std::min_element(p.values.begin(), p.values.end()) == *std::min_element(plane.begin(), plane.end()));
  CHECK(*std::max_element(p.values.begin(), p.values.end()) == *std::max_element(plane.begin(), plane.end()));

  CHECK_THROWS_AS(resize_bilinear(a, 0, 3), InvalidArgument);
  CHECK_THROWS_AS(resize_bilinear(small_image(1, 2, {1, 2}), 3, 3), InvalidArgument);
}

TEST_CASE("normalize_image") {
  for (double v : normalize_image(small_image(2, 2, {3, 3, 3, 3})).values) CHECK(v == 0.0);
  const TFDImage n = normalize_image(small_image(2, 2, {-1, 0, 1, 3}));
  CHECK(n.values[0] == 0.0);
  CHECK(n.values[1] == 0.0);
  CHECK_THAT(n.values[2], WithinAbs(1.0 / 3, 1e-15));
  CHECK(n.values[3] == 1.0);

  Rng rng(4);
  std::vector<double> v(50);
  for (double& x : v) x = rng.uniform(0.5, 9.0);
  const TFDImage m = normalize_image(small_image(5, 10, v));
  CHECK(*std::min_element(m.values.begin(), m.values.end()) == 0.0);
  CHECK(*std::max_element(m.values.begin(), m.values.end()) == 1.0);

  const TFDImage lg = normalize_image(small_image(2, 2, {0, 1, 10, 1000}), true);
  CHECK(lg.values[0] == 0.0);
  CHECK(lg.values[3] == 1.0);
  CHECK(lg.values[1] > 1.0 / 1000);
}

TEST_CASE("TFD CSV and PNG export") {
  const fs::path dir = fs::temp_directory_path() / "wvdnet_test_tfd";
  fs::create_directories(dir);
  TFDImage img = small_image(2, 3, {0.0, 0.25, 1.0 / 3, 0.5, 1.0, 0.1234567890123456789});
  img.kind = TfdKind::wvd;

  write_tfd_csv(img, dir / "a.csv");
  const TFDImage back = read_tfd_csv(dir / "a.csv");
  CHECK(back.values == img.values);
  CHECK(back.time_axis_s == img.time_axis_s);
  CHECK(back.freq_axis_hz == img.freq_axis_hz);
  CHECK(back.kind == TfdKind::wvd);
  CHECK(back.source_rate_hz == 100);
  const std::string text = tfd_to_csv(img);
  CHECK(text.rfind("# kind=wvd,source_rate_hz=100,rows=2,cols=3\ntime_s,0,10,20\n0,0,0.25,", 0) == 0);

  write_png(img, dir / "a.png");
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  REQUIRE(png_image_begin_read_from_file(&png, (dir / "a.png").c_str()));
  png.format = PNG_FORMAT_GRAY;
  std::vector<unsigned char> px(PNG_IMAGE_SIZE(png));
  REQUIRE(png_image_finish_read(&png, nullptr, px.data(), 0, nullptr));
  CHECK(png.width == 3);
  CHECK(png.height == 2);
  CHECK(px == std::vector<unsigned char>{0, 64, 85, 128, 255, 31});
  fs::remove_all(dir);
}
