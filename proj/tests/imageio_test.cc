/* Copyright 2026 The StyleForge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "styleforge/imageio.h"

#include <gtest/gtest.h>

#include <csetjmp>
#include <cstdio>
#include <fstream>

#include <jpeglib.h>

#include "test_util.h"

namespace styleforge {
namespace {

RgbImage make_image(std::size_t w, std::size_t h, auto fn) {
  RgbImage img{w, h, std::vector<std::uint8_t>(w * h * 3)};
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      for (std::size_t c = 0; c < 3; ++c) img.pixels[(y * w + x) * 3 + c] = fn(x, y, c);
  return img;
}

// max_dim equal to the longest side, so no resize happens.
NormalizationSpec identity_spec(std::size_t max_dim) {
  NormalizationSpec s;
  s.max_dim = max_dim;
  s.mean = {0, 0, 0};
  s.std = {1, 1, 1};
  return s;
}

void write_jpeg(const std::filesystem::path& path, const RgbImage& img, int quality) {
  jpeg_compress_struct cinfo;
  jpeg_error_mgr jerr;
  cinfo.err = jpeg_std_error(&jerr);
  jpeg_create_compress(&cinfo);
  FILE* f = std::fopen(path.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  jpeg_stdio_dest(&cinfo, f);
  cinfo.image_width = static_cast<JDIMENSION>(img.width);
  cinfo.image_height = static_cast<JDIMENSION>(img.height);
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    JSAMPROW row = const_cast<JSAMPROW>(img.pixels.data() + cinfo.next_scanline * img.width * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
  std::fclose(f);
}

// Bilinear sample with half-pixel centers and edge clamping, written out
// directly for one output coordinate.
double bilinear_oracle(const Tensor& in, std::size_t c, std::size_t oy, std::size_t ox,
                       std::size_t out_h, std::size_t out_w) {
  const Shape& s = in.shape();
  auto src = [](std::size_t o, std::size_t out_n, std::size_t in_n) {
    double v = (o + 0.5) * double(in_n) / double(out_n) - 0.5;
    return std::clamp(v, 0.0, double(in_n - 1));
  };
  const double sy = src(oy, out_h, s.h), sx = src(ox, out_w, s.w);
  const std::size_t y0 = std::size_t(std::floor(sy)), x0 = std::size_t(std::floor(sx));
  const std::size_t y1 = std::min(y0 + 1, s.h - 1), x1 = std::min(x0 + 1, s.w - 1);
  const double fy = sy - double(y0), fx = sx - double(x0);
  const double top = (1 - fx) * in.at(0, c, y0, x0) + fx * in.at(0, c, y0, x1);
  const double bot = (1 - fx) * in.at(0, c, y1, x0) + fx * in.at(0, c, y1, x1);
  return (1 - fy) * top + fy * bot;
}

class ImageIoTest : public ::testing::Test {
 protected:
  void SetUp() override { dir_ = testing::temp_dir("imageio"); }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(ImageIoTest, MidGrayNormalization) {
  write_png(dir_ / "gray.png", make_image(40, 36, [](auto, auto, auto) { return 128; }));
  NormalizationSpec spec;
  spec.max_dim = 40;
  Tensor t = load_normalize(dir_ / "gray.png", spec);
  EXPECT_EQ(t.shape(), (Shape{1, 3, 36, 40}));
  for (std::size_t c = 0; c < 3; ++c) {
    const double expected = (128.0 / 255.0 - spec.mean[c]) / spec.std[c];
    for (float v : t.channel(0, c)) ASSERT_NEAR(v, expected, 1e-6);
  }
}

TEST_F(ImageIoTest, IdentityNormalizationIsUnitScaled) {
  RgbImage img = make_image(33, 35, [](auto x, auto y, auto c) { return (x * 7 + y * 3 + c * 50) % 256; });
  write_png(dir_ / "a.png", img);
  Tensor t = load_normalize(dir_ / "a.png", identity_spec(35));
  for (std::size_t y = 0; y < 35; ++y)
    for (std::size_t x = 0; x < 33; ++x)
      for (std::size_t c = 0; c < 3; ++c)
        ASSERT_FLOAT_EQ(t.at(0, c, y, x), img.pixels[(y * 33 + x) * 3 + c] / 255.0f);
}

TEST_F(ImageIoTest, LongestSideFitsMaxDim) {
  EXPECT_EQ(fit_longest_side(800, 600, 400), (std::array<std::size_t, 2>{400, 300}));
  EXPECT_EQ(fit_longest_side(600, 800, 400), (std::array<std::size_t, 2>{300, 400}));
  // The longest side always becomes max_dim, upscaling if necessary.
  EXPECT_EQ(fit_longest_side(300, 200, 400), (std::array<std::size_t, 2>{400, 266}));
  EXPECT_EQ(fit_longest_side(400, 400, 400), (std::array<std::size_t, 2>{400, 400}));
  write_png(dir_ / "big.png", make_image(800, 600, [](auto x, auto, auto) { return x % 256; }));
  Tensor t = load_normalize(dir_ / "big.png", NormalizationSpec{});
  EXPECT_EQ(t.shape(), (Shape{1, 3, 300, 400}));
}

TEST_F(ImageIoTest, PngRoundTripIsExact) {
  RgbImage img = make_image(37, 41, [](auto x, auto y, auto c) { return (x * 31 + y * 17 + c * 89) % 256; });
  write_png(dir_ / "in.png", img);
  NormalizationSpec spec;
  spec.max_dim = 41;
  Tensor t = load_normalize(dir_ / "in.png", spec);
  denormalize_save(t, spec, dir_ / "out.png");
  RgbImage back = read_image(dir_ / "out.png");
  ASSERT_EQ(back.width, img.width);
  ASSERT_EQ(back.height, img.height);
  int max_diff = 0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    max_diff = std::max(max_diff, std::abs(int(back.pixels[i]) - int(img.pixels[i])));
  EXPECT_LE(max_diff, 1);
}

TEST_F(ImageIoTest, OutOfRangeValuesAreClamped) {
  Tensor t(Shape{1, 3, 2, 2}, std::vector<float>{50, -50, 0, 1, 50, -50, 0, 1, 50, -50, 0, 1});
  RgbImage img = denormalize(t, NormalizationSpec{});
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(img.pixels[0 * 3 + c], 255);
    EXPECT_EQ(img.pixels[1 * 3 + c], 0);
  }
  denormalize_save(t, NormalizationSpec{}, dir_ / "clamped.png");
  EXPECT_EQ(read_image(dir_ / "clamped.png").width, 2u);
}

TEST_F(ImageIoTest, ZeroTensorMapsToMeanColor) {
  RgbImage img = denormalize(Tensor(Shape{1, 3, 1, 1}), NormalizationSpec{});
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{124, 116, 104}));
}

TEST_F(ImageIoTest, NonFiniteTensorRejected) {
  Tensor t(Shape{1, 3, 1, 1});
  t[1] = std::numeric_limits<float>::quiet_NaN();
  EXPECT_THROW(denormalize(t, NormalizationSpec{}), NumericError);
}

TEST_F(ImageIoTest, ReadsJpeg) {
  RgbImage img = make_image(48, 40, [](auto x, auto y, auto c) {
    return c == 0 ? 200 : (c == 1 ? 60 + (x + y) : 30);
  });
  write_jpeg(dir_ / "a.jpg", img, 95);
  RgbImage got = read_image(dir_ / "a.jpg");
  ASSERT_EQ(got.width, 48u);
  ASSERT_EQ(got.height, 40u);
  double err = 0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    err += std::abs(double(got.pixels[i]) - double(img.pixels[i]));
  EXPECT_LT(err / double(img.pixels.size()), 4.0);
  Tensor t = load_normalize(dir_ / "a.jpg", identity_spec(48));
  EXPECT_EQ(t.shape(), (Shape{1, 3, 40, 48}));
  for (std::size_t y = 0; y < 40; ++y)
    for (std::size_t x = 0; x < 48; ++x)
      ASSERT_FLOAT_EQ(t.at(0, 1, y, x), got.pixels[(y * 48 + x) * 3 + 1] / 255.0f);
}

TEST_F(ImageIoTest, Errors) {
  EXPECT_THROW(load_normalize(dir_ / "missing.png", NormalizationSpec{}), IoError);
  std::ofstream(dir_ / "junk.png") << "definitely not an image";
  EXPECT_THROW(load_normalize(dir_ / "junk.png", NormalizationSpec{}), FormatError);
  // A PNG signature followed by garbage is a format error, not a crash.
  {
    std::ofstream f(dir_ / "broken.png", std::ios::binary);
    const unsigned char sig[] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n', 1, 2, 3};
    f.write(reinterpret_cast<const char*>(sig), sizeof sig);
  }
  EXPECT_THROW(load_normalize(dir_ / "broken.png", NormalizationSpec{}), FormatError);
  {
    std::ofstream f(dir_ / "broken.jpg", std::ios::binary);
    const unsigned char sig[] = {0xff, 0xd8, 0xff, 0xe0, 0, 1, 2};
    f.write(reinterpret_cast<const char*>(sig), sizeof sig);
  }
  EXPECT_THROW(load_normalize(dir_ / "broken.jpg", NormalizationSpec{}), FormatError);
  write_png(dir_ / "small.png", make_image(31, 64, [](auto, auto, auto) { return 0; }));
  EXPECT_THROW(load_normalize(dir_ / "small.png", identity_spec(64)), DegenerateInputError);
  // Downscaling can push a side below the minimum too.
  write_png(dir_ / "thin.png", make_image(800, 40, [](auto, auto, auto) { return 0; }));
  EXPECT_THROW(load_normalize(dir_ / "thin.png", NormalizationSpec{}), DegenerateInputError);
  EXPECT_THROW(denormalize_save(Tensor(Shape{1, 3, 2, 2}), NormalizationSpec{},
                                "/nonexistent/dir/out.png"),
               IoError);
}

TEST(NormalizationSpecTest, Validation) {
  NormalizationSpec s;
  EXPECT_NO_THROW(s.validate());
  s.std[1] = 0;
  EXPECT_THROW(s.validate(), ValidationError);
  s = {};
  s.max_dim = 16;
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(ResizeTest, MatchesOracle) {
  std::mt19937_64 rng(1);
  for (auto [ih, iw, oh, ow] : {std::array<std::size_t, 4>{7, 9, 3, 4},
                                {5, 5, 11, 8},
                                {40, 30, 17, 33},
                                {2, 3, 1, 1}}) {
    Tensor in = testing::random_tensor<float>(Shape{1, 3, ih, iw}, rng);
    Tensor out = resize_bilinear(in, oh, ow);
    ASSERT_EQ(out.shape(), (Shape{1, 3, oh, ow}));
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < oh; ++y)
        for (std::size_t x = 0; x < ow; ++x)
          ASSERT_NEAR(out.at(0, c, y, x), bilinear_oracle(in, c, y, x, oh, ow), 1e-5);
  }
}

TEST(ResizeTest, PreservesRangeAndConstants) {
  std::mt19937_64 rng(2);
  Tensor in = testing::random_tensor<float>(Shape{1, 3, 23, 31}, rng, 0.2, 0.7);
  Tensor out = resize_bilinear(in, 9, 50);
  for (float v : out.data()) {
    ASSERT_GE(v, 0.2f);
    ASSERT_LE(v, 0.7f);
  }
  Tensor flat(Shape{1, 3, 10, 10}, 0.3f);
  Tensor small = resize_bilinear(flat, 4, 7);
  for (float v : small.data()) EXPECT_EQ(v, 0.3f);
}

TEST(ResizeTest, SameSizeIsIdentity) {
  std::mt19937_64 rng(3);
  Tensor in = testing::random_tensor<float>(Shape{1, 3, 6, 5}, rng);
  EXPECT_EQ(resize_bilinear(in, 6, 5), in);
}

}  // namespace
}  // namespace styleforge
