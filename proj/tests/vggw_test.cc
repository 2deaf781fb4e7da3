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

#include "styleforge/vggw.h"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "styleforge/errors.h"
#include "styleforge/vgg19.h"
#include "test_util.h"

namespace styleforge {
namespace {

std::vector<std::byte> bytes_of(std::initializer_list<int> v) {
  std::vector<std::byte> out;
  for (int b : v) out.push_back(static_cast<std::byte>(b));
  return out;
}

void append_u32(std::vector<std::byte>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

void append_f32(std::vector<std::byte>& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  append_u32(out, bits);
}

// Hand-assembled file with one entry "ab" of shape [2] = {1.5, -2}.
std::vector<std::byte> tiny_file() {
  std::vector<std::byte> out = bytes_of({'V', 'G', 'G', 'W'});
  append_u32(out, 1);
  append_u32(out, 1);
  out.push_back(std::byte{2});
  out.push_back(std::byte{0});
  out.push_back(std::byte{'a'});
  out.push_back(std::byte{'b'});
  out.push_back(std::byte{0});  // dtype
  out.push_back(std::byte{1});  // rank
  append_u32(out, 2);
  append_f32(out, 1.5f);
  append_f32(out, -2.0f);
  return out;
}

TEST(VggwTest, ParsesHandAssembledBytes) {
  const auto entries = vggw::parse(tiny_file());
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].name, "ab");
  EXPECT_EQ(entries[0].dims, std::vector<std::uint32_t>{2});
  EXPECT_EQ(entries[0].values, (std::vector<float>{1.5f, -2.0f}));
}

TEST(VggwTest, SerializeIsByteExact) {
  vggw::Entry e{"ab", {2}, {1.5f, -2.0f}};
  EXPECT_EQ(vggw::serialize({e}), tiny_file());
}

TEST(VggwTest, RoundTripMultipleEntries) {
  std::vector<vggw::Entry> in = {{"x", {2, 3}, {1, 2, 3, 4, 5, 6}},
                                 {"conv1_1.bias", {1}, {0.25f}},
                                 {"scalarish", {1, 1, 1, 1}, {-7}}};
  const auto out = vggw::parse(vggw::serialize(in));
  ASSERT_EQ(out.size(), in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    EXPECT_EQ(out[i].name, in[i].name);
    EXPECT_EQ(out[i].dims, in[i].dims);
    EXPECT_EQ(out[i].values, in[i].values);
  }
}

TEST(VggwTest, RejectsBadMagic) {
  auto b = tiny_file();
  b[0] = std::byte{'X'};
  EXPECT_THROW(vggw::parse(b), FormatError);
}

TEST(VggwTest, RejectsBadVersion) {
  auto b = tiny_file();
  b[4] = std::byte{2};
  EXPECT_THROW(vggw::parse(b), FormatError);
}

TEST(VggwTest, RejectsNonF32Dtype) {
  auto b = tiny_file();
  b[16] = std::byte{1};
  EXPECT_THROW(vggw::parse(b), FormatError);
}

TEST(VggwTest, RejectsEveryTruncation) {
  const auto b = tiny_file();
  for (std::size_t len = 0; len < b.size(); ++len) {
    EXPECT_THROW(vggw::parse(std::span(b.data(), len)), FormatError) << len;
  }
}

TEST(VggwTest, RejectsTrailingBytes) {
  auto b = tiny_file();
  b.push_back(std::byte{0});
  EXPECT_THROW(vggw::parse(b), FormatError);
}

TEST(VggwTest, RejectsDuplicateNames) {
  vggw::Entry e{"ab", {1}, {1}};
  EXPECT_THROW(vggw::parse(vggw::serialize({e, e})), FormatError);
}

TEST(VggwTest, RejectsHugeDims) {
  std::vector<std::byte> out = bytes_of({'V', 'G', 'G', 'W'});
  append_u32(out, 1);
  append_u32(out, 1);
  out.push_back(std::byte{1});
  out.push_back(std::byte{0});
  out.push_back(std::byte{'a'});
  out.push_back(std::byte{0});
  out.push_back(std::byte{4});
  for (int i = 0; i < 4; ++i) append_u32(out, 0xffffffffu);
  EXPECT_THROW(vggw::parse(out), FormatError);
}

TEST(VggwTest, MissingFileIsIoError) {
  EXPECT_THROW(vggw::read_file("/nonexistent/weights.vggw"), IoError);
}

// Weight-file level checks on a full 16-layer file.
class WeightsFileTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new std::filesystem::path(testing::temp_dir("vggw"));
    save_weights(*dir_ / "full.vggw", testing::shared_weights());
  }
  static void TearDownTestSuite() {
    std::filesystem::remove_all(*dir_);
    delete dir_;
  }
  static std::filesystem::path path(const std::string& name) { return *dir_ / name; }
  static inline std::filesystem::path* dir_ = nullptr;
};

TEST_F(WeightsFileTest, LoadsSixteenLayers) {
  const auto entries = vggw::read_file(path("full.vggw"));
  EXPECT_EQ(entries.size(), 32u);
  VggWeights<float> w = load_weights(path("full.vggw"));
  EXPECT_EQ(w.conv(0).kernel.shape(), (Shape{64, 3, 3, 3}));
  for (std::size_t i = 0; i < kVggConvCount; ++i) {
    EXPECT_EQ(w.conv(i).kernel, testing::shared_weights().conv(i).kernel);
    EXPECT_EQ(w.conv(i).bias, testing::shared_weights().conv(i).bias);
  }
}

TEST_F(WeightsFileTest, MissingLayerIsNamed) {
  auto entries = vggw::read_file(path("full.vggw"));
  std::erase_if(entries, [](const vggw::Entry& e) { return e.name.starts_with("conv3_2."); });
  vggw::write_file(path("missing.vggw"), entries);
  try {
    load_weights(path("missing.vggw"));
    FAIL();
  } catch (const CompletenessError& e) {
    EXPECT_NE(std::string(e.what()).find("conv3_2"), std::string::npos) << e.what();
  }
}

TEST_F(WeightsFileTest, WrongShapeReportsExpectedAndFound) {
  auto entries = vggw::read_file(path("full.vggw"));
  for (auto& e : entries) {
    if (e.name == "conv2_1.bias") {
      e.dims = {127};
      e.values.resize(127);
    }
  }
  vggw::write_file(path("shape.vggw"), entries);
  try {
    load_weights(path("shape.vggw"));
    FAIL();
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("128"), std::string::npos) << msg;
    EXPECT_NE(msg.find("127"), std::string::npos) << msg;
  }
}

TEST_F(WeightsFileTest, TruncatedFileIsFormatError) {
  const auto size = std::filesystem::file_size(path("full.vggw"));
  std::filesystem::copy_file(path("full.vggw"), path("trunc.vggw"));
  std::filesystem::resize_file(path("trunc.vggw"), size - 1000);
  EXPECT_THROW(load_weights(path("trunc.vggw")), FormatError);
}

TEST_F(WeightsFileTest, NonFiniteWeightIsFormatError) {
  auto entries = vggw::read_file(path("full.vggw"));
  entries[5].values[3] = std::numeric_limits<float>::infinity();
  vggw::write_file(path("inf.vggw"), entries);
  EXPECT_THROW(load_weights(path("inf.vggw")), FormatError);
}

TEST_F(WeightsFileTest, NoReferenceBundleByDefault) {
  EXPECT_FALSE(load_reference_bundle(path("full.vggw")).has_value());
}

}  // namespace
}  // namespace styleforge
