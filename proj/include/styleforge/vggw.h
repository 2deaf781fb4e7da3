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

#ifndef STYLEFORGE_VGGW_H_
#define STYLEFORGE_VGGW_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace styleforge::vggw {

// VGGW container, little-endian throughout:
//
//   "VGGW" | u32 version (=1) | u32 entry_count
//   per entry: u16 name_len | name (UTF-8) | u8 dtype (0 = f32) | u8 rank |
//              u32 dims[rank] | f32 payload[prod(dims)] (row-major)
//
// Nothing may follow the last entry.

inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::uint8_t kDtypeF32 = 0;

struct Entry {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  std::size_t numel() const;
};

// Throws FormatError on bad magic, unsupported version or dtype, truncated
// data, duplicate names, or trailing bytes. Never returns partial results.
std::vector<Entry> parse(std::span<const std::byte> bytes);
std::vector<Entry> read_file(const std::filesystem::path& path);

std::vector<std::byte> serialize(const std::vector<Entry>& entries);
void write_file(const std::filesystem::path& path,
                const std::vector<Entry>& entries);

}  // namespace styleforge::vggw

#endif  // STYLEFORGE_VGGW_H_
