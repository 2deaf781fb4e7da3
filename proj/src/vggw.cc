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

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "styleforge/errors.h"

namespace styleforge::vggw {
namespace {

constexpr char kMagic[4] = {'V', 'G', 'G', 'W'};

template <typename U>
U byteswap_if_needed(U v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(U)];
    std::memcpy(b, &v, sizeof(U));
    for (std::size_t i = 0; i < sizeof(U) / 2; ++i) {
      std::swap(b[i], b[sizeof(U) - 1 - i]);
    }
    std::memcpy(&v, b, sizeof(U));
  }
  return v;
}

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename U>
  U read() {
    U v;
    std::memcpy(&v, take(sizeof(U)).data(), sizeof(U));
    return byteswap_if_needed(v);
  }

  std::span<const std::byte> take(std::size_t n) {
    if (n > bytes_.size() - pos_) {
      throw FormatError("VGGW: truncated file (needed " + std::to_string(n) +
                        " bytes at offset " + std::to_string(pos_) + ")");
    }
    auto out = bytes_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t offset() const { return pos_; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

class Writer {
 public:
  template <typename U>
  void write(U v) {
    v = byteswap_if_needed(v);
    const auto* p = reinterpret_cast<const std::byte*>(&v);
    out_.insert(out_.end(), p, p + sizeof(U));
  }
  void write_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::byte*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  std::vector<std::byte> take() { return std::move(out_); }

 private:
  std::vector<std::byte> out_;
};

}  // namespace

std::size_t Entry::numel() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

std::vector<Entry> parse(std::span<const std::byte> bytes) {
  Reader in(bytes);
  auto magic = in.take(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw FormatError("VGGW: bad magic (not a VGGW file)");
  }
  const auto version = in.read<std::uint32_t>();
  if (version != kVersion) {
    throw FormatError("VGGW: unsupported version " + std::to_string(version));
  }
  const auto count = in.read<std::uint32_t>();
  std::vector<Entry> entries;
  std::set<std::string> seen;
  for (std::uint32_t e = 0; e < count; ++e) {
    Entry entry;
    const auto name_len = in.read<std::uint16_t>();
    auto name = in.take(name_len);
    entry.name.assign(reinterpret_cast<const char*>(name.data()), name.size());
    if (!seen.insert(entry.name).second) {
      throw FormatError("VGGW: duplicate entry '" + entry.name + "'");
    }
    const auto dtype = in.read<std::uint8_t>();
    if (dtype != kDtypeF32) {
      throw FormatError("VGGW: entry '" + entry.name + "' has unsupported dtype " +
                        std::to_string(dtype));
    }
    const auto rank = in.read<std::uint8_t>();
    entry.dims.resize(rank);
    for (auto& d : entry.dims) d = in.read<std::uint32_t>();
    const std::size_t capacity = (bytes.size() - in.offset()) / sizeof(float);
    std::size_t n = 1;
    for (auto d : entry.dims) {
      if (d != 0 && n > capacity / d) {
        throw FormatError("VGGW: truncated payload for entry '" + entry.name + "'");
      }
      n *= d;
    }
    entry.values.resize(n);
    auto payload = in.take(n * sizeof(float));
    std::memcpy(entry.values.data(), payload.data(), payload.size());
    if constexpr (std::endian::native == std::endian::big) {
      for (auto& v : entry.values) {
        v = std::bit_cast<float>(byteswap_if_needed(std::bit_cast<std::uint32_t>(v)));
      }
    }
    entries.push_back(std::move(entry));
  }
  if (!in.done()) {
    throw FormatError("VGGW: " + std::to_string(bytes.size() - in.offset()) +
                      " trailing bytes after last entry");
  }
  return entries;
}

std::vector<Entry> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open weights file " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("failed reading " + path.string());
  return parse(std::as_bytes(std::span<const char>(raw)));
}

std::vector<std::byte> serialize(const std::vector<Entry>& entries) {
  Writer out;
  out.write_bytes(kMagic, 4);
  out.write<std::uint32_t>(kVersion);
  out.write<std::uint32_t>(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    if (e.name.size() > 0xFFFF || e.dims.size() > 0xFF) {
      throw FormatError("VGGW: entry '" + e.name + "' cannot be encoded");
    }
    if (e.values.size() != e.numel()) {
      throw FormatError("VGGW: entry '" + e.name + "' payload does not match dims");
    }
    out.write<std::uint16_t>(static_cast<std::uint16_t>(e.name.size()));
    out.write_bytes(e.name.data(), e.name.size());
    out.write<std::uint8_t>(kDtypeF32);
    out.write<std::uint8_t>(static_cast<std::uint8_t>(e.dims.size()));
    for (auto d : e.dims) out.write<std::uint32_t>(d);
    if constexpr (std::endian::native == std::endian::little) {
      out.write_bytes(e.values.data(), e.values.size() * sizeof(float));
    } else {
      for (float v : e.values) out.write<float>(v);
    }
  }
  return out.take();
}

void write_file(const std::filesystem::path& path,
                const std::vector<Entry>& entries) {
  const auto bytes = serialize(entries);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

}  // namespace styleforge::vggw
