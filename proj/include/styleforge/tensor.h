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

#ifndef STYLEFORGE_TENSOR_H_
#define STYLEFORGE_TENSOR_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "styleforge/errors.h"

namespace styleforge {

// NCHW extents. Every dimension is at least 1.
struct Shape {
  std::size_t n = 1;
  std::size_t c = 1;
  std::size_t h = 1;
  std::size_t w = 1;

  std::size_t numel() const { return n * c * h * w; }
  std::size_t plane() const { return h * w; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

// Dense row-major NCHW tensor with value semantics. T is float in production
// and double for finite-difference checking.
template <typename T>
class BasicTensor {
 public:
  using value_type = T;

  BasicTensor() = default;
  // Zero-filled tensor. Throws ShapeError if any dimension is 0.
  explicit BasicTensor(Shape shape);
  BasicTensor(Shape shape, T fill);
  BasicTensor(Shape shape, std::vector<T> data);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  T* raw() { return data_.data(); }
  const T* raw() const { return data_.data(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) {
    return data_[index(n, c, y, x)];
  }
  const T& at(std::size_t n, std::size_t c, std::size_t y, std::size_t x) const {
    return data_[index(n, c, y, x)];
  }

  // Contiguous view of one channel plane of batch item n.
  std::span<T> channel(std::size_t n, std::size_t c) {
    return std::span<T>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }
  std::span<const T> channel(std::size_t n, std::size_t c) const {
    return std::span<const T>(data_).subspan(index(n, c, 0, 0), shape_.plane());
  }

  void fill(T value);

  // True when every element is finite.
  bool all_finite() const;

  template <typename U>
  BasicTensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return BasicTensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  std::size_t index(std::size_t n, std::size_t c, std::size_t y,
                    std::size_t x) const {
    return ((n * shape_.c + c) * shape_.h + y) * shape_.w + x;
  }

  Shape shape_{0, 0, 0, 0};
  std::vector<T> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

// Throws ShapeError("<what>: <a> vs <b>") unless a == b.
void require_same_shape(const Shape& a, const Shape& b, const char* what);

extern template class BasicTensor<float>;
extern template class BasicTensor<double>;

}  // namespace styleforge

#endif  // STYLEFORGE_TENSOR_H_
