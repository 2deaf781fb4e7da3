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

#include "styleforge/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace styleforge {

std::string Shape::str() const {
  std::ostringstream os;
  os << '[' << n << ',' << c << ',' << h << ',' << w << ']';
  return os.str();
}

namespace {

void check_dims(const Shape& s) {
  if (s.n == 0 || s.c == 0 || s.h == 0 || s.w == 0) {
    throw ShapeError("tensor dimensions must be >= 1, got " + s.str());
  }
}

}  // namespace

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape) : BasicTensor(shape, T{0}) {}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, T fill) : shape_(shape) {
  check_dims(shape_);
  data_.assign(shape_.numel(), fill);
}

template <typename T>
BasicTensor<T>::BasicTensor(Shape shape, std::vector<T> data)
    : shape_(shape), data_(std::move(data)) {
  check_dims(shape_);
  if (data_.size() != shape_.numel()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_.str());
  }
}

template <typename T>
void BasicTensor<T>::fill(T value) {
  std::fill(data_.begin(), data_.end(), value);
}

template <typename T>
bool BasicTensor<T>::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](T v) { return std::isfinite(v); });
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b)) {
    throw ShapeError(std::string(what) + ": shape " + a.str() + " vs " +
                     b.str());
  }
}

template class BasicTensor<float>;
template class BasicTensor<double>;

}  // namespace styleforge
