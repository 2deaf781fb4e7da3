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

#ifndef STYLEFORGE_ADAM_H_
#define STYLEFORGE_ADAM_H_

#include <cstdint>

#include "styleforge/tensor.h"

namespace styleforge {

struct AdamOptions {
  double lr = 0.003;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Moment estimates for a single parameter tensor.
template <typename T>
struct AdamState {
  BasicTensor<T> m;  // first moment
  BasicTensor<T> v;  // second moment, >= 0
  std::uint64_t t = 0;  // completed steps
  AdamOptions options;

  AdamState() = default;
  AdamState(const Shape& shape, AdamOptions opts)
      : m(shape), v(shape), options(opts) {}
};

// One Adam update of theta in place:
//   t += 1
//   m = b1 m + (1 - b1) g
//   v = b2 v + (1 - b2) g^2
//   m_hat = m / (1 - b1^t),  v_hat = v / (1 - b2^t)
//   theta -= lr * m_hat / (sqrt(v_hat) + eps)
// Throws ShapeError on mismatched shapes and NumericError (leaving theta and
// state untouched) if grad has a non-finite element.
template <typename T>
void adam_step(BasicTensor<T>& theta, const BasicTensor<T>& grad,
               AdamState<T>& state);

}  // namespace styleforge

#endif  // STYLEFORGE_ADAM_H_
