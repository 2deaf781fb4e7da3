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

#include "styleforge/adam.h"

#include <cmath>

namespace styleforge {

template <typename T>
void adam_step(BasicTensor<T>& theta, const BasicTensor<T>& grad,
               AdamState<T>& state) {
  require_same_shape(theta.shape(), grad.shape(), "adam_step (theta vs grad)");
  require_same_shape(theta.shape(), state.m.shape(), "adam_step (theta vs m)");
  require_same_shape(theta.shape(), state.v.shape(), "adam_step (theta vs v)");
  if (!grad.all_finite()) {
    throw NumericError("adam_step: gradient contains NaN or Inf at step " +
                       std::to_string(state.t + 1));
  }

  const AdamOptions& o = state.options;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const T b1 = static_cast<T>(o.beta1);
  const T b2 = static_cast<T>(o.beta2);
  const T one_minus_b1 = static_cast<T>(1.0 - o.beta1);
  const T one_minus_b2 = static_cast<T>(1.0 - o.beta2);
  const T corr1 = static_cast<T>(1.0 - std::pow(o.beta1, t));
  const T corr2 = static_cast<T>(1.0 - std::pow(o.beta2, t));
  const T lr = static_cast<T>(o.lr);
  const T eps = static_cast<T>(o.epsilon);

  T* p = theta.raw();
  T* m = state.m.raw();
  T* v = state.v.raw();
  const T* g = grad.raw();
  for (std::size_t i = 0; i < theta.size(); ++i) {
    m[i] = b1 * m[i] + one_minus_b1 * g[i];
    v[i] = b2 * v[i] + one_minus_b2 * g[i] * g[i];
    const T m_hat = m[i] / corr1;
    const T v_hat = v[i] / corr2;
    p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

template void adam_step<float>(BasicTensor<float>&, const BasicTensor<float>&,
                               AdamState<float>&);
template void adam_step<double>(BasicTensor<double>&,
                                const BasicTensor<double>&, AdamState<double>&);

}  // namespace styleforge
