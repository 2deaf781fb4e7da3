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

#ifndef STYLEFORGE_GRADCHECK_H_
#define STYLEFORGE_GRADCHECK_H_

#include <cstddef>
#include <cstdint>
#include <vector>

namespace styleforge {

struct GradCheckSample {
  std::size_t index = 0;  // flat pixel index into the [1,3,h,w] image
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckSample> samples;
  double max_rel_error = 0.0;
  double tolerance = 1e-3;
  bool passed() const { return max_rel_error < tolerance; }
};

// Self-test of the full objective's image gradient in 64-bit mode: random
// VGG weights, a random 16x16 target and a tiled 8x8 style texture. Compares
// backprop against central differences (step 1e-4) at `coords` random
// pixels.
GradCheckReport run_gradient_check(std::uint64_t seed, std::size_t coords = 20);

// |a - b| / max(|a|, |b|), or 0 when both are exactly 0.
double relative_error(double a, double b);

}  // namespace styleforge

#endif  // STYLEFORGE_GRADCHECK_H_
