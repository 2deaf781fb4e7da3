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

#ifndef STYLEFORGE_PARALLEL_H_
#define STYLEFORGE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace styleforge {

// Worker cap for kernel parallelism. Read once from STYLEFORGE_THREADS;
// defaults to std::thread::hardware_concurrency().
int max_threads();

// Overrides the cap for the rest of the process (tests use this).
void set_max_threads(int threads);

// Splits [0, count) into contiguous chunks of at least `grain` items and runs
// fn(begin, end) on each, possibly concurrently. Each index is visited by
// exactly one call, so results are independent of the thread count as long
// as fn writes disjoint outputs.
void parallel_for(std::size_t count, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace styleforge

#endif  // STYLEFORGE_PARALLEL_H_
