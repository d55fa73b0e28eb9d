/* Copyright 2026 The potts-sl Authors. All Rights Reserved.

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

#ifndef POTTS_SL_PARALLEL_HPP_
#define POTTS_SL_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace potts_sl {

// Worker count: POTTS_SL_THREADS when set to a positive integer, otherwise
// the hardware concurrency (0 or unset means auto).
int worker_count();

// Runs body(begin, end) over contiguous chunks of [0, n). Chunks never
// overlap, so bodies writing to disjoint per-index slots stay deterministic.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace potts_sl

#endif  // POTTS_SL_PARALLEL_HPP_
