/*
 * Copyright 2026 The mrsquant Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MRSQUANT_PARALLEL_HPP_
#define MRSQUANT_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace mrsquant {

// 0 means: MRSQUANT_THREADS if set, else the hardware concurrency.
unsigned resolve_threads(unsigned requested = 0);

// Calls fn(i) for every i in [0, n) on up to `threads` workers. The first
// exception thrown by any call is rethrown after all workers stop.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace mrsquant

#endif  // MRSQUANT_PARALLEL_HPP_
