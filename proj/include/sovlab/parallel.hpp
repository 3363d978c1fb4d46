// Copyright 2026 The sovlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace sovlab {

// Resolves a worker count: an explicit positive request wins, then the
// SOVLAB_THREADS environment variable, then hardware concurrency.
unsigned resolve_threads(unsigned requested);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is handed out
// in index order; the first exception thrown by any task is rethrown after
// all workers join. Callers that reduce results must do so by index to stay
// independent of the worker count.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);

// SplitMix64 finalizer. Used for every derived seed in the library.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `index` under `base`:
//   splitmix64(base + 0x9E3779B97F4A7C15 * (index + 1)).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace sovlab
