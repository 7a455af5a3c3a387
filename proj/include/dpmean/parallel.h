// Copyright 2026 The dpmean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPMEAN_PARALLEL_H_
#define DPMEAN_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace dpmean {

// Worker count: the last SetThreadCount value if positive, else
// DPMEAN_THREADS if set, else hardware concurrency.
int ThreadCount();
void SetThreadCount(int threads);

// Calls fn(i) for i in [0, count) on up to ThreadCount() threads. Indices are
// handed out dynamically; fn must only write to index-owned state. The first
// exception thrown by fn is rethrown after all workers stop.
void ParallelFor(std::size_t count, const std::function<void(std::size_t)>& fn);

// Monte Carlo loops split `trials` into a fixed number of chunks, each with
// its own derived stream, so results do not depend on the thread count.
inline constexpr std::size_t kMonteCarloChunks = 64;

struct ChunkBounds {
  std::size_t begin;
  std::size_t end;
};

inline ChunkBounds Chunk(std::size_t total, std::size_t chunks,
                         std::size_t c) {
  return {total * c / chunks, total * (c + 1) / chunks};
}

}  // namespace dpmean

#endif  // DPMEAN_PARALLEL_H_
