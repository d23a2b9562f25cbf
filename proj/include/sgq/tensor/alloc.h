// Copyright 2026 The SGQ Map Authors
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

#ifndef SGQ_TENSOR_ALLOC_H_
#define SGQ_TENSOR_ALLOC_H_

#include <cstddef>
#include <cstdint>
#include <new>
#include <vector>

namespace sgq {

// Per-thread counters over every tensor buffer allocation. The benchmark
// resets the peak before a forward pass and reads it afterwards.
struct AllocationStats {
  std::int64_t live_bytes = 0;
  std::int64_t peak_bytes = 0;
  std::int64_t total_bytes = 0;
  // Largest attention score matrix seen, in elements, split by kind.
  std::int64_t self_attention_scores = 0;
  std::int64_t cross_attention_scores = 0;
};

AllocationStats& allocation_stats();

// Sets peak to the current live size and zeroes the score counters.
void reset_allocation_peaks();

enum class AttentionKind { kSelf, kCross, kOther };

void record_score_matrix(AttentionKind kind, std::int64_t elements);

namespace internal {
void note_allocate(std::size_t bytes);
void note_deallocate(std::size_t bytes);
}  // namespace internal

template <typename T>
struct TrackingAllocator {
  using value_type = T;

  TrackingAllocator() noexcept = default;
  template <typename U>
  TrackingAllocator(const TrackingAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    internal::note_allocate(n * sizeof(T));
    return static_cast<T*>(::operator new(n * sizeof(T)));
  }
  void deallocate(T* p, std::size_t n) noexcept {
    internal::note_deallocate(n * sizeof(T));
    ::operator delete(p);
  }

  template <typename U>
  bool operator==(const TrackingAllocator<U>&) const noexcept {
    return true;
  }
};

template <typename T>
using Buffer = std::vector<T, TrackingAllocator<T>>;

}  // namespace sgq

#endif  // SGQ_TENSOR_ALLOC_H_
