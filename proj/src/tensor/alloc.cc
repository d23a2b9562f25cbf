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

#include "sgq/tensor/alloc.h"

#include <algorithm>

namespace sgq {

AllocationStats& allocation_stats() {
  thread_local AllocationStats stats;
  return stats;
}

void reset_allocation_peaks() {
  AllocationStats& s = allocation_stats();
  s.peak_bytes = s.live_bytes;
  s.self_attention_scores = 0;
  s.cross_attention_scores = 0;
}

void record_score_matrix(AttentionKind kind, std::int64_t elements) {
  AllocationStats& s = allocation_stats();
  switch (kind) {
    case AttentionKind::kSelf:
      s.self_attention_scores = std::max(s.self_attention_scores, elements);
      break;
    case AttentionKind::kCross:
      s.cross_attention_scores = std::max(s.cross_attention_scores, elements);
      break;
    case AttentionKind::kOther:
      break;
  }
}

namespace internal {

void note_allocate(std::size_t bytes) {
  AllocationStats& s = allocation_stats();
  s.live_bytes += static_cast<std::int64_t>(bytes);
  s.total_bytes += static_cast<std::int64_t>(bytes);
  s.peak_bytes = std::max(s.peak_bytes, s.live_bytes);
}

void note_deallocate(std::size_t bytes) {
  allocation_stats().live_bytes -= static_cast<std::int64_t>(bytes);
}

}  // namespace internal
}  // namespace sgq
