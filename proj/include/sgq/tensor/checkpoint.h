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

#ifndef SGQ_TENSOR_CHECKPOINT_H_
#define SGQ_TENSOR_CHECKPOINT_H_

// Binary checkpoint layout (all integers little-endian):
//
//   "SGQCKPT1"                      8 bytes magic
//   version                         u8 (= 1)
//   entry count                     u32
//   per entry:  name length u32, name bytes, dtype u8 (0 = f32, 1 = f64),
//               rank u32, extents u64 x rank
//   payloads                        raw little-endian values, index order

#include <cstdint>
#include <string>
#include <vector>

#include "sgq/tensor/parameters.h"

namespace sgq {

enum class DType : std::uint8_t { kFloat32 = 0, kFloat64 = 1 };

inline constexpr char kCheckpointMagic[8] = {'S', 'G', 'Q', 'C',
                                             'K', 'P', 'T', '1'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  DType dtype = DType::kFloat32;
  Shape shape;
  std::vector<std::uint8_t> payload;  // little-endian element bytes

  bool operator==(const CheckpointEntry&) const = default;
};

std::vector<std::uint8_t> encode_checkpoint(
    const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> decode_checkpoint(
    const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const std::string& path,
                      const std::vector<CheckpointEntry>& entries);
std::vector<CheckpointEntry> read_checkpoint(const std::string& path);

template <typename T>
std::vector<CheckpointEntry> checkpoint_entries(const ParameterStore<T>& store);

// Copies values into an existing store. Names and shapes must match; f32/f64
// payloads are converted to T.
template <typename T>
void load_checkpoint(ParameterStore<T>& store,
                     const std::vector<CheckpointEntry>& entries);

}  // namespace sgq

#endif  // SGQ_TENSOR_CHECKPOINT_H_
