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

#ifndef SGQ_EVAL_BENCH_H_
#define SGQ_EVAL_BENCH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "sgq/decoder/sgq_decoder.h"

namespace sgq::eval {

struct BenchConfig {
  std::vector<int> queries = {50, 75, 100, 125};
  int n = 20;
  std::vector<decoder::DecoderMode> modes = {decoder::DecoderMode::kSgq,
                                             decoder::DecoderMode::kPointQuery};
  int dim = 256;
  int layers = 6;
  int heads = 8;
  int ffn_dim = 512;
  int bev_height = 64;
  int bev_width = 32;
  int cross_window = 4;  // negative: dense cross-attention
  int repeats = 1;
  std::uint64_t seed = 0;
};

struct BenchRecord {
  decoder::DecoderMode mode = decoder::DecoderMode::kSgq;
  int num_queries = 0;
  int n = 0;
  double ms_per_forward = 0.0;
  std::int64_t self_scores = 0;   // largest self-attention score matrix, elements
  std::int64_t cross_scores = 0;  // largest cross-attention score matrix, elements
  std::int64_t peak_bytes = 0;    // peak live tensor bytes during the forward
};

// Inference forward of one decoder on random BEV features; the peak
// includes parameters and the BEV features themselves.
BenchRecord bench_one(const BenchConfig& config, decoder::DecoderMode mode,
                      int num_queries);

std::vector<BenchRecord> bench_decoder(const BenchConfig& config);

std::string format_bench_table(const std::vector<BenchRecord>& records);
std::string bench_csv(const std::vector<BenchRecord>& records);

}  // namespace sgq::eval

#endif  // SGQ_EVAL_BENCH_H_
