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

#include "sgq/eval/bench.h"

#include <chrono>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "sgq/tensor/parameters.h"

namespace sgq::eval {

BenchRecord bench_one(const BenchConfig& config, decoder::DecoderMode mode, int num_queries) {
  if (config.repeats < 1) throw std::invalid_argument("bench: repeats must be >= 1");
  decoder::DecoderConfig dc;
  dc.mode = mode;
  dc.num_queries = num_queries;
  dc.num_points = config.n;
  dc.dim = config.dim;
  dc.layers = config.layers;
  dc.heads = config.heads;
  dc.ffn_dim = config.ffn_dim;
  dc.cross_window = config.cross_window;
  dc.bev_height = config.bev_height;
  dc.bev_width = config.bev_width;

  ParameterStore<float> store;
  std::mt19937_64 rng(config.seed);
  const auto dec = decoder::make_decoder<float>(dc, store, rng);
  const std::int64_t cells = static_cast<std::int64_t>(config.bev_height) * config.bev_width;
  std::vector<float> feats(static_cast<std::size_t>(cells * config.dim));
  std::normal_distribution<float> normal(0.0f, 1.0f);
  for (float& f : feats) f = normal(rng);
  const Tensor<float> bev = Tensor<float>::constant({cells, config.dim}, feats);

  NoGradGuard<float> guard;
  reset_allocation_peaks();
  BenchRecord r;
  r.mode = mode;
  r.num_queries = num_queries;
  r.n = config.n;
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < config.repeats; ++i) {
    const decoder::DecoderOutput<float> out = dec->decode(bev);
    (void)out;
  }
  const auto stop = std::chrono::steady_clock::now();
  const AllocationStats& s = allocation_stats();
  r.ms_per_forward =
      std::chrono::duration<double, std::milli>(stop - start).count() / config.repeats;
  r.self_scores = s.self_attention_scores;
  r.cross_scores = s.cross_attention_scores;
  r.peak_bytes = s.peak_bytes;
  return r;
}

std::vector<BenchRecord> bench_decoder(const BenchConfig& config) {
  std::vector<BenchRecord> out;
  for (decoder::DecoderMode mode : config.modes) {
    for (int nq : config.queries) out.push_back(bench_one(config, mode, nq));
  }
  return out;
}

std::string format_bench_table(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-12s %5s %4s %12s %14s %14s %12s\n", "mode", "N_q", "n",
                "time_ms", "self_scores", "cross_scores", "peak_MiB");
  os << buf;
  for (const BenchRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%-12s %5d %4d %12.2f %14lld %14lld %12.2f\n",
                  std::string(decoder::mode_name(r.mode)).c_str(), r.num_queries, r.n,
                  r.ms_per_forward, static_cast<long long>(r.self_scores),
                  static_cast<long long>(r.cross_scores),
                  static_cast<double>(r.peak_bytes) / (1024.0 * 1024.0));
    os << buf;
  }
  return os.str();
}

std::string bench_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream os;
  os << "mode,num_queries,n,ms_per_forward,self_scores,cross_scores,peak_bytes\n";
  for (const BenchRecord& r : records) {
    os << decoder::mode_name(r.mode) << ',' << r.num_queries << ',' << r.n << ','
       << r.ms_per_forward << ',' << r.self_scores << ',' << r.cross_scores << ','
       << r.peak_bytes << '\n';
  }
  return os.str();
}

}  // namespace sgq::eval
