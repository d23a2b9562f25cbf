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

#ifndef SGQ_EVAL_CONFIG_H_
#define SGQ_EVAL_CONFIG_H_

// Flat key=value configuration ('#' starts a comment). Keys:
//   bev.height bev.width
//   encoder.mode encoder.layers encoder.kernel encoder.heights encoder.clamp
//   decoder.mode decoder.N decoder.n decoder.D decoder.layers decoder.heads
//   decoder.ffn decoder.cross_window decoder.instance_pe decoder.aux_queries
//   decoder.temperature
//   loss.beta_o loss.beta_m loss.beta_d loss.alpha_b loss.alpha_p loss.K
//   loss.lambda_cls loss.lambda_pts loss.focal_gamma loss.focal_alpha
//   loss.aux_layers loss.w_cls loss.w_pts loss.w_dir
//   train.iterations train.lr train.weight_decay train.clip train.seed
//   train.log_every train.checkpoint_every train.lr_schedule
//   eval.confidence_floor

#include <cstdint>
#include <map>
#include <string>

#include "sgq/bev/bev_encoder.h"
#include "sgq/decoder/sgq_decoder.h"
#include "sgq/loss/losses.h"

namespace sgq::eval {

enum class LrSchedule { kConstant, kCosine };

struct TrainConfig {
  int iterations = 2000;
  double lr = 6e-4;
  double weight_decay = 0.01;
  double clip = 35.0;  // global gradient norm; <= 0 disables
  std::uint64_t seed = 0;
  int log_every = 50;
  int checkpoint_every = 0;  // 0: only at the end
  LrSchedule schedule = LrSchedule::kConstant;
};

struct RunConfig {
  bev::EncoderConfig encoder;
  decoder::DecoderConfig decoder;
  loss::LossConfig loss;
  TrainConfig train;
  double confidence_floor = 0.0;
};

// Copies the shared extents (grid, D, channel count) from one sub-config
// to the others and validates each.
void finalize(RunConfig& config);

// Parses text into key -> value, rejecting malformed lines with
// "line N: ..." messages.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Applies key/values over `config`; unknown keys and bad values throw
// std::invalid_argument naming the key.
void apply_config(RunConfig& config, const std::map<std::string, std::string>& values);

RunConfig load_config_file(const std::string& path);
std::string format_config(const RunConfig& config);

// Worker cap from SGQ_THREADS (>= 1), default 1.
int thread_count();

}  // namespace sgq::eval

#endif  // SGQ_EVAL_CONFIG_H_
