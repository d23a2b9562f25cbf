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

#ifndef SGQ_EVAL_TRAINER_H_
#define SGQ_EVAL_TRAINER_H_

#include <ostream>
#include <string>
#include <vector>

#include "sgq/eval/average_precision.h"
#include "sgq/eval/model.h"
#include "sgq/loss/losses.h"

namespace sgq::eval {

struct TrainLogEntry {
  int iteration = 0;
  std::string scene;
  loss::LossBreakdown loss;
  double grad_norm = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  std::vector<TrainLogEntry> log;  // every iteration
  int iterations_done = 0;
  bool aborted = false;
  std::string error;
};

// "iter 12 scene s-0 total 1.234567 cls ... lr ..." with fixed precision.
std::string format_log_entry(const TrainLogEntry& entry);

double scheduled_lr(const TrainConfig& config, int iteration);

// Adam over the model's parameters, one sample per iteration in a
// seed-determined shuffled order. Every log_every-th entry (and the last)
// goes to `log`. When `checkpoint_path` is set the parameters are written
// there every checkpoint_every iterations and at the end. A non-finite
// loss or gradient stops training before the update and writes the last
// good parameters.
TrainResult train(MapModel<float>& model, const std::vector<Sample<float>>& samples,
                  std::ostream* log = nullptr, const std::string& checkpoint_path = "");

struct Evaluation {
  ApResult map1;
  ApResult map2;
  std::vector<PredictedScene> predictions;
};

template <typename T>
Evaluation evaluate_model(const MapModel<T>& model, const std::vector<Sample<T>>& samples,
                          const std::vector<map::Scene>& scenes);

}  // namespace sgq::eval

#endif  // SGQ_EVAL_TRAINER_H_
