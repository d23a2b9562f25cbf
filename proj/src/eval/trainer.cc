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

#include "sgq/eval/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

#include "sgq/tensor/checkpoint.h"
#include "sgq/tensor/optimizer.h"

namespace sgq::eval {

std::string format_log_entry(const TrainLogEntry& e) {
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "iter %d scene %s total %.6f cls %.6f p2p %.6f dir %.6f one2many %.6f "
                "bev %.6f pv %.6f grad_norm %.6f lr %.6g",
                e.iteration, e.scene.c_str(), e.loss.total, e.loss.cls, e.loss.p2p, e.loss.dir,
                e.loss.one2many, e.loss.bev, e.loss.pv, e.grad_norm, e.lr);
  return buf;
}

double scheduled_lr(const TrainConfig& c, int iteration) {
  if (c.schedule == LrSchedule::kConstant || c.iterations <= 1) return c.lr;
  const double t = static_cast<double>(iteration) / (c.iterations - 1);
  return c.lr * (0.05 + 0.95 * 0.5 * (1.0 + std::cos(std::numbers::pi * t)));
}

TrainResult train(MapModel<float>& model, const std::vector<Sample<float>>& samples,
                  std::ostream* log, const std::string& checkpoint_path) {
  const RunConfig& cfg = model.config();
  const TrainConfig& tc = cfg.train;
  if (samples.empty() && tc.iterations > 0) {
    throw std::invalid_argument("train: no training samples");
  }
  ParameterStore<float>& params = model.parameters();
  AdamState<float> adam;
  AdamConfig ac;
  ac.weight_decay = tc.weight_decay;

  auto save = [&]() {
    if (!checkpoint_path.empty()) write_checkpoint(checkpoint_path, checkpoint_entries(params));
  };

  std::mt19937_64 rng(tc.seed);
  std::vector<std::size_t> order;
  TrainResult result;
  for (int it = 0; it < tc.iterations; ++it) {
    const std::size_t pos = static_cast<std::size_t>(it) % std::max<std::size_t>(1, samples.size());
    if (pos == 0) {
      order.resize(samples.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
    }
    const Sample<float>& sample = samples[order[pos]];
    TrainLogEntry entry;
    entry.iteration = it;
    entry.scene = sample.id;
    entry.lr = scheduled_lr(tc, it);
    try {
      Tape<float> tape;
      const ModelOutput<float> out = model.forward(sample);
      loss::LossResult<float> lr = loss::compute_loss(out.decoder, sample.targets, out.seg_logits,
                                                      sample.bev_targets, cfg.loss);
      entry.loss = lr.breakdown;
      NamedGradients<float> grads = params.collect(tape.backward(lr.total));
      entry.grad_norm = tc.clip > 0.0 ? clip_gradient_norm(grads, tc.clip)
                                      : clip_gradient_norm(grads, INFINITY);
      ac.learning_rate = entry.lr;
      adam_step(params, grads, adam, ac);
    } catch (const std::domain_error& e) {
      result.aborted = true;
      result.error = "iteration " + std::to_string(it) + ": " + e.what();
      if (log != nullptr) *log << "abort: " << result.error << '\n';
      save();
      return result;
    }
    result.log.push_back(entry);
    result.iterations_done = it + 1;
    if (log != nullptr && (it % tc.log_every == 0 || it + 1 == tc.iterations)) {
      *log << format_log_entry(entry) << '\n';
    }
    if (tc.checkpoint_every > 0 && (it + 1) % tc.checkpoint_every == 0) save();
  }
  save();
  return result;
}

template <typename T>
Evaluation evaluate_model(const MapModel<T>& model, const std::vector<Sample<T>>& samples,
                          const std::vector<map::Scene>& scenes) {
  Evaluation ev;
  for (const Sample<T>& s : samples) ev.predictions.push_back(predict(model, s));
  EvalConfig m1 = EvalConfig::map1(), m2 = EvalConfig::map2();
  m1.confidence_floor = m2.confidence_floor = model.config().confidence_floor;
  ev.map1 = evaluate_ap(ev.predictions, scenes, m1);
  ev.map2 = evaluate_ap(ev.predictions, scenes, m2);
  return ev;
}

template Evaluation evaluate_model(const MapModel<float>&, const std::vector<Sample<float>>&,
                                   const std::vector<map::Scene>&);
template Evaluation evaluate_model(const MapModel<double>&, const std::vector<Sample<double>>&,
                                   const std::vector<map::Scene>&);

}  // namespace sgq::eval
