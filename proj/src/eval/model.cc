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

#include "sgq/eval/model.h"

#include <random>

#include "sgq/loss/losses.h"

namespace sgq::eval {

template <typename T>
Sample<T> make_sample(const map::Scene& scene, const synth::SynthParams& params,
                      std::uint64_t index, int grid_height, int grid_width) {
  Sample<T> s;
  s.id = scene.id;
  s.range = scene.range;
  s.rig = scene.rig ? *scene.rig : synth::make_rig(params);
  for (const synth::PvImage& img : synth::render_views(scene, s.rig, params, index)) {
    s.views.push_back(bev::pv_tensor<T>(img));
  }
  const synth::BevTargets gt = synth::scene_to_bev_gt(scene, grid_height, grid_width);
  s.targets = gt.elements;
  s.bev_targets = loss::mask_targets<T>(gt.masks);
  return s;
}

template <typename T>
MapModel<T>::MapModel(const RunConfig& config, std::uint64_t seed) : config_(config) {
  finalize(config_);
  std::mt19937_64 rng(seed);
  encoder_ = std::make_unique<bev::BevEncoder<T>>(config_.encoder, store_, rng);
  decoder_ = decoder::make_decoder<T>(config_.decoder, store_, rng);
  seg_head_ = nn::make_linear(store_, "seg", config_.decoder.dim, map::kNumClasses, rng);
}

template <typename T>
ModelOutput<T> MapModel<T>::forward(const Sample<T>& sample,
                                    decoder::DecodeProbe<T>* probe) const {
  ModelOutput<T> out;
  out.bev = encoder_->forward(sample.views, sample.rig);
  out.seg_logits = seg_head_(out.bev);
  out.decoder = decoder_->decode(out.bev, probe);
  return out;
}

template <typename T>
PredictedScene predict(const MapModel<T>& model, const Sample<T>& sample) {
  NoGradGuard<T> guard;
  const ModelOutput<T> out = model.forward(sample);
  PredictedScene scene;
  scene.id = sample.id;
  for (decoder::InstancePrediction& inst : decoder::to_instances(out.decoder.layers.back())) {
    PredictedElement e;
    e.cls = inst.cls;
    e.confidence = inst.confidence;
    e.class_scores = inst.class_scores;
    e.closed = inst.cls != map::ElementClass::kDivider;
    e.points = map::denormalize_points(inst.points, sample.range);
    scene.elements.push_back(std::move(e));
  }
  return scene;
}

template Sample<float> make_sample(const map::Scene&, const synth::SynthParams&, std::uint64_t, int, int);
template Sample<double> make_sample(const map::Scene&, const synth::SynthParams&, std::uint64_t, int, int);
template class MapModel<float>;
template class MapModel<double>;
template PredictedScene predict(const MapModel<float>&, const Sample<float>&);
template PredictedScene predict(const MapModel<double>&, const Sample<double>&);

}  // namespace sgq::eval
