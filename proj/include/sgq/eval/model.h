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

#ifndef SGQ_EVAL_MODEL_H_
#define SGQ_EVAL_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "sgq/bev/bev_encoder.h"
#include "sgq/decoder/sgq_decoder.h"
#include "sgq/eval/average_precision.h"
#include "sgq/eval/config.h"
#include "sgq/synth/scene_synth.h"

namespace sgq::eval {

// One scene prepared for the network.
template <typename T>
struct Sample {
  std::string id;
  map::BevRange range;
  map::CameraRig rig;
  std::vector<Tensor<T>> views;                // [C, h, w] per camera
  std::vector<synth::ElementTarget> targets;   // normalized points
  Tensor<T> bev_targets;                       // [H * W, 3]
};

// Renders the scene's views (the rig from params when the scene has none)
// and its targets on an H x W grid.
template <typename T>
Sample<T> make_sample(const map::Scene& scene, const synth::SynthParams& params,
                      std::uint64_t index, int grid_height, int grid_width);

template <typename T>
struct ModelOutput {
  Tensor<T> bev;         // [H * W, D]
  Tensor<T> seg_logits;  // [H * W, 3]
  decoder::DecoderOutput<T> decoder;
};

// Encoder, decoder and a linear BEV segmentation head sharing one store.
// Parameters are registered in that order.
template <typename T>
class MapModel {
 public:
  MapModel(const RunConfig& config, std::uint64_t seed);
  MapModel(const MapModel&) = delete;
  MapModel& operator=(const MapModel&) = delete;

  const RunConfig& config() const { return config_; }
  ParameterStore<T>& parameters() { return store_; }
  const ParameterStore<T>& parameters() const { return store_; }
  const bev::BevEncoder<T>& encoder() const { return *encoder_; }
  const decoder::Decoder<T>& decoder() const { return *decoder_; }

  ModelOutput<T> forward(const Sample<T>& sample,
                         decoder::DecodeProbe<T>* probe = nullptr) const;

 private:
  RunConfig config_;
  ParameterStore<T> store_;
  std::unique_ptr<bev::BevEncoder<T>> encoder_;
  std::unique_ptr<decoder::Decoder<T>> decoder_;
  nn::Linear<T> seg_head_;
};

// Final-layer predictions in meters, every query kept.
template <typename T>
PredictedScene predict(const MapModel<T>& model, const Sample<T>& sample);

}  // namespace sgq::eval

#endif  // SGQ_EVAL_MODEL_H_
