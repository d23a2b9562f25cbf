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

#ifndef SGQ_SYNTH_SCENE_SYNTH_H_
#define SGQ_SYNTH_SCENE_SYNTH_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sgq/map/camera.h"
#include "sgq/map/geometry.h"
#include "sgq/map/map_element.h"

namespace sgq::synth {

struct CountRange {
  int min = 0;
  int max = 0;
};

struct SynthParams {
  std::uint64_t seed = 0;
  // Indexed by map::ElementClass.
  std::array<CountRange, map::kNumClasses> counts = {
      CountRange{1, 3}, CountRange{0, 2}, CountRange{1, 2}};
  double jitter = 0.5;  // meters
  int point_count = map::kDefaultPointCount;
  map::BevRange range;

  // Rig template: front and rear pinhole cameras (90 deg horizontal FOV)
  // mounted above the ego origin, pitched toward their half of the range.
  int image_width = 128;
  int image_height = 64;
  double camera_height = 25.0;

  int pv_channels = 6;  // first 3 carry class splats
  double noise_sigma = 0.0;
  double splat_sigma_px = 1.0;
};

// Throws std::invalid_argument for negative counts, sigma < 0, fewer than
// 3 PV channels and similar.
void validate_params(const SynthParams& params);

// key=value text, '#' comments; keys mirror the field names (counts as
// "divider_min", "divider_max", ...). Unknown keys throw.
SynthParams parse_params(const std::string& text);
std::string format_params(const SynthParams& params);

map::CameraRig make_rig(const SynthParams& params);

// Deterministic in (params.seed, index).
map::Scene synth_scene(const SynthParams& params, std::uint64_t index);

// C x h x w feature image of one camera.
struct PvImage {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  double at(int c, int row, int col) const {
    return data[(static_cast<std::size_t>(c) * height + row) * width + col];
  }
  double& at(int c, int row, int col) {
    return data[(static_cast<std::size_t>(c) * height + row) * width + col];
  }
};

// Adds a Gaussian blob (peak 1, max-combined) for one world point to
// `channel` when it projects validly into the camera.
void splat_world_point(PvImage& image, const map::Camera& camera,
                       const map::Point3& world, int channel,
                       double sigma_px);

std::vector<PvImage> render_views(const map::Scene& scene,
                                  const map::CameraRig& rig,
                                  const SynthParams& params,
                                  std::uint64_t index = 0);

struct ElementTarget {
  map::ElementClass cls = map::ElementClass::kDivider;
  bool closed = false;
  std::vector<map::Point2> points;  // normalized to [0,1]^2
};

struct BevTargets {
  map::ClassMasks masks;
  std::vector<ElementTarget> elements;
};

BevTargets scene_to_bev_gt(const map::Scene& scene, int height, int width);

}  // namespace sgq::synth

#endif  // SGQ_SYNTH_SCENE_SYNTH_H_
