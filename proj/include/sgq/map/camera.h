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

#ifndef SGQ_MAP_CAMERA_H_
#define SGQ_MAP_CAMERA_H_

#include <array>

#include "sgq/map/map_element.h"

namespace sgq::map {

inline constexpr double kMinProjectionDepth = 0.1;

struct Point3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

struct Projection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
  bool valid = false;
};

Point3 world_to_camera(const Camera& camera, const Point3& world);

// Pinhole projection of a camera-frame point. Invalid when depth <= 0.1 m
// or the pixel lands outside [0, width) x [0, height). Pixel (row, col)
// covers [col, col + 1) x [row, row + 1).
Projection project_camera_point(const Camera& camera, const Point3& cam);

inline Projection project_world_point(const Camera& camera,
                                      const Point3& world) {
  return project_camera_point(camera, world_to_camera(camera, world));
}

// Camera at `position` looking along `forward` with image rows going
// "down"; used to build synthetic rigs.
Camera look_at_camera(const Point3& position, const Point3& target,
                      double fx, double fy, int width, int height);

}  // namespace sgq::map

#endif  // SGQ_MAP_CAMERA_H_
