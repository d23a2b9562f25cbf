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

#include "sgq/map/camera.h"

#include <cmath>
#include <stdexcept>

namespace sgq::map {

Point3 world_to_camera(const Camera& camera, const Point3& world) {
  const auto& r = camera.rotation;
  const auto& t = camera.translation;
  return {r[0] * world.x + r[1] * world.y + r[2] * world.z + t[0],
          r[3] * world.x + r[4] * world.y + r[5] * world.z + t[1],
          r[6] * world.x + r[7] * world.y + r[8] * world.z + t[2]};
}

Projection project_camera_point(const Camera& camera, const Point3& cam) {
  Projection p;
  p.depth = cam.z;
  if (!(cam.z > kMinProjectionDepth)) return p;
  p.u = camera.fx * cam.x / cam.z + camera.cx;
  p.v = camera.fy * cam.y / cam.z + camera.cy;
  p.valid = p.u >= 0.0 && p.u < camera.width && p.v >= 0.0 &&
            p.v < camera.height;
  return p;
}

Camera look_at_camera(const Point3& position, const Point3& target, double fx,
                      double fy, int width, int height) {
  auto normalize = [](Point3 v) {
    const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
    if (n == 0.0) throw std::invalid_argument("look_at: degenerate direction");
    return Point3{v.x / n, v.y / n, v.z / n};
  };
  auto cross = [](const Point3& a, const Point3& b) {
    return Point3{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
                  a.x * b.y - a.y * b.x};
  };
  const Point3 forward = normalize(
      {target.x - position.x, target.y - position.y, target.z - position.z});
  const Point3 right = normalize(cross(forward, {0.0, 0.0, 1.0}));
  const Point3 down = cross(forward, right);
  Camera c;
  c.fx = fx;
  c.fy = fy;
  c.cx = width / 2.0;
  c.cy = height / 2.0;
  c.width = width;
  c.height = height;
  c.rotation = {right.x,   right.y,   right.z,   down.x,   down.y,
                down.z,    forward.x, forward.y, forward.z};
  for (int i = 0; i < 3; ++i) {
    c.translation[static_cast<std::size_t>(i)] =
        -(c.rotation[static_cast<std::size_t>(i * 3)] * position.x +
          c.rotation[static_cast<std::size_t>(i * 3 + 1)] * position.y +
          c.rotation[static_cast<std::size_t>(i * 3 + 2)] * position.z);
  }
  return c;
}

}  // namespace sgq::map
