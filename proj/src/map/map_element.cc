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

#include "sgq/map/map_element.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgq::map {

std::string_view class_name(ElementClass c) {
  switch (c) {
    case ElementClass::kDivider:
      return "divider";
    case ElementClass::kPedCrossing:
      return "ped_crossing";
    case ElementClass::kBoundary:
      return "boundary";
  }
  return "unknown";
}

ElementClass parse_class(std::string_view name) {
  if (name == "divider") return ElementClass::kDivider;
  if (name == "ped_crossing") return ElementClass::kPedCrossing;
  if (name == "boundary") return ElementClass::kBoundary;
  throw std::invalid_argument("unknown element class '" + std::string(name) +
                              "'");
}

void validate_camera(const Camera& camera) {
  if (!(camera.fx > 0.0) || !(camera.fy > 0.0)) {
    throw std::invalid_argument("camera: focal lengths must be positive");
  }
  if (camera.width < 1 || camera.height < 1) {
    throw std::invalid_argument("camera: image size must be positive");
  }
  const auto& r = camera.rotation;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double d = 0.0;
      for (int k = 0; k < 3; ++k) d += r[i * 3 + k] * r[j * 3 + k];
      if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-6) {
        throw std::invalid_argument("camera: rotation is not orthonormal");
      }
    }
  }
}

void validate_element(const MapElement& element, const BevRange& range,
                      int point_count) {
  if (static_cast<int>(element.points.size()) != point_count) {
    throw std::invalid_argument("element: expected " +
                                std::to_string(point_count) + " points, got " +
                                std::to_string(element.points.size()));
  }
  for (const Point2& p : element.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !range.contains(p)) {
      throw std::invalid_argument("element: point outside the BEV range");
    }
  }
  if (element.closed && element.points.size() > 1 &&
      element.points.front() == element.points.back()) {
    throw std::invalid_argument(
        "element: closed element repeats its first point");
  }
}

void validate_scene(const Scene& scene, int point_count, int max_elements) {
  if (static_cast<int>(scene.elements.size()) > max_elements) {
    throw std::invalid_argument("scene '" + scene.id + "': " +
                                std::to_string(scene.elements.size()) +
                                " elements exceed the query budget " +
                                std::to_string(max_elements));
  }
  for (const MapElement& e : scene.elements) {
    validate_element(e, scene.range, point_count);
  }
  if (scene.rig) {
    for (const Camera& c : scene.rig->cameras) validate_camera(c);
  }
}

}  // namespace sgq::map
