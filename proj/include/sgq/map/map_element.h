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

#ifndef SGQ_MAP_MAP_ELEMENT_H_
#define SGQ_MAP_MAP_ELEMENT_H_

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sgq::map {

enum class ElementClass : int { kDivider = 0, kPedCrossing = 1, kBoundary = 2 };

inline constexpr int kNumClasses = 3;
inline constexpr int kDefaultPointCount = 20;
inline constexpr int kDefaultMaxElements = 100;

std::string_view class_name(ElementClass c);
// Accepts "divider", "ped_crossing", "boundary".
ElementClass parse_class(std::string_view name);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

// BEV frame in meters: x left/right, y rear/front.
struct BevRange {
  double x_min = -15.0;
  double x_max = 15.0;
  double y_min = -30.0;
  double y_max = 30.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  bool contains(const Point2& p, double tol = 0.0) const {
    return p.x >= x_min - tol && p.x <= x_max + tol && p.y >= y_min - tol &&
           p.y <= y_max + tol;
  }
  bool operator==(const BevRange&) const = default;
};

// Closed elements never repeat the first point at the end.
struct MapElement {
  ElementClass cls = ElementClass::kDivider;
  std::vector<Point2> points;
  bool closed = false;
  bool operator==(const MapElement&) const = default;
};

// Pinhole camera, camera-from-world extrinsics: p_cam = R * p_world + t.
// Intrinsics are K = [[fx, 0, cx], [0, fy, cy], [0, 0, 1]].
struct Camera {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 3> translation = {0, 0, 0};
  int width = 1;
  int height = 1;
  bool operator==(const Camera&) const = default;
};

struct CameraRig {
  std::vector<Camera> cameras;
  bool operator==(const CameraRig&) const = default;
};

struct Scene {
  std::string id;
  BevRange range;
  std::vector<MapElement> elements;
  std::optional<CameraRig> rig;
  bool operator==(const Scene&) const = default;
};

// Throws std::invalid_argument describing the first violated invariant.
void validate_camera(const Camera& camera);
void validate_element(const MapElement& element, const BevRange& range,
                      int point_count);
void validate_scene(const Scene& scene, int point_count,
                    int max_elements = kDefaultMaxElements);

}  // namespace sgq::map

#endif  // SGQ_MAP_MAP_ELEMENT_H_
