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

#ifndef SGQ_MAP_SCENE_IO_H_
#define SGQ_MAP_SCENE_IO_H_

// Scene files hold one JSON object per line:
//   {"id": "...", "bev_range": {"x_min":..,"x_max":..,"y_min":..,"y_max":..},
//    "elements": [{"class": "divider", "closed": false,
//                  "points": [[x, y], ...]}, ...],
//    "cameras": [{"fx":..,"fy":..,"cx":..,"cy":..,"R":[9 values],
//                 "t":[3 values],"width":..,"height":..}]}   (optional)

#include <string>
#include <vector>

#include <json.hpp>

#include "sgq/map/map_element.h"

namespace sgq::map {

nlohmann::ordered_json scene_to_json(const Scene& scene);
Scene scene_from_json(const nlohmann::json& j);

std::string serialize_scene(const Scene& scene);
Scene parse_scene(const std::string& line);

// Errors carry the 1-based line number.
std::vector<Scene> read_scene_file(const std::string& path);
void write_scene_file(const std::string& path, const std::vector<Scene>& scenes);

}  // namespace sgq::map

#endif  // SGQ_MAP_SCENE_IO_H_
