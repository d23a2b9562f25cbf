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

#include "sgq/map/scene_io.h"

#include <fstream>
#include <stdexcept>

namespace sgq::map {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json scene_to_json(const Scene& scene) {
  ordered_json j;
  j["id"] = scene.id;
  j["bev_range"] = {{"x_min", scene.range.x_min},
                    {"x_max", scene.range.x_max},
                    {"y_min", scene.range.y_min},
                    {"y_max", scene.range.y_max}};
  ordered_json elements = ordered_json::array();
  for (const MapElement& e : scene.elements) {
    ordered_json pts = ordered_json::array();
    for (const Point2& p : e.points) pts.push_back({p.x, p.y});
    ordered_json je;
    je["class"] = std::string(class_name(e.cls));
    je["closed"] = e.closed;
    je["points"] = std::move(pts);
    elements.push_back(std::move(je));
  }
  j["elements"] = std::move(elements);
  if (scene.rig) {
    ordered_json cams = ordered_json::array();
    for (const Camera& c : scene.rig->cameras) {
      ordered_json jc;
      jc["fx"] = c.fx;
      jc["fy"] = c.fy;
      jc["cx"] = c.cx;
      jc["cy"] = c.cy;
      jc["R"] = c.rotation;
      jc["t"] = c.translation;
      jc["width"] = c.width;
      jc["height"] = c.height;
      cams.push_back(std::move(jc));
    }
    j["cameras"] = std::move(cams);
  }
  return j;
}

Scene scene_from_json(const json& j) {
  Scene s;
  s.id = j.at("id").get<std::string>();
  const json& r = j.at("bev_range");
  s.range = {r.at("x_min").get<double>(), r.at("x_max").get<double>(),
             r.at("y_min").get<double>(), r.at("y_max").get<double>()};
  if (!(s.range.x_max > s.range.x_min) || !(s.range.y_max > s.range.y_min)) {
    throw std::invalid_argument("bev_range must have positive extent");
  }
  for (const json& je : j.at("elements")) {
    MapElement e;
    e.cls = parse_class(je.at("class").get<std::string>());
    e.closed = je.at("closed").get<bool>();
    for (const json& p : je.at("points")) {
      if (!p.is_array() || p.size() != 2) {
        throw std::invalid_argument("point must be [x, y]");
      }
      e.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    s.elements.push_back(std::move(e));
  }
  if (j.contains("cameras")) {
    CameraRig rig;
    for (const json& jc : j.at("cameras")) {
      Camera c;
      c.fx = jc.at("fx").get<double>();
      c.fy = jc.at("fy").get<double>();
      c.cx = jc.at("cx").get<double>();
      c.cy = jc.at("cy").get<double>();
      c.rotation = jc.at("R").get<std::array<double, 9>>();
      c.translation = jc.at("t").get<std::array<double, 3>>();
      c.width = jc.at("width").get<int>();
      c.height = jc.at("height").get<int>();
      rig.cameras.push_back(c);
    }
    s.rig = std::move(rig);
  }
  return s;
}

std::string serialize_scene(const Scene& scene) {
  return scene_to_json(scene).dump();
}

Scene parse_scene(const std::string& line) {
  return scene_from_json(json::parse(line));
}

std::vector<Scene> read_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scene file " + path);
  std::vector<Scene> scenes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      scenes.push_back(parse_scene(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               e.what());
    }
  }
  return scenes;
}

void write_scene_file(const std::string& path,
                      const std::vector<Scene>& scenes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write scene file " + path);
  for (const Scene& s : scenes) out << serialize_scene(s) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace sgq::map
