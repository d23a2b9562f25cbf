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

#include "sgq/eval/prediction_io.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sgq::eval {

using nlohmann::json;
using nlohmann::ordered_json;

std::string serialize_prediction(const PredictedScene& scene, const map::BevRange& range) {
  ordered_json j;
  j["id"] = scene.id;
  j["bev_range"] = {{"x_min", range.x_min},
                    {"x_max", range.x_max},
                    {"y_min", range.y_min},
                    {"y_max", range.y_max}};
  ordered_json elements = ordered_json::array();
  for (const PredictedElement& e : scene.elements) {
    ordered_json pts = ordered_json::array();
    for (const map::Point2& p : e.points) pts.push_back({p.x, p.y});
    ordered_json je;
    je["class"] = std::string(map::class_name(e.cls));
    je["closed"] = e.closed;
    je["points"] = std::move(pts);
    je["confidence"] = e.confidence;
    je["class_scores"] = e.class_scores;
    elements.push_back(std::move(je));
  }
  j["elements"] = std::move(elements);
  return j.dump();
}

PredictedScene parse_prediction(const std::string& line) {
  const json j = json::parse(line);
  PredictedScene s;
  s.id = j.at("id").get<std::string>();
  for (const json& je : j.at("elements")) {
    PredictedElement e;
    e.cls = map::parse_class(je.at("class").get<std::string>());
    e.closed = je.value("closed", false);
    for (const json& p : je.at("points")) {
      if (!p.is_array() || p.size() != 2) throw std::invalid_argument("point must be [x, y]");
      e.points.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (e.points.empty()) throw std::invalid_argument("element has no points");
    e.confidence = je.value("confidence", 1.0);
    if (!(e.confidence >= 0.0 && e.confidence <= 1.0)) {
      throw std::invalid_argument("confidence must be in [0, 1]");
    }
    if (je.contains("class_scores")) {
      const json& cs = je.at("class_scores");
      if (!cs.is_array() || cs.size() != map::kNumClasses) {
        throw std::invalid_argument("class_scores must hold 3 numbers");
      }
      for (int c = 0; c < map::kNumClasses; ++c) {
        e.class_scores[static_cast<std::size_t>(c)] = cs[static_cast<std::size_t>(c)].get<double>();
      }
    } else {
      e.class_scores[static_cast<std::size_t>(e.cls)] = 1.0;
    }
    s.elements.push_back(std::move(e));
  }
  return s;
}

std::vector<PredictedScene> read_prediction_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prediction file " + path);
  std::vector<PredictedScene> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_prediction(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_prediction_file(const std::string& path, const std::vector<PredictedScene>& scenes,
                           const map::BevRange& range) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write prediction file " + path);
  for (const PredictedScene& s : scenes) out << serialize_prediction(s, range) << '\n';
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace sgq::eval
