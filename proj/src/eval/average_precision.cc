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

#include "sgq/eval/average_precision.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "sgq/eval/chamfer.h"

namespace sgq::eval {

void validate_config(const EvalConfig& c) {
  if (c.thresholds.empty()) throw std::invalid_argument("eval: no thresholds");
  for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
    if (!(c.thresholds[i] > 0.0) || (i > 0 && !(c.thresholds[i] > c.thresholds[i - 1]))) {
      throw std::invalid_argument("eval: thresholds must be positive and strictly increasing");
    }
  }
  if (c.interpolation_points < 2) {
    throw std::invalid_argument("eval: need at least 2 interpolation points");
  }
}

std::vector<PrPoint> pr_curve(std::span<const PredictedScene> preds,
                              std::span<const map::Scene> gts, map::ElementClass cls,
                              double tau, double confidence_floor) {
  std::map<std::string, std::size_t> scene_index;
  for (std::size_t s = 0; s < gts.size(); ++s) scene_index.emplace(gts[s].id, s);

  struct Candidate {
    double confidence;
    std::size_t pred_scene, element, gt_scene;
  };
  std::vector<Candidate> order;
  for (std::size_t s = 0; s < preds.size(); ++s) {
    auto it = scene_index.find(preds[s].id);
    if (it == scene_index.end()) {
      throw std::invalid_argument("eval: predictions for unknown scene '" + preds[s].id + "'");
    }
    for (std::size_t e = 0; e < preds[s].elements.size(); ++e) {
      const PredictedElement& p = preds[s].elements[e];
      if (p.cls != cls || p.confidence < confidence_floor) continue;
      order.push_back({p.confidence, s, e, it->second});
    }
  }
  std::stable_sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    return a.confidence > b.confidence;
  });

  std::vector<std::vector<char>> used(gts.size());
  int num_gt = 0;
  for (std::size_t s = 0; s < gts.size(); ++s) {
    used[s].assign(gts[s].elements.size(), 0);
    for (const map::MapElement& e : gts[s].elements) num_gt += e.cls == cls ? 1 : 0;
  }

  std::vector<PrPoint> curve;
  int tp = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Candidate& c = order[k];
    const PredictedElement& p = preds[c.pred_scene].elements[c.element];
    const map::Scene& scene = gts[c.gt_scene];
    int best = -1;
    double best_d = tau;
    for (std::size_t g = 0; g < scene.elements.size(); ++g) {
      if (used[c.gt_scene][g] || scene.elements[g].cls != cls) continue;
      const double d = chamfer_distance(p.points, scene.elements[g].points);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      used[c.gt_scene][static_cast<std::size_t>(best)] = 1;
      ++tp;
    }
    PrPoint pt;
    pt.precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    pt.recall = num_gt > 0 ? static_cast<double>(tp) / num_gt : 0.0;
    curve.push_back(pt);
  }
  return curve;
}

double interpolated_ap(std::span<const PrPoint> curve, int points) {
  if (points < 2) throw std::invalid_argument("interpolated_ap: need >= 2 points");
  // Suffix maximum of precision in consumption order: recall never
  // decreases along the curve.
  std::vector<double> best(curve.size() + 1, 0.0);
  for (std::size_t i = curve.size(); i-- > 0;) {
    best[i] = std::max(best[i + 1], curve[i].precision);
  }
  double total = 0.0;
  std::size_t i = 0;
  for (int k = 0; k < points; ++k) {
    const double level = static_cast<double>(k) / (points - 1);
    while (i < curve.size() && curve[i].recall < level - 1e-12) ++i;
    total += best[i];
  }
  return total / points;
}

ApResult evaluate_ap(std::span<const PredictedScene> preds, std::span<const map::Scene> gts,
                     const EvalConfig& config) {
  validate_config(config);
  ApResult r;
  r.thresholds = config.thresholds;
  for (const map::Scene& s : gts) {
    for (const map::MapElement& e : s.elements) ++r.gt_count[static_cast<std::size_t>(e.cls)];
  }
  double total = 0.0;
  for (int c = 0; c < map::kNumClasses; ++c) {
    const auto ci = static_cast<std::size_t>(c);
    double sum = 0.0;
    for (double tau : config.thresholds) {
      double ap = 0.0;
      if (r.gt_count[ci] > 0) {
        ap = interpolated_ap(pr_curve(preds, gts, static_cast<map::ElementClass>(c), tau,
                                      config.confidence_floor),
                             config.interpolation_points);
      }
      r.ap[ci].push_back(ap);
      sum += ap;
    }
    r.class_ap[ci] = sum / static_cast<double>(config.thresholds.size());
    total += r.class_ap[ci];
  }
  r.map = total / map::kNumClasses;
  return r;
}

std::string format_ap_table(const ApResult& map1, const ApResult& map2) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-13s %8s %8s %8s %8s\n", "", "AP_div", "AP_ped", "AP_bou", "mAP");
  os << buf;
  auto row = [&](const char* name, const ApResult& r) {
    std::snprintf(buf, sizeof buf, "%-13s %8.3f %8.3f %8.3f %8.3f\n", name, r.class_ap[0],
                  r.class_ap[1], r.class_ap[2], r.map);
    os << buf;
  };
  row("mAP1", map1);
  row("mAP2", map2);
  os << '\n';
  const std::pair<const char*, const ApResult*> sets[] = {{"mAP1", &map1}, {"mAP2", &map2}};
  for (const auto& [set, r] : sets) {
    for (std::size_t t = 0; t < r->thresholds.size(); ++t) {
      std::snprintf(buf, sizeof buf, "%s AP@%-4.1f %8.3f %8.3f %8.3f\n", set, r->thresholds[t],
                    r->ap[0][t], r->ap[1][t], r->ap[2][t]);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace sgq::eval
