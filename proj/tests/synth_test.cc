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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>

#include "sgq/map/camera.h"
#include "sgq/map/geometry.h"
#include "sgq/map/map_element.h"
#include "sgq/map/scene_io.h"
#include "sgq/synth/scene_synth.h"

namespace sgq::synth {
namespace {

using map::ElementClass;
using map::MapElement;
using map::Point2;

SynthParams no_elements() {
  SynthParams p;
  for (CountRange& c : p.counts) c = {0, 0};
  return p;
}

TEST(SynthTest, ZeroCountsGiveEmptyScene) {
  const map::Scene s = synth_scene(no_elements(), 7);
  EXPECT_TRUE(s.elements.empty());
}

TEST(SynthTest, SameSeedAndIndexRegenerateBitIdentically) {
  SynthParams p;
  p.seed = 1234;
  for (std::uint64_t i = 0; i < 20; ++i) {
    EXPECT_EQ(synth_scene(p, i), synth_scene(p, i));
  }
  EXPECT_NE(synth_scene(p, 0), synth_scene(p, 1));
}

TEST(SynthTest, CountsStayWithinRanges) {
  SynthParams p;
  p.seed = 5;
  p.counts = {CountRange{2, 4}, CountRange{1, 1}, CountRange{0, 3}};
  for (std::uint64_t i = 0; i < 100; ++i) {
    const map::Scene s = synth_scene(p, i);
    std::array<int, map::kNumClasses> per{};
    for (const MapElement& e : s.elements) ++per[static_cast<int>(e.cls)];
    for (int c = 0; c < map::kNumClasses; ++c) {
      EXPECT_GE(per[c], p.counts[c].min);
      EXPECT_LE(per[c], p.counts[c].max);
    }
  }
}

TEST(SynthTest, ThousandScenesSatisfyElementInvariants) {
  SynthParams p;
  p.seed = 99;
  std::size_t elements = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const map::Scene s = synth_scene(p, i);
    for (const MapElement& e : s.elements) {
      ++elements;
      EXPECT_NO_THROW(map::validate_element(e, s.range, p.point_count)) << "scene " << i;
      EXPECT_EQ(e.closed, e.cls != ElementClass::kDivider);
    }
  }
  EXPECT_GT(elements, 1000u);
}

TEST(SynthTest, GeneratedElementsAreResampleFixedPoints) {
  SynthParams p;
  p.seed = 31;
  int checked = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    for (const MapElement& e : synth_scene(p, i).elements) {
      const auto again = map::resample_polyline(e.points, p.point_count, e.closed);
      ASSERT_EQ(again.size(), e.points.size());
      for (std::size_t k = 0; k < again.size(); ++k) {
        EXPECT_NEAR(again[k].x, e.points[k].x, 1e-9);
        EXPECT_NEAR(again[k].y, e.points[k].y, 1e-9);
      }
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST(SynthTest, ParamsRoundTripAndValidate) {
  SynthParams p;
  p.seed = 77;
  p.counts[1] = {2, 5};
  p.jitter = 0.25;
  p.noise_sigma = 0.05;
  const SynthParams q = parse_params(format_params(p));
  EXPECT_EQ(format_params(q), format_params(p));
  EXPECT_EQ(synth_scene(p, 3), synth_scene(q, 3));

  EXPECT_THROW(parse_params("no_such_key = 1\n"), std::invalid_argument);
  SynthParams bad = p;
  bad.counts[0] = {3, 1};
  EXPECT_THROW(validate_params(bad), std::invalid_argument);
  bad = p;
  bad.counts[2].min = -1;
  EXPECT_THROW(validate_params(bad), std::invalid_argument);
  bad = p;
  bad.noise_sigma = -0.1;
  EXPECT_THROW(validate_params(bad), std::invalid_argument);
  bad = p;
  bad.pv_channels = 2;
  EXPECT_THROW(validate_params(bad), std::invalid_argument);
}

TEST(SynthTest, RigCamerasAreValid) {
  const map::CameraRig rig = make_rig(SynthParams{});
  ASSERT_FALSE(rig.cameras.empty());
  for (const map::Camera& c : rig.cameras) {
    EXPECT_NO_THROW(map::validate_camera(c));
    EXPECT_EQ(c.width, 128);
    EXPECT_EQ(c.height, 64);
  }
}

TEST(SynthTest, EmptySceneHasZeroClassChannels) {
  SynthParams p = no_elements();
  const map::Scene s = synth_scene(p, 0);
  const auto views = render_views(s, make_rig(p), p, 0);
  ASSERT_EQ(views.size(), make_rig(p).cameras.size());
  for (const PvImage& img : views) {
    ASSERT_EQ(img.channels, p.pv_channels);
    for (int c = 0; c < map::kNumClasses; ++c) {
      for (int r = 0; r < img.height; ++r) {
        for (int col = 0; col < img.width; ++col) EXPECT_EQ(img.at(c, r, col), 0.0);
      }
    }
  }
}

TEST(SynthTest, NoiselessRenderingIsBitIdentical) {
  SynthParams p;
  p.seed = 4;
  const map::Scene s = synth_scene(p, 2);
  const map::CameraRig rig = make_rig(p);
  const auto a = render_views(s, rig, p, 2);
  const auto b = render_views(s, rig, p, 2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].data, b[i].data);
}

TEST(SynthTest, SplatPeaksAtProjectedPixel) {
  const map::CameraRig rig = make_rig(SynthParams{});
  const map::Camera& cam = rig.cameras.front();
  // Find a ground point that projects well inside the image.
  const map::Point3 world{3.0, 15.0, 0.0};
  const map::Projection pr = map::project_world_point(cam, world);
  ASSERT_TRUE(pr.valid);
  ASSERT_GT(pr.u, 5.0);
  ASSERT_LT(pr.u, cam.width - 5.0);
  ASSERT_GT(pr.v, 5.0);
  ASSERT_LT(pr.v, cam.height - 5.0);

  PvImage img;
  img.channels = 3;
  img.height = cam.height;
  img.width = cam.width;
  img.data.assign(static_cast<std::size_t>(3) * img.height * img.width, 0.0);
  const double sigma = 1.5;
  splat_world_point(img, cam, world, 1, sigma);

  double wsum = 0.0, usum = 0.0, vsum = 0.0;
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      EXPECT_EQ(img.at(0, r, c), 0.0);
      EXPECT_EQ(img.at(2, r, c), 0.0);
      const double w = img.at(1, r, c);
      const double du = c + 0.5 - pr.u, dv = r + 0.5 - pr.v;
      if (du * du + dv * dv <= 4.0) {
        EXPECT_NEAR(w, std::exp(-(du * du + dv * dv) / (2 * sigma * sigma)), 1e-12);
      }
      wsum += w;
      usum += w * (c + 0.5);
      vsum += w * (r + 0.5);
    }
  }
  EXPECT_NEAR(usum / wsum, pr.u, 0.05);
  EXPECT_NEAR(vsum / wsum, pr.v, 0.05);
}

TEST(SynthTest, SplatOutsideViewLeavesImageUntouched) {
  const map::CameraRig rig = make_rig(SynthParams{});
  const map::Camera& cam = rig.cameras.front();
  PvImage img;
  img.channels = 3;
  img.height = cam.height;
  img.width = cam.width;
  img.data.assign(static_cast<std::size_t>(3) * img.height * img.width, 0.0);
  const map::Point3 behind{0.0, -200.0, 0.0};
  ASSERT_FALSE(map::project_world_point(cam, behind).valid);
  splat_world_point(img, cam, behind, 0, 1.0);
  for (double x : img.data) EXPECT_EQ(x, 0.0);
}

TEST(SynthTest, RenderedDividerLightsOnlyItsChannel) {
  SynthParams p = no_elements();
  map::Scene s = synth_scene(p, 0);
  const Point2 raw[] = {{-3.0, 5.0}, {-3.0, 25.0}};
  s.elements.push_back(map::resample_element(raw, p.point_count, false, ElementClass::kDivider));
  const auto views = render_views(s, make_rig(p), p, 0);
  double divider = 0.0, others = 0.0;
  for (const PvImage& img : views) {
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        divider += img.at(0, r, c);
        others += img.at(1, r, c) + img.at(2, r, c);
      }
    }
  }
  EXPECT_GT(divider, 0.0);
  EXPECT_EQ(others, 0.0);
}

TEST(SynthTest, BevTargetsOfEmptySceneAreEmpty) {
  const BevTargets t = scene_to_bev_gt(synth_scene(no_elements(), 0), 64, 32);
  EXPECT_TRUE(t.elements.empty());
  for (int c = 0; c < map::kNumClasses; ++c) EXPECT_EQ(t.masks.count(c), 0);
  EXPECT_THROW(scene_to_bev_gt(synth_scene(no_elements(), 0), 0, 32), std::invalid_argument);
}

TEST(SynthTest, BevTargetsOfOneDividerMatchDistanceOracle) {
  map::Scene s = synth_scene(no_elements(), 0);
  const Point2 raw[] = {{-7.3, -20.0}, {4.1, 22.5}};
  s.elements.push_back(map::resample_element(raw, 20, false, ElementClass::kDivider));
  const int H = 64, W = 32;
  const BevTargets t = scene_to_bev_gt(s, H, W);
  EXPECT_GT(t.masks.count(0), 0);
  EXPECT_EQ(t.masks.count(1), 0);
  EXPECT_EQ(t.masks.count(2), 0);

  const map::GridSpec grid{H, W, s.range};
  const double half_diag = 0.5 * std::hypot(grid.cell_width(), grid.cell_height());
  std::int64_t expected = 0;
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      const Point2 ctr = grid.cell_center(r, c);
      // Distance to the straight line segment, computed directly.
      const double ax = raw[0].x, ay = raw[0].y;
      const double dx = raw[1].x - ax, dy = raw[1].y - ay;
      const double tt = std::clamp(((ctr.x - ax) * dx + (ctr.y - ay) * dy) / (dx * dx + dy * dy), 0.0, 1.0);
      const double d = std::hypot(ctr.x - (ax + tt * dx), ctr.y - (ay + tt * dy));
      if (d <= half_diag - 1e-9) ++expected;
      if (std::abs(d - half_diag) > 1e-9) EXPECT_EQ(t.masks.at(0, r, c), d <= half_diag ? 1 : 0);
    }
  }
  EXPECT_GE(t.masks.count(0), expected);

  ASSERT_EQ(t.elements.size(), 1u);
  EXPECT_EQ(t.elements[0].cls, ElementClass::kDivider);
  for (const Point2& q : t.elements[0].points) {
    EXPECT_GE(q.x, 0.0);
    EXPECT_LE(q.x, 1.0);
    EXPECT_GE(q.y, 0.0);
    EXPECT_LE(q.y, 1.0);
  }
}

TEST(SynthTest, GeneratedScenesRoundTripThroughFile) {
  SynthParams p;
  p.seed = 11;
  std::vector<map::Scene> scenes;
  for (std::uint64_t i = 0; i < 16; ++i) {
    scenes.push_back(synth_scene(p, i));
    scenes.back().rig = make_rig(p);
  }
  const auto path = std::filesystem::temp_directory_path() / "sgq_synth_roundtrip.jsonl";
  map::write_scene_file(path.string(), scenes);
  const auto back = map::read_scene_file(path.string());
  std::filesystem::remove(path);
  ASSERT_EQ(back.size(), scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    EXPECT_EQ(back[i].id, scenes[i].id);
    ASSERT_EQ(back[i].elements.size(), scenes[i].elements.size());
    for (std::size_t e = 0; e < scenes[i].elements.size(); ++e) {
      const auto& a = scenes[i].elements[e].points;
      const auto& b = back[i].elements[e].points;
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(a[k].x, b[k].x, 1e-9);
        EXPECT_NEAR(a[k].y, b[k].y, 1e-9);
      }
    }
    EXPECT_TRUE(back[i].rig.has_value());
  }
}

}  // namespace
}  // namespace sgq::synth
