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

#include "sgq/synth/scene_synth.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sgq::synth {
namespace {

using map::ElementClass;
using map::Point2;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t index,
                         std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), stream};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

map::MapElement finish(std::vector<Point2> raw, bool closed, ElementClass cls,
                       const SynthParams& p) {
  return map::resample_element(map::clip_to_range(raw, p.range),
                               p.point_count, closed, cls);
}

map::MapElement make_divider(std::mt19937_64& rng, const SynthParams& p) {
  const auto& r = p.range;
  const double x0 = uniform(rng, r.x_min + 0.2 * r.width(), r.x_max - 0.2 * r.width());
  const double y_a = uniform(rng, r.y_min + 0.05 * r.height(), r.y_min + 0.35 * r.height());
  const double y_b = uniform(rng, r.y_max - 0.35 * r.height(), r.y_max - 0.05 * r.height());
  const double amp = uniform(rng, 0.0, 2.0 * p.jitter + 1.0);
  const double omega = uniform(rng, 0.03, 0.12);
  const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double slope = uniform(rng, -0.1, 0.1);
  std::vector<Point2> raw;
  constexpr int kRaw = 40;
  for (int i = 0; i < kRaw; ++i) {
    const double y = y_a + (y_b - y_a) * i / (kRaw - 1);
    raw.push_back({x0 + slope * y + amp * std::sin(omega * y + phase), y});
  }
  return finish(std::move(raw), false, ElementClass::kDivider, p);
}

map::MapElement make_ped_crossing(std::mt19937_64& rng, const SynthParams& p) {
  const auto& r = p.range;
  const double cx = uniform(rng, r.x_min + 0.25 * r.width(), r.x_max - 0.25 * r.width());
  const double cy = uniform(rng, r.y_min + 0.1 * r.height(), r.y_max - 0.1 * r.height());
  const double half_len = uniform(rng, 3.0, 6.0);
  const double half_wid = uniform(rng, 1.5, 2.0);
  const double theta = uniform(rng, -0.3, 0.3);
  const double c = std::cos(theta), s = std::sin(theta);
  std::vector<Point2> raw;
  const double corners[4][2] = {{-half_len, -half_wid},
                                {half_len, -half_wid},
                                {half_len, half_wid},
                                {-half_len, half_wid}};
  for (const auto& k : corners) {
    const double jx = uniform(rng, -0.2, 0.2) * p.jitter;
    const double jy = uniform(rng, -0.2, 0.2) * p.jitter;
    raw.push_back({cx + c * k[0] - s * k[1] + jx, cy + s * k[0] + c * k[1] + jy});
  }
  return finish(std::move(raw), true, ElementClass::kPedCrossing, p);
}

// Rounded-rectangle course.
map::MapElement make_boundary(std::mt19937_64& rng, const SynthParams& p) {
  const auto& r = p.range;
  const double hx = uniform(rng, 0.2 * r.width(), 0.45 * r.width());
  const double hy = uniform(rng, 0.2 * r.height(), 0.45 * r.height());
  const double cx = uniform(rng, -0.04, 0.04) * r.width() + 0.5 * (r.x_min + r.x_max);
  const double cy = uniform(rng, -0.04, 0.04) * r.height() + 0.5 * (r.y_min + r.y_max);
  const double radius = uniform(rng, 0.5, 3.0);
  const double start = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  std::vector<Point2> raw;
  constexpr int kRaw = 64;
  for (int i = 0; i < kRaw; ++i) {
    const double t = start + 2.0 * std::numbers::pi * i / kRaw;
    const double ct = std::cos(t), st = std::sin(t);
    // Superellipse-like rounding: exponent grows as the corner radius falls.
    const double e = 2.0 / (2.0 + 6.0 / radius);
    const double x = std::copysign(std::pow(std::abs(ct), e), ct);
    const double y = std::copysign(std::pow(std::abs(st), e), st);
    raw.push_back({cx + hx * x + uniform(rng, -0.1, 0.1) * p.jitter,
                   cy + hy * y + uniform(rng, -0.1, 0.1) * p.jitter});
  }
  return finish(std::move(raw), true, ElementClass::kBoundary, p);
}

struct KeyAccess {
  SynthParams& p;
  void set(const std::string& key, const std::string& value) {
    auto as_int = [&]() { return std::stoi(value); };
    auto as_double = [&]() { return std::stod(value); };
    static const char* kClassKeys[map::kNumClasses] = {"divider", "ped_crossing",
                                                       "boundary"};
    for (int c = 0; c < map::kNumClasses; ++c) {
      if (key == std::string(kClassKeys[c]) + "_min") {
        p.counts[static_cast<std::size_t>(c)].min = as_int();
        return;
      }
      if (key == std::string(kClassKeys[c]) + "_max") {
        p.counts[static_cast<std::size_t>(c)].max = as_int();
        return;
      }
    }
    if (key == "seed") p.seed = std::stoull(value);
    else if (key == "jitter") p.jitter = as_double();
    else if (key == "point_count") p.point_count = as_int();
    else if (key == "x_min") p.range.x_min = as_double();
    else if (key == "x_max") p.range.x_max = as_double();
    else if (key == "y_min") p.range.y_min = as_double();
    else if (key == "y_max") p.range.y_max = as_double();
    else if (key == "image_width") p.image_width = as_int();
    else if (key == "image_height") p.image_height = as_int();
    else if (key == "camera_height") p.camera_height = as_double();
    else if (key == "pv_channels") p.pv_channels = as_int();
    else if (key == "noise_sigma") p.noise_sigma = as_double();
    else if (key == "splat_sigma_px") p.splat_sigma_px = as_double();
    else throw std::invalid_argument("unknown synth parameter '" + key + "'");
  }
};

}  // namespace

void validate_params(const SynthParams& p) {
  for (const CountRange& c : p.counts) {
    if (c.min < 0 || c.max < c.min) {
      throw std::invalid_argument("synth: element counts must satisfy 0 <= min <= max");
    }
  }
  if (p.noise_sigma < 0.0) throw std::invalid_argument("synth: noise sigma must be >= 0");
  if (p.jitter < 0.0) throw std::invalid_argument("synth: jitter must be >= 0");
  if (p.point_count < 2) throw std::invalid_argument("synth: point_count must be >= 2");
  if (p.pv_channels < map::kNumClasses) {
    throw std::invalid_argument("synth: need at least 3 PV channels");
  }
  if (p.image_width < 1 || p.image_height < 1) {
    throw std::invalid_argument("synth: image size must be positive");
  }
  if (!(p.range.width() > 0) || !(p.range.height() > 0)) {
    throw std::invalid_argument("synth: empty BEV range");
  }
}

SynthParams parse_params(const std::string& text) {
  SynthParams p;
  KeyAccess access{p};
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("synth params line " + std::to_string(line_no) +
                                  ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    try {
      access.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("synth params line " + std::to_string(line_no) +
                                  ": " + e.what());
    }
  }
  validate_params(p);
  return p;
}

std::string format_params(const SynthParams& p) {
  std::ostringstream os;
  os.precision(17);
  os << "seed=" << p.seed << '\n';
  static const char* kClassKeys[map::kNumClasses] = {"divider", "ped_crossing",
                                                     "boundary"};
  for (int c = 0; c < map::kNumClasses; ++c) {
    os << kClassKeys[c] << "_min=" << p.counts[static_cast<std::size_t>(c)].min << '\n';
    os << kClassKeys[c] << "_max=" << p.counts[static_cast<std::size_t>(c)].max << '\n';
  }
  os << "jitter=" << p.jitter << '\n'
     << "point_count=" << p.point_count << '\n'
     << "x_min=" << p.range.x_min << '\n'
     << "x_max=" << p.range.x_max << '\n'
     << "y_min=" << p.range.y_min << '\n'
     << "y_max=" << p.range.y_max << '\n'
     << "image_width=" << p.image_width << '\n'
     << "image_height=" << p.image_height << '\n'
     << "camera_height=" << p.camera_height << '\n'
     << "pv_channels=" << p.pv_channels << '\n'
     << "noise_sigma=" << p.noise_sigma << '\n'
     << "splat_sigma_px=" << p.splat_sigma_px << '\n';
  return os.str();
}

map::CameraRig make_rig(const SynthParams& p) {
  const double f = p.image_width / 2.0;  // 90 degree horizontal FOV
  const double cy_mid = 0.5 * (p.range.y_min + p.range.y_max);
  const double reach = 0.25 * p.range.height();
  map::CameraRig rig;
  const map::Point3 eye{0.0, cy_mid, p.camera_height};
  rig.cameras.push_back(map::look_at_camera(eye, {0.0, cy_mid + reach, 0.0}, f, f,
                                            p.image_width, p.image_height));
  rig.cameras.push_back(map::look_at_camera(eye, {0.0, cy_mid - reach, 0.0}, f, f,
                                            p.image_width, p.image_height));
  return rig;
}

map::Scene synth_scene(const SynthParams& params, std::uint64_t index) {
  validate_params(params);
  std::mt19937_64 rng = make_rng(params.seed, index, 0);
  map::Scene scene;
  scene.id = "synth-" + std::to_string(params.seed) + "-" + std::to_string(index);
  scene.range = params.range;
  const int n_div = uniform_int(rng, params.counts[0].min, params.counts[0].max);
  const int n_ped = uniform_int(rng, params.counts[1].min, params.counts[1].max);
  const int n_bnd = uniform_int(rng, params.counts[2].min, params.counts[2].max);
  for (int i = 0; i < n_div; ++i) scene.elements.push_back(make_divider(rng, params));
  for (int i = 0; i < n_ped; ++i) scene.elements.push_back(make_ped_crossing(rng, params));
  for (int i = 0; i < n_bnd; ++i) scene.elements.push_back(make_boundary(rng, params));
  scene.rig = make_rig(params);
  return scene;
}

void splat_world_point(PvImage& image, const map::Camera& camera,
                       const map::Point3& world, int channel,
                       double sigma_px) {
  const map::Projection pr = map::project_world_point(camera, world);
  if (!pr.valid) return;
  const double s = std::max(sigma_px, 1e-3);
  const int radius = static_cast<int>(std::ceil(3.0 * s));
  // Pixel (row, col) covers [col, col + 1) x [row, row + 1).
  const int u0 = static_cast<int>(std::floor(pr.u));
  const int v0 = static_cast<int>(std::floor(pr.v));
  for (int row = std::max(0, v0 - radius); row <= std::min(image.height - 1, v0 + radius); ++row) {
    for (int col = std::max(0, u0 - radius); col <= std::min(image.width - 1, u0 + radius); ++col) {
      const double du = col + 0.5 - pr.u, dv = row + 0.5 - pr.v;
      const double w = std::exp(-(du * du + dv * dv) / (2.0 * s * s));
      double& cell = image.at(channel, row, col);
      cell = std::max(cell, w);
    }
  }
}

std::vector<PvImage> render_views(const map::Scene& scene,
                                  const map::CameraRig& rig,
                                  const SynthParams& params,
                                  std::uint64_t index) {
  std::vector<PvImage> views;
  std::mt19937_64 rng = make_rng(params.seed, index, 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t cam = 0; cam < rig.cameras.size(); ++cam) {
    const map::Camera& camera = rig.cameras[cam];
    PvImage img;
    img.channels = params.pv_channels;
    img.height = camera.height;
    img.width = camera.width;
    img.data.assign(static_cast<std::size_t>(img.channels) * img.height * img.width, 0.0);

    constexpr double kSpacing = 0.25;  // meters between splatted samples
    for (const map::MapElement& e : scene.elements) {
      const int channel = static_cast<int>(e.cls);
      const std::size_t np = e.points.size();
      const std::size_t nseg = e.closed ? np : np - 1;
      for (std::size_t s = 0; s < nseg; ++s) {
        const Point2& a = e.points[s];
        const Point2& b = e.points[(s + 1) % np];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const int steps = std::max(1, static_cast<int>(std::ceil(len / kSpacing)));
        for (int k = 0; k <= steps; ++k) {
          const double t = static_cast<double>(k) / steps;
          splat_world_point(img, camera,
                            {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), 0.0},
                            channel, params.splat_sigma_px);
        }
      }
    }
    // Smooth positional context in the remaining channels.
    for (int c = map::kNumClasses; c < img.channels; ++c) {
      const int k = c - map::kNumClasses;
      for (int row = 0; row < img.height; ++row) {
        for (int col = 0; col < img.width; ++col) {
          const double u = (col + 0.5) / img.width;
          const double v = (row + 0.5) / img.height;
          double value = 0.0;
          switch (k % 3) {
            case 0: value = u; break;
            case 1: value = v; break;
            default:
              value = std::sin(std::numbers::pi * (k / 3 + 1) * u) *
                      std::cos(std::numbers::pi * (k / 3 + 1) * v);
          }
          img.at(c, row, col) = value + 0.1 * static_cast<double>(cam);
        }
      }
    }
    if (params.noise_sigma > 0.0) {
      for (double& x : img.data) x += params.noise_sigma * noise(rng);
    }
    views.push_back(std::move(img));
  }
  return views;
}

BevTargets scene_to_bev_gt(const map::Scene& scene, int height, int width) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("scene_to_bev_gt: grid extents must be positive");
  }
  BevTargets out;
  map::GridSpec grid{height, width, scene.range};
  out.masks = map::rasterize(scene.elements, grid);
  for (const map::MapElement& e : scene.elements) {
    ElementTarget t;
    t.cls = e.cls;
    t.closed = e.closed;
    t.points = map::normalize_points(e.points, scene.range);
    out.elements.push_back(std::move(t));
  }
  return out;
}

}  // namespace sgq::synth
