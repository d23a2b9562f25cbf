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

#include "sgq/bev/bev_encoder.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgq::bev {
namespace {

template <typename T>
bool wants(const std::shared_ptr<Node<T>>& n) {
  return n->requires_grad;
}

// Bilinear read of one channel plane with zero padding; optionally the
// partial derivatives along x and y.
template <typename T>
T bilinear(const T* plane, int h, int w, double px, double py, double* dx,
           double* dy) {
  const double fx0 = std::floor(px), fy0 = std::floor(py);
  const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
  const double ax = px - fx0, ay = py - fy0;
  auto pix = [&](int y, int x) -> double {
    if (x < 0 || y < 0 || x >= w || y >= h) return 0.0;
    return static_cast<double>(plane[static_cast<std::size_t>(y) * w + x]);
  };
  const double v00 = pix(y0, x0), v01 = pix(y0, x0 + 1);
  const double v10 = pix(y0 + 1, x0), v11 = pix(y0 + 1, x0 + 1);
  if (dx != nullptr) *dx = (1 - ay) * (v01 - v00) + ay * (v11 - v10);
  if (dy != nullptr) *dy = (1 - ax) * (v10 - v00) + ax * (v11 - v01);
  return static_cast<T>((1 - ay) * ((1 - ax) * v00 + ax * v01) +
                        ay * ((1 - ax) * v10 + ax * v11));
}

// Per (cell, camera, height) projection state kept for the backward pass.
struct ProjectedAnchor {
  double u = 0.0, v = 0.0;
  double du_dz = 0.0, dv_dz = 0.0;
  bool valid = false;
};

ProjectedAnchor project_anchor(const map::Camera& cam, double x, double y,
                               double z) {
  ProjectedAnchor a;
  const map::Point3 pc = map::world_to_camera(cam, {x, y, z});
  const map::Projection p = map::project_camera_point(cam, pc);
  if (!p.valid) return a;
  a.valid = true;
  a.u = p.u;
  a.v = p.v;
  const auto& r = cam.rotation;
  const double dxc = r[2], dyc = r[5], dzc = r[8];
  const double inv = 1.0 / (pc.z * pc.z);
  a.du_dz = cam.fx * (dxc * pc.z - pc.x * dzc) * inv;
  a.dv_dz = cam.fy * (dyc * pc.z - pc.y * dzc) * inv;
  return a;
}

template <typename T>
struct AttentionPass {
  std::vector<T> weights;  // cells * M
  Buffer<T> out;           // cells * C
};

template <typename T>
AttentionPass<T> attend(const Tensor<T>& qk, const KernelSamples<T>& s,
                        double scale) {
  const std::int64_t cells = qk.dim(0), channels = qk.dim(1);
  if (s.feats.rank() != 3 || s.feats.dim(0) != cells ||
      s.feats.dim(2) != channels || s.feats.dim(1) != s.slots) {
    shape_error("kernel_attention", "qk " + shape_string(qk.shape()) +
                                        " does not fit samples " +
                                        shape_string(s.feats.shape()));
  }
  const std::size_t m = static_cast<std::size_t>(s.slots);
  const std::size_t c = static_cast<std::size_t>(channels);
  AttentionPass<T> r;
  r.weights.assign(static_cast<std::size_t>(cells) * m, T(0));
  r.out.assign(static_cast<std::size_t>(cells) * c, T(0));
  record_score_matrix(AttentionKind::kOther, cells * s.slots);
  auto q = qk.data();
  auto f = s.feats.data();
  for (std::size_t i = 0; i < static_cast<std::size_t>(cells); ++i) {
    const T* qi = q.data() + i * c;
    T* wi = r.weights.data() + i * m;
    double best = -INFINITY;
    for (std::size_t k = 0; k < m; ++k) {
      if (!s.valid[i * m + k]) continue;
      const T* fk = f.data() + (i * m + k) * c;
      double dot = 0.0;
      for (std::size_t ch = 0; ch < c; ++ch) dot += static_cast<double>(qi[ch]) * fk[ch];
      wi[k] = static_cast<T>(dot * scale);
      best = std::max(best, static_cast<double>(wi[k]));
    }
    if (best == -INFINITY) continue;
    double total = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (!s.valid[i * m + k]) continue;
      const double e = std::exp(static_cast<double>(wi[k]) - best);
      wi[k] = static_cast<T>(e);
      total += e;
    }
    T* oi = r.out.data() + i * c;
    for (std::size_t k = 0; k < m; ++k) {
      if (!s.valid[i * m + k]) continue;
      wi[k] = static_cast<T>(wi[k] / total);
      const T* fk = f.data() + (i * m + k) * c;
      for (std::size_t ch = 0; ch < c; ++ch) oi[ch] += wi[k] * fk[ch];
    }
  }
  return r;
}

}  // namespace

std::string_view mode_name(EncoderMode mode) {
  return mode == EncoderMode::kGkt ? "gkt" : "gkt-h";
}

EncoderMode parse_mode(std::string_view name) {
  if (name == "gkt") return EncoderMode::kGkt;
  if (name == "gkt-h") return EncoderMode::kGktH;
  throw std::invalid_argument("unknown encoder mode '" + std::string(name) +
                              "' (expected gkt or gkt-h)");
}

void validate_config(const EncoderConfig& c) {
  if (c.layers < 0) throw std::invalid_argument("encoder.layers must be >= 0");
  if (c.kernel < 1 || c.kernel % 2 == 0) {
    throw std::invalid_argument("encoder.kernel must be odd and positive");
  }
  if (c.heights.empty()) throw std::invalid_argument("encoder.heights is empty");
  if (!(c.clamp >= 0.0)) throw std::invalid_argument("encoder.clamp must be >= 0");
  if (c.grid_height < 1 || c.grid_width < 1) {
    throw std::invalid_argument("BEV grid extents must be positive");
  }
  if (c.dim < 1 || c.pv_channels < 1) {
    throw std::invalid_argument("encoder dims must be positive");
  }
}

template <typename T>
BevQueryGrid<T> make_bev_queries(int height, int width,
                                 const map::BevRange& range,
                                 const Tensor<T>& table,
                                 std::vector<double> heights) {
  if (height < 1 || width < 1) {
    throw std::invalid_argument("make_bev_queries: extents must be positive");
  }
  if (!(range.width() > 0) || !(range.height() > 0)) {
    throw std::invalid_argument("make_bev_queries: empty range");
  }
  if (table.rank() != 2 || table.dim(0) != static_cast<std::int64_t>(height) * width) {
    shape_error("make_bev_queries", "table " + shape_string(table.shape()) +
                                        " does not hold " + std::to_string(height) +
                                        "x" + std::to_string(width) + " cells");
  }
  BevQueryGrid<T> g;
  g.height = height;
  g.width = width;
  g.range = range;
  g.heights = std::move(heights);
  g.content = table;
  const map::GridSpec spec{height, width, range};
  g.anchors.reserve(static_cast<std::size_t>(height) * width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) g.anchors.push_back(spec.cell_center(r, c));
  }
  return g;
}

std::vector<map::Projection> project_points(std::span<const map::Point3> world,
                                            const map::Camera& camera) {
  std::vector<map::Projection> out;
  out.reserve(world.size());
  for (const map::Point3& p : world) out.push_back(map::project_world_point(camera, p));
  return out;
}

template <typename T>
Tensor<T> pv_tensor(const synth::PvImage& image) {
  std::vector<T> v(image.data.begin(), image.data.end());
  return Tensor<T>::constant({image.channels, image.height, image.width}, v);
}

template <typename T>
KernelSamples<T> project_sample(const Tensor<T>& z,
                                std::span<const map::Point2> anchors,
                                const std::vector<Tensor<T>>& views,
                                const map::CameraRig& rig, int kernel) {
  if (z.rank() != 2 || z.dim(0) != static_cast<std::int64_t>(anchors.size())) {
    shape_error("project_sample", "heights " + shape_string(z.shape()) + " vs " +
                                      std::to_string(anchors.size()) + " anchors");
  }
  if (views.size() != rig.cameras.size() || views.empty()) {
    shape_error("project_sample", std::to_string(views.size()) + " views for " +
                                      std::to_string(rig.cameras.size()) + " cameras");
  }
  if (kernel < 1 || kernel % 2 == 0) shape_error("project_sample", "kernel must be odd");
  const std::int64_t channels = views[0].dim(0);
  for (std::size_t c = 0; c < views.size(); ++c) {
    const auto& cam = rig.cameras[c];
    if (views[c].rank() != 3 || views[c].dim(0) != channels ||
        views[c].dim(1) != cam.height || views[c].dim(2) != cam.width) {
      shape_error("project_sample", "view " + std::to_string(c) + " has shape " +
                                        shape_string(views[c].shape()));
    }
  }
  const std::size_t cells = anchors.size();
  const std::size_t nz = static_cast<std::size_t>(z.dim(1));
  const std::size_t ncam = views.size();
  const std::size_t kk = static_cast<std::size_t>(kernel) * kernel;
  const std::size_t m = ncam * nz * kk;
  const std::size_t ch = static_cast<std::size_t>(channels);
  const int half = kernel / 2;

  KernelSamples<T> s;
  s.slots = static_cast<int>(m);
  s.valid.assign(cells * m, 0);
  std::vector<ProjectedAnchor> proj(cells * ncam * nz);
  Buffer<T> out(cells * m * ch, T(0));
  auto zv = z.data();
  for (std::size_t i = 0; i < cells; ++i) {
    for (std::size_t c = 0; c < ncam; ++c) {
      const map::Camera& cam = rig.cameras[c];
      const T* img = views[c].data().data();
      const std::size_t plane = static_cast<std::size_t>(cam.height) * cam.width;
      for (std::size_t j = 0; j < nz; ++j) {
        ProjectedAnchor& a = proj[(i * ncam + c) * nz + j];
        a = project_anchor(cam, anchors[i].x, anchors[i].y,
                           static_cast<double>(zv[i * nz + j]));
        if (!a.valid) continue;
        for (std::size_t k = 0; k < kk; ++k) {
          const std::size_t slot = (c * nz + j) * kk + k;
          s.valid[i * m + slot] = 1;
          const double px = a.u + static_cast<double>(static_cast<int>(k % kernel) - half) - 0.5;
          const double py = a.v + static_cast<double>(static_cast<int>(k / kernel) - half) - 0.5;
          T* dst = out.data() + (i * m + slot) * ch;
          for (std::size_t q = 0; q < ch; ++q) {
            dst[q] = bilinear(img + q * plane, cam.height, cam.width, px, py,
                              nullptr, nullptr);
          }
        }
      }
    }
  }
  std::vector<Tensor<T>> view_copy = views;
  const map::CameraRig rig_copy = rig;
  s.feats = make_result<T>(
      "project_sample", {static_cast<std::int64_t>(cells), static_cast<std::int64_t>(m), channels},
      std::move(out), {z},
      [proj = std::move(proj), view_copy, rig_copy, cells, nz, ncam, kk, m, ch,
       half, kernel](Node<T>& self) {
        auto& Z = self.inputs[0];
        if (!wants(Z)) return;
        auto& gz = Z->ensure_grad();
        const Buffer<T>& g = self.grad;
        for (std::size_t i = 0; i < cells; ++i) {
          for (std::size_t c = 0; c < ncam; ++c) {
            const map::Camera& cam = rig_copy.cameras[c];
            const T* img = view_copy[c].data().data();
            const std::size_t plane = static_cast<std::size_t>(cam.height) * cam.width;
            for (std::size_t j = 0; j < nz; ++j) {
              const ProjectedAnchor& a = proj[(i * ncam + c) * nz + j];
              if (!a.valid) continue;
              double acc = 0.0;
              for (std::size_t k = 0; k < kk; ++k) {
                const std::size_t slot = (c * nz + j) * kk + k;
                const double px = a.u + static_cast<double>(static_cast<int>(k % kernel) - half) - 0.5;
                const double py = a.v + static_cast<double>(static_cast<int>(k / kernel) - half) - 0.5;
                const T* gi = g.data() + (i * m + slot) * ch;
                for (std::size_t q = 0; q < ch; ++q) {
                  double dx = 0.0, dy = 0.0;
                  bilinear(img + q * plane, cam.height, cam.width, px, py, &dx, &dy);
                  acc += static_cast<double>(gi[q]) * (dx * a.du_dz + dy * a.dv_dz);
                }
              }
              gz[i * nz + j] += static_cast<T>(acc);
            }
          }
        }
      });
  return s;
}

template <typename T>
Tensor<T> kernel_attention(const Tensor<T>& qk, const KernelSamples<T>& samples,
                           double scale) {
  AttentionPass<T> pass = attend(qk, samples, scale);
  const std::size_t cells = static_cast<std::size_t>(qk.dim(0));
  const std::size_t c = static_cast<std::size_t>(qk.dim(1));
  const std::size_t m = static_cast<std::size_t>(samples.slots);
  std::vector<std::uint8_t> valid = samples.valid;
  return make_result<T>(
      "kernel_attention", qk.shape(), std::move(pass.out), {qk, samples.feats},
      [w = std::move(pass.weights), valid = std::move(valid), cells, c, m,
       scale](Node<T>& self) {
        auto& Q = self.inputs[0];
        auto& F = self.inputs[1];
        const Buffer<T>& g = self.grad;
        std::vector<double> dw(m), ds(m);
        for (std::size_t i = 0; i < cells; ++i) {
          const T* gi = g.data() + i * c;
          const T* qi = Q->value.data() + i * c;
          const T* wi = w.data() + i * m;
          double mix = 0.0;
          for (std::size_t k = 0; k < m; ++k) {
            dw[k] = 0.0;
            if (!valid[i * m + k]) continue;
            const T* fk = F->value.data() + (i * m + k) * c;
            for (std::size_t ch = 0; ch < c; ++ch) dw[k] += static_cast<double>(gi[ch]) * fk[ch];
            mix += wi[k] * dw[k];
          }
          for (std::size_t k = 0; k < m; ++k) {
            ds[k] = valid[i * m + k] ? wi[k] * (dw[k] - mix) * scale : 0.0;
          }
          if (wants(Q)) {
            T* gq = Q->ensure_grad().data() + i * c;
            for (std::size_t k = 0; k < m; ++k) {
              if (ds[k] == 0.0) continue;
              const T* fk = F->value.data() + (i * m + k) * c;
              for (std::size_t ch = 0; ch < c; ++ch) gq[ch] += static_cast<T>(ds[k] * fk[ch]);
            }
          }
          if (wants(F)) {
            T* gf = F->ensure_grad().data();
            for (std::size_t k = 0; k < m; ++k) {
              if (!valid[i * m + k]) continue;
              T* gk = gf + (i * m + k) * c;
              for (std::size_t ch = 0; ch < c; ++ch) {
                gk[ch] += static_cast<T>(wi[k] * gi[ch] + ds[k] * qi[ch]);
              }
            }
          }
        }
      });
}

template <typename T>
std::vector<T> kernel_attention_weights(const Tensor<T>& qk,
                                        const KernelSamples<T>& samples,
                                        double scale) {
  return attend(qk, samples, scale).weights;
}

template <typename T>
Tensor<T> kernel_cross_attention(const Tensor<T>& q,
                                 const KernelSamples<T>& samples,
                                 const EncoderLayer<T>& layer) {
  const std::int64_t cells = q.dim(0), dim = q.dim(1);
  const Tensor<T> qk = linear(q, layer.query, Tensor<T>());
  const Tensor<T> agg =
      kernel_attention(qk, samples, 1.0 / std::sqrt(static_cast<double>(dim)));
  const Tensor<T> upd = layer.output(layer.value(agg));
  std::vector<T> mask(static_cast<std::size_t>(cells * dim), T(0));
  const std::size_t m = static_cast<std::size_t>(samples.slots);
  for (std::size_t i = 0; i < static_cast<std::size_t>(cells); ++i) {
    const auto first = samples.valid.begin() + static_cast<std::ptrdiff_t>(i * m);
    if (std::find(first, first + static_cast<std::ptrdiff_t>(m), 1) != first + static_cast<std::ptrdiff_t>(m)) {
      std::fill_n(mask.begin() + static_cast<std::ptrdiff_t>(i * dim), dim, T(1));
    }
  }
  return add(q, mul(upd, Tensor<T>::constant(q.shape(), mask)));
}

template <typename T>
BevEncoder<T>::BevEncoder(const EncoderConfig& config, ParameterStore<T>& store,
                          std::mt19937_64& rng)
    : config_(config) {
  validate_config(config_);
  const int cells = config_.grid_height * config_.grid_width;
  const int d = config_.dim, c = config_.pv_channels;
  const int nz = static_cast<int>(config_.heights.size());
  table_ = store.add_uniform("bev.query", {cells, d}, 0.5, rng);
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = "bev." + std::to_string(l);
    EncoderLayer<T> layer;
    layer.offset.w = store.add_constant(p + ".offset.w", {d, nz}, T(0));
    layer.offset.b = store.add_constant(p + ".offset.b", {nz}, T(0));
    layer.query = store.add_uniform(p + ".query", {d, c}, std::sqrt(6.0 / (d + c)), rng);
    layer.value = nn::make_linear(store, p + ".value", c, d, rng);
    layer.output = nn::make_linear(store, p + ".output", d, d, rng);
    layer.norm = nn::make_layer_norm(store, p + ".norm", d);
    layers_.push_back(layer);
  }
}

template <typename T>
BevQueryGrid<T> BevEncoder<T>::grid() const {
  return make_bev_queries(config_.grid_height, config_.grid_width, config_.range,
                          table_, config_.heights);
}

template <typename T>
Tensor<T> BevEncoder<T>::sample_heights(const Tensor<T>& content,
                                        const EncoderLayer<T>& layer) const {
  const std::int64_t cells = content.dim(0);
  const std::int64_t nz = static_cast<std::int64_t>(config_.heights.size());
  std::vector<T> z0(config_.heights.begin(), config_.heights.end());
  if (config_.mode == EncoderMode::kGkt) {
    std::vector<T> tiled;
    tiled.reserve(static_cast<std::size_t>(cells * nz));
    for (std::int64_t i = 0; i < cells; ++i) tiled.insert(tiled.end(), z0.begin(), z0.end());
    return Tensor<T>::constant({cells, nz}, tiled);
  }
  const Tensor<T> offset = clamp(layer.offset(content), -config_.clamp, config_.clamp);
  return add(offset, Tensor<T>::constant({nz}, z0));
}

template <typename T>
Tensor<T> BevEncoder<T>::forward(const std::vector<Tensor<T>>& views,
                                 const map::CameraRig& rig) const {
  const BevQueryGrid<T> g = grid();
  Tensor<T> x = g.content;
  for (const EncoderLayer<T>& layer : layers_) {
    const Tensor<T> z = sample_heights(x, layer);
    const KernelSamples<T> s = project_sample(z, g.anchors, views, rig, config_.kernel);
    x = layer.norm(kernel_cross_attention(x, s, layer));
  }
  return x;
}

template <typename T>
Tensor<T> to_chw(const Tensor<T>& cells, int height, int width) {
  if (cells.rank() != 2 || cells.dim(0) != static_cast<std::int64_t>(height) * width) {
    shape_error("to_chw", "cells " + shape_string(cells.shape()) + " vs " +
                              std::to_string(height) + "x" + std::to_string(width));
  }
  return reshape(transpose(cells), {cells.dim(1), height, width});
}

#define SGQ_INSTANTIATE_BEV(T)                                                 \
  template BevQueryGrid<T> make_bev_queries(int, int, const map::BevRange&,    \
                                            const Tensor<T>&,                  \
                                            std::vector<double>);              \
  template Tensor<T> pv_tensor(const synth::PvImage&);                         \
  template KernelSamples<T> project_sample(                                    \
      const Tensor<T>&, std::span<const map::Point2>,                          \
      const std::vector<Tensor<T>>&, const map::CameraRig&, int);              \
  template Tensor<T> kernel_attention(const Tensor<T>&,                        \
                                      const KernelSamples<T>&, double);        \
  template std::vector<T> kernel_attention_weights(                            \
      const Tensor<T>&, const KernelSamples<T>&, double);                      \
  template Tensor<T> kernel_cross_attention(                                   \
      const Tensor<T>&, const KernelSamples<T>&, const EncoderLayer<T>&);      \
  template class BevEncoder<T>;                                                \
  template Tensor<T> to_chw(const Tensor<T>&, int, int);

SGQ_INSTANTIATE_BEV(float)
SGQ_INSTANTIATE_BEV(double)

}  // namespace sgq::bev
