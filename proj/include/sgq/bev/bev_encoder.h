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

#ifndef SGQ_BEV_BEV_ENCODER_H_
#define SGQ_BEV_BEV_ENCODER_H_

// Camera-to-BEV encoder. Every BEV cell owns a learnable content vector and
// a set of 3D sample points (its anchor at several heights). Each layer
// projects the points into every camera, reads a small pixel window around
// each projection and lets the cell attend over everything it read.
//
// In gkt-h mode each layer also predicts one height offset per anchor
// height from the cell content: z = z0 + clamp(LP(q), -c, c).

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sgq/map/camera.h"
#include "sgq/map/map_element.h"
#include "sgq/synth/scene_synth.h"
#include "sgq/tensor/nn.h"
#include "sgq/tensor/ops.h"
#include "sgq/tensor/parameters.h"

namespace sgq::bev {

enum class EncoderMode { kGkt, kGktH };

std::string_view mode_name(EncoderMode mode);
// "gkt" or "gkt-h".
EncoderMode parse_mode(std::string_view name);

struct EncoderConfig {
  EncoderMode mode = EncoderMode::kGktH;
  int layers = 3;
  int kernel = 3;  // odd window side in pixels
  std::vector<double> heights = {-0.5, 0.0, 0.5, 1.0};
  double clamp = 1.5;  // meters
  int grid_height = 64;
  int grid_width = 32;
  int dim = 256;
  int pv_channels = 6;
  map::BevRange range;
};

void validate_config(const EncoderConfig& config);

template <typename T>
struct BevQueryGrid {
  int height = 0;
  int width = 0;
  map::BevRange range;
  std::vector<map::Point2> anchors;  // row-major cell centers
  std::vector<double> heights;       // z0
  Tensor<T> content;                 // [H * W, D]
};

// Row r spans y ascending from range.y_min, column c spans x from
// range.x_min. `table` must be [H * W, D].
template <typename T>
BevQueryGrid<T> make_bev_queries(int height, int width,
                                 const map::BevRange& range,
                                 const Tensor<T>& table,
                                 std::vector<double> heights);

// Batch pinhole projection of world points.
std::vector<map::Projection> project_points(std::span<const map::Point3> world,
                                            const map::Camera& camera);

// Camera feature image as a constant [C, h, w] tensor.
template <typename T>
Tensor<T> pv_tensor(const synth::PvImage& image);

template <typename T>
struct EncoderLayer {
  nn::Linear<T> offset;  // D -> Z, only used in gkt-h mode
  Tensor<T> query;       // [D, C]
  nn::Linear<T> value;   // C -> D
  nn::Linear<T> output;  // D -> D
  nn::LayerNorm<T> norm;
};

// Sampled pixel windows: feats is [cells, M, C] with
// M = cameras * Z * kernel^2 ordered (camera, height, ky, kx); valid holds
// cells * M flags (a whole window shares its centre's validity).
template <typename T>
struct KernelSamples {
  Tensor<T> feats;
  std::vector<std::uint8_t> valid;
  int slots = 0;  // M
};

// z is [cells, Z]. Bilinear reads with zero padding at pixel offsets
// -(k/2)..k/2 around each projection; differentiable with respect to z.
template <typename T>
KernelSamples<T> project_sample(const Tensor<T>& z,
                                std::span<const map::Point2> anchors,
                                const std::vector<Tensor<T>>& views,
                                const map::CameraRig& rig, int kernel);

// Softmax over a cell's valid slots of scale * (qk . feat), then the
// weighted feature sum: qk [cells, C] -> [cells, C]. Cells without a valid
// slot give zeros.
template <typename T>
Tensor<T> kernel_attention(const Tensor<T>& qk, const KernelSamples<T>& samples,
                           double scale);

// The attention weights of kernel_attention, [cells * M], zero on invalid
// slots.
template <typename T>
std::vector<T> kernel_attention_weights(const Tensor<T>& qk,
                                        const KernelSamples<T>& samples,
                                        double scale);

// q + has_valid * output(value(kernel_attention(q * Wq, samples))).
template <typename T>
Tensor<T> kernel_cross_attention(const Tensor<T>& q,
                                 const KernelSamples<T>& samples,
                                 const EncoderLayer<T>& layer);

template <typename T>
class BevEncoder {
 public:
  // Registers "bev.query" and "bev.<l>.*" in a fixed order independent of
  // the mode; offset projections start at zero.
  BevEncoder(const EncoderConfig& config, ParameterStore<T>& store,
             std::mt19937_64& rng);

  const EncoderConfig& config() const { return config_; }
  BevQueryGrid<T> grid() const;
  const std::vector<EncoderLayer<T>>& layers() const { return layers_; }

  // Per-cell sample heights [cells, Z] for the given content.
  Tensor<T> sample_heights(const Tensor<T>& content,
                           const EncoderLayer<T>& layer) const;

  // F_bev as [H * W, D] (row-major cells).
  Tensor<T> forward(const std::vector<Tensor<T>>& views,
                    const map::CameraRig& rig) const;

 private:
  EncoderConfig config_;
  Tensor<T> table_;
  std::vector<EncoderLayer<T>> layers_;
};

// [H * W, D] -> [D, H, W].
template <typename T>
Tensor<T> to_chw(const Tensor<T>& cells, int height, int width);

}  // namespace sgq::bev

#endif  // SGQ_BEV_BEV_ENCODER_H_
