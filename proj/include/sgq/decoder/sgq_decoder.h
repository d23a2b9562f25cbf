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

#ifndef SGQ_DECODER_SGQ_DECODER_H_
#define SGQ_DECODER_SGQ_DECODER_H_

// Map-element decoders over a flattened BEV feature grid.
//
// SgqDecoder keeps one content query per map instance. Per layer the
// instance queries attend to each other, are scattered into n copies that
// each get the positional embedding of one reference point, probe the BEV
// features, and are gathered back into one query by an MLP. Heads then
// predict class logits and n point offsets from the instance query.
//
// PointQueryDecoder is the baseline with N * n independent point queries.

#include <cstdint>
#include <array>
#include <memory>
#include <span>
#include <utility>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "sgq/map/map_element.h"
#include "sgq/tensor/nn.h"
#include "sgq/tensor/ops.h"
#include "sgq/tensor/parameters.h"

namespace sgq::decoder {

inline constexpr int kNumLogits = map::kNumClasses + 1;  // last = background

enum class DecoderMode { kSgq, kPointQuery };
enum class InstancePe { kNone, kBbox, kCenter, kLearnable };

std::string_view mode_name(DecoderMode mode);
DecoderMode parse_decoder_mode(std::string_view name);  // sgq | point_query
std::string_view instance_pe_name(InstancePe pe);
InstancePe parse_instance_pe(std::string_view name);  // none|bbox|center|learnable

struct DecoderConfig {
  DecoderMode mode = DecoderMode::kSgq;
  int num_queries = 100;  // N
  int num_points = 20;    // n
  int dim = 256;          // D
  int layers = 6;
  int heads = 8;
  int ffn_dim = 512;
  // Radius in BEV cells of the square key window around each reference
  // point; negative means every cell is a key.
  int cross_window = -1;
  InstancePe instance_pe = InstancePe::kNone;
  double pe_temperature = 20.0;
  // Size of the extra query group used for one-to-many supervision. The
  // group shares weights but never attends to the main group.
  int aux_queries = 0;
  int bev_height = 64;
  int bev_width = 32;
};

void validate_config(const DecoderConfig& config);

template <typename T>
struct DecoderState {
  Tensor<T> queries;  // [N, D]
  Tensor<T> refs;     // [N, n, 2], normalized
  int layer = 0;
};

template <typename T>
struct LayerPrediction {
  Tensor<T> logits;  // [N, kNumLogits]
  Tensor<T> points;  // [N, n, 2], normalized
};

template <typename T>
struct DecoderOutput {
  std::vector<LayerPrediction<T>> layers;  // main group, last is final
  std::vector<LayerPrediction<T>> aux;     // one-to-many group (may be empty)
  std::vector<Tensor<T>> refs;             // reference points fed to each layer
};

// Optional taps for inspection.
template <typename T>
struct DecodeProbe {
  std::vector<Tensor<T>> scattered;  // per layer, before positional addition
};

// Reference points for N instances of n points: instance i sits in cell i
// of a near-square lattice over [0.1, 0.9]^2 and its points run along y
// inside that cell.
std::vector<double> lattice_reference_points(int instances, int points);

// Registers "<prefix>.query" [N, D] (uniform in [-1, 1]) and
// "<prefix>.ref" [N, n, 2] holding the logits of the lattice points.
template <typename T>
DecoderState<T> init_queries(ParameterStore<T>& store, const std::string& prefix,
                             int instances, int points, int dim,
                             std::mt19937_64& rng);

// Convenience: a fresh store seeded with `seed`.
template <typename T>
DecoderState<T> init_queries(int instances, int points, int dim,
                             std::uint64_t seed);

// [N, D] -> [N * n, D]; row i * n + j is row i of q.
template <typename T>
Tensor<T> scatter(const Tensor<T>& q, int n);

// [N * n, D] -> [N, D] through mlp(concat of each instance's n rows).
template <typename T>
Tensor<T> gather(const Tensor<T>& rows, int n, const nn::Mlp<T>& mlp);

// Reference point logits for refinement: sigmoid(inverse_sigmoid(a) + d).
template <typename T>
Tensor<T> refine_points(const Tensor<T>& refs, const Tensor<T>& offsets);

// Key indices of the (2r+1)^2 cells around each reference point, -1 where
// the window leaves the grid. refs holds L (x, y) pairs.
std::vector<std::int64_t> window_key_index(std::span<const double> refs,
                                           int height, int width, int radius);

template <typename T>
struct AttentionBlock {
  nn::Linear<T> q, k, v, o;
  nn::LayerNorm<T> norm;
};

template <typename T>
struct FeedForwardBlock {
  nn::Mlp<T> mlp;
  nn::LayerNorm<T> norm;
};

template <typename T>
struct PredictionHeads {
  nn::Mlp<T> cls;
  nn::Mlp<T> pts;
};

// Shared between both decoders: projected BEV memory for one forward.
template <typename T>
struct BevMemory {
  Tensor<T> features;  // [H * W, D]
  Tensor<T> key_pe;    // [H * W, D]
};

template <typename T>
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual const DecoderConfig& config() const = 0;
  virtual DecoderState<T> init_state() const = 0;
  // bev is [H * W, D].
  virtual DecoderOutput<T> decode(const Tensor<T>& bev,
                                  DecodeProbe<T>* probe = nullptr) const = 0;
};

template <typename T>
class SgqDecoder : public Decoder<T> {
 public:
  // Registers "dec.*"; the layout depends only on the config.
  SgqDecoder(const DecoderConfig& config, ParameterStore<T>& store,
             std::mt19937_64& rng);

  const DecoderConfig& config() const override { return config_; }
  DecoderState<T> init_state() const override;

  // One layer: returns the refined state (reference points not detached)
  // and the layer's predictions for every query group.
  std::pair<DecoderState<T>, LayerPrediction<T>> layer(
      const DecoderState<T>& state, const BevMemory<T>& memory,
      DecodeProbe<T>* probe = nullptr) const;

  BevMemory<T> memory(const Tensor<T>& bev) const;

  // Threads detached refined reference points from layer to layer.
  DecoderOutput<T> decode(const Tensor<T>& bev,
                          DecodeProbe<T>* probe = nullptr) const override;

 private:
  struct Layer {
    AttentionBlock<T> self_attn;
    nn::Linear<T> pe;
    AttentionBlock<T> cross_attn;
    FeedForwardBlock<T> ffn;
    nn::Mlp<T> gather;
    nn::LayerNorm<T> gather_norm;
    PredictionHeads<T> heads;
  };

  Tensor<T> instance_pe(const DecoderState<T>& state, const Layer& layer) const;

  DecoderConfig config_;
  Tensor<T> query_table_;
  Tensor<T> ref_table_;
  Tensor<T> learnable_pe_;
  nn::Linear<T> instance_pe_proj_;
  nn::Linear<T> key_pe_;
  Tensor<T> cell_pe_;  // constant sine embedding of cell centres
  std::vector<Layer> layers_;
};

template <typename T>
class PointQueryDecoder : public Decoder<T> {
 public:
  // Registers "pq.*".
  PointQueryDecoder(const DecoderConfig& config, ParameterStore<T>& store,
                    std::mt19937_64& rng);

  const DecoderConfig& config() const override { return config_; }
  DecoderState<T> init_state() const override;
  DecoderOutput<T> decode(const Tensor<T>& bev,
                          DecodeProbe<T>* probe = nullptr) const override;

 private:
  struct Layer {
    AttentionBlock<T> self_attn;
    nn::Linear<T> pe;
    AttentionBlock<T> cross_attn;
    FeedForwardBlock<T> ffn;
    PredictionHeads<T> heads;  // cls on the instance mean, pts: D -> 2
  };

  DecoderConfig config_;
  Tensor<T> instance_table_;
  Tensor<T> point_table_;
  Tensor<T> ref_table_;
  nn::Linear<T> key_pe_;
  Tensor<T> cell_pe_;
  std::vector<Layer> layers_;
};

template <typename T>
std::unique_ptr<Decoder<T>> make_decoder(const DecoderConfig& config,
                                         ParameterStore<T>& store,
                                         std::mt19937_64& rng);

// Host-side view of one layer's predictions.
struct InstancePrediction {
  map::ElementClass cls = map::ElementClass::kDivider;
  double confidence = 0.0;  // max foreground probability
  std::array<double, map::kNumClasses> class_scores{};
  std::vector<map::Point2> points;  // normalized
};

template <typename T>
std::vector<InstancePrediction> to_instances(const LayerPrediction<T>& pred);

// Internal building blocks shared by both decoders.
namespace detail {

template <typename T>
AttentionBlock<T> make_attention(ParameterStore<T>& store,
                                 const std::string& name, int dim,
                                 std::mt19937_64& rng);

// norm(x + o(attention(q(x + pos_q), k(key_in), v(value_in)))).
template <typename T>
Tensor<T> attend(const AttentionBlock<T>& block, const Tensor<T>& x,
                 const Tensor<T>& query_in, const Tensor<T>& key_in,
                 const Tensor<T>& value_in, const AttentionSpec& spec);

template <typename T>
Tensor<T> feed_forward(const FeedForwardBlock<T>& block, const Tensor<T>& x);

// Cross-attention spec for L queries with given reference points.
AttentionSpec cross_spec(const DecoderConfig& config,
                         std::span<const double> refs);

// Self-attention spec: group mask when an auxiliary group exists.
AttentionSpec self_spec(const DecoderConfig& config, int rows_per_query);

// Constant sine embedding of normalized cell centres [H * W, D].
template <typename T>
Tensor<T> cell_embedding(const DecoderConfig& config);

std::vector<double> to_doubles(std::span<const float> v);
std::vector<double> to_doubles(std::span<const double> v);

}  // namespace detail

}  // namespace sgq::decoder

#endif  // SGQ_DECODER_SGQ_DECODER_H_
