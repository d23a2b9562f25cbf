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

#include "sgq/decoder/sgq_decoder.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgq/decoder/positional.h"

namespace sgq::decoder {

std::string_view mode_name(DecoderMode mode) {
  return mode == DecoderMode::kSgq ? "sgq" : "point_query";
}

DecoderMode parse_decoder_mode(std::string_view name) {
  if (name == "sgq") return DecoderMode::kSgq;
  if (name == "point_query") return DecoderMode::kPointQuery;
  throw std::invalid_argument("unknown decoder mode '" + std::string(name) +
                              "' (expected sgq or point_query)");
}

std::string_view instance_pe_name(InstancePe pe) {
  switch (pe) {
    case InstancePe::kNone: return "none";
    case InstancePe::kBbox: return "bbox";
    case InstancePe::kCenter: return "center";
    case InstancePe::kLearnable: return "learnable";
  }
  return "none";
}

InstancePe parse_instance_pe(std::string_view name) {
  if (name == "none") return InstancePe::kNone;
  if (name == "bbox") return InstancePe::kBbox;
  if (name == "center") return InstancePe::kCenter;
  if (name == "learnable") return InstancePe::kLearnable;
  throw std::invalid_argument("unknown instance_pe '" + std::string(name) +
                              "' (expected none, bbox, center or learnable)");
}

void validate_config(const DecoderConfig& c) {
  auto fail = [](const std::string& m) { throw std::invalid_argument("decoder: " + m); };
  if (c.num_queries < 1) fail("N must be >= 1");
  if (c.num_points < 1) fail("n must be >= 1");
  if (c.dim < 4 || c.dim % 4 != 0) fail("D must be a positive multiple of 4");
  if (c.heads < 1 || c.dim % c.heads != 0) fail("D must be divisible by heads");
  if (c.layers < 1) fail("layers must be >= 1");
  if (c.ffn_dim < 1) fail("ffn_dim must be >= 1");
  if (c.aux_queries < 0) fail("aux_queries must be >= 0");
  if (c.bev_height < 1 || c.bev_width < 1) fail("BEV grid extents must be positive");
  if (c.instance_pe == InstancePe::kBbox && c.dim % 8 != 0) {
    fail("bbox instance PE needs D divisible by 8");
  }
  if (!(c.pe_temperature > 0.0)) fail("PE temperature must be positive");
}

std::vector<double> lattice_reference_points(int instances, int points) {
  if (instances < 1 || points < 1) {
    throw std::invalid_argument("lattice_reference_points: extents must be positive");
  }
  const int gx = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(instances))));
  const int gy = (instances + gx - 1) / gx;
  const double cw = 0.8 / gx, ch = 0.8 / gy;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(instances) * points * 2);
  for (int i = 0; i < instances; ++i) {
    const int col = i % gx, row = i / gx;
    const double cx = 0.1 + (col + 0.5) * cw;
    const double y0 = 0.1 + (row + 0.1) * ch;
    const double y1 = 0.1 + (row + 0.9) * ch;
    for (int j = 0; j < points; ++j) {
      const double t = points == 1 ? 0.5 : static_cast<double>(j) / (points - 1);
      out.push_back(cx);
      out.push_back(y0 + (y1 - y0) * t);
    }
  }
  return out;
}

namespace {

template <typename T>
Tensor<T> lattice_logits(ParameterStore<T>& store, const std::string& name,
                         int instances, int points) {
  std::vector<T> v;
  for (double p : lattice_reference_points(instances, points)) {
    v.push_back(static_cast<T>(std::log(p / (1.0 - p))));
  }
  return store.add(name, {instances, points, 2}, v);
}

template <typename T>
PredictionHeads<T> make_heads(ParameterStore<T>& store, const std::string& name,
                              int dim, int point_outputs, std::mt19937_64& rng) {
  PredictionHeads<T> h;
  h.cls = nn::make_mlp(store, name + ".cls", {dim, dim, kNumLogits}, rng);
  h.pts = nn::make_mlp(store, name + ".pts", {dim, dim, point_outputs}, rng);
  // Start with no displacement of the reference points.
  auto& last = h.pts.layers.back();
  std::fill(last.w.mutable_data().begin(), last.w.mutable_data().end(), T(0));
  return h;
}

template <typename T>
LayerPrediction<T> slice_rows(const LayerPrediction<T>& p, std::int64_t begin,
                              std::int64_t end) {
  return {slice(p.logits, 0, begin, end), slice(p.points, 0, begin, end)};
}

}  // namespace

namespace detail {

template <typename T>
AttentionBlock<T> make_attention(ParameterStore<T>& store, const std::string& name,
                                 int dim, std::mt19937_64& rng) {
  AttentionBlock<T> b;
  b.q = nn::make_linear(store, name + ".q", dim, dim, rng);
  // A key bias shifts every score of a query equally, so keys have none.
  b.k = nn::make_linear(store, name + ".k", dim, dim, rng, false);
  b.v = nn::make_linear(store, name + ".v", dim, dim, rng);
  b.o = nn::make_linear(store, name + ".o", dim, dim, rng);
  b.norm = nn::make_layer_norm(store, name + ".norm", dim);
  return b;
}

template <typename T>
Tensor<T> attend(const AttentionBlock<T>& block, const Tensor<T>& x,
                 const Tensor<T>& query_in, const Tensor<T>& key_in,
                 const Tensor<T>& value_in, const AttentionSpec& spec) {
  const Tensor<T> a =
      attention(block.q(query_in), block.k(key_in), block.v(value_in), spec);
  return block.norm(add(x, block.o(a)));
}

template <typename T>
Tensor<T> feed_forward(const FeedForwardBlock<T>& block, const Tensor<T>& x) {
  return block.norm(add(x, block.mlp(x)));
}

AttentionSpec cross_spec(const DecoderConfig& config, std::span<const double> refs) {
  AttentionSpec spec;
  spec.heads = config.heads;
  spec.kind = AttentionKind::kCross;
  if (config.cross_window >= 0) {
    const int side = 2 * config.cross_window + 1;
    spec.keys_per_query = side * side;
    spec.key_index = window_key_index(refs, config.bev_height, config.bev_width,
                                      config.cross_window);
  }
  return spec;
}

AttentionSpec self_spec(const DecoderConfig& config, int rows_per_query) {
  AttentionSpec spec;
  spec.heads = config.heads;
  spec.kind = AttentionKind::kSelf;
  if (config.aux_queries > 0) {
    spec.groups.assign(static_cast<std::size_t>(config.num_queries) * rows_per_query, 0);
    spec.groups.resize(spec.groups.size() +
                           static_cast<std::size_t>(config.aux_queries) * rows_per_query,
                       1);
  }
  return spec;
}

template <typename T>
Tensor<T> cell_embedding(const DecoderConfig& config) {
  std::vector<T> centres;
  for (int r = 0; r < config.bev_height; ++r) {
    for (int c = 0; c < config.bev_width; ++c) {
      centres.push_back(static_cast<T>((c + 0.5) / config.bev_width));
      centres.push_back(static_cast<T>((r + 0.5) / config.bev_height));
    }
  }
  const std::int64_t cells = static_cast<std::int64_t>(config.bev_height) * config.bev_width;
  return sine_embedding(Tensor<T>::constant({cells, 2}, centres), config.dim,
                        config.pe_temperature)
      .detach();
}

std::vector<double> to_doubles(std::span<const float> v) {
  return std::vector<double>(v.begin(), v.end());
}
std::vector<double> to_doubles(std::span<const double> v) {
  return std::vector<double>(v.begin(), v.end());
}

}  // namespace detail

template <typename T>
DecoderState<T> init_queries(ParameterStore<T>& store, const std::string& prefix,
                             int instances, int points, int dim,
                             std::mt19937_64& rng) {
  if (instances < 1 || points < 1 || dim < 1) {
    throw std::invalid_argument("init_queries: dimensions must be positive");
  }
  DecoderState<T> s;
  s.queries = store.add_uniform(prefix + ".query", {instances, dim}, 1.0, rng);
  s.refs = sigmoid(lattice_logits(store, prefix + ".ref", instances, points));
  return s;
}

template <typename T>
DecoderState<T> init_queries(int instances, int points, int dim,
                             std::uint64_t seed) {
  ParameterStore<T> store;
  std::mt19937_64 rng(seed);
  return init_queries(store, "dec", instances, points, dim, rng);
}

template <typename T>
Tensor<T> scatter(const Tensor<T>& q, int n) {
  if (n < 1) throw std::invalid_argument("scatter: n must be >= 1");
  Tensor<T> rows = q.rank() == 1 ? reshape(q, {1, q.dim(0)}) : q;
  if (rows.rank() != 2) shape_error("scatter", "expects [N, D], got " + shape_string(q.shape()));
  std::vector<std::int64_t> idx;
  idx.reserve(static_cast<std::size_t>(rows.dim(0)) * n);
  for (std::int64_t i = 0; i < rows.dim(0); ++i) idx.insert(idx.end(), n, i);
  return index_rows(rows, idx);
}

template <typename T>
Tensor<T> gather(const Tensor<T>& rows, int n, const nn::Mlp<T>& mlp) {
  if (rows.rank() != 2 || n < 1 || rows.dim(0) % n != 0) {
    shape_error("gather", "rows " + shape_string(rows.shape()) +
                              " are not a whole number of groups of " + std::to_string(n));
  }
  const std::int64_t d = rows.dim(1);
  if (mlp.layers.empty() || mlp.layers.front().in_features() != n * d) {
    shape_error("gather", "mlp expects " +
                              std::to_string(mlp.layers.empty() ? 0 : mlp.layers.front().in_features()) +
                              " inputs, rows give " + std::to_string(n * d));
  }
  return mlp(reshape(rows, {rows.dim(0) / n, n * d}));
}

template <typename T>
Tensor<T> refine_points(const Tensor<T>& refs, const Tensor<T>& offsets) {
  return sigmoid(add(inverse_sigmoid(refs), offsets));
}

std::vector<std::int64_t> window_key_index(std::span<const double> refs, int height,
                                           int width, int radius) {
  if (refs.size() % 2 != 0 || radius < 0 || height < 1 || width < 1) {
    throw std::invalid_argument("window_key_index: bad arguments");
  }
  const int side = 2 * radius + 1;
  std::vector<std::int64_t> out;
  out.reserve(refs.size() / 2 * static_cast<std::size_t>(side * side));
  for (std::size_t p = 0; p < refs.size(); p += 2) {
    const int col = std::clamp(static_cast<int>(std::floor(refs[p] * width)), 0, width - 1);
    const int row = std::clamp(static_cast<int>(std::floor(refs[p + 1] * height)), 0, height - 1);
    for (int dr = -radius; dr <= radius; ++dr) {
      for (int dc = -radius; dc <= radius; ++dc) {
        const int r = row + dr, c = col + dc;
        out.push_back(r < 0 || c < 0 || r >= height || c >= width
                          ? -1
                          : static_cast<std::int64_t>(r) * width + c);
      }
    }
  }
  return out;
}

template <typename T>
SgqDecoder<T>::SgqDecoder(const DecoderConfig& config, ParameterStore<T>& store,
                          std::mt19937_64& rng)
    : config_(config) {
  validate_config(config_);
  const int d = config_.dim, n = config_.num_points;
  const int rows = config_.num_queries + config_.aux_queries;
  const DecoderState<T> s = init_queries(store, "dec", rows, n, d, rng);
  query_table_ = s.queries;
  ref_table_ = store.get("dec.ref");
  if (config_.instance_pe == InstancePe::kLearnable) {
    learnable_pe_ = store.add_uniform("dec.instance_pe", {rows, d}, 1.0, rng);
  } else if (config_.instance_pe != InstancePe::kNone) {
    instance_pe_proj_ = nn::make_linear(store, "dec.instance_pe", d, d, rng);
  }
  key_pe_ = nn::make_linear(store, "dec.key_pe", d, d, rng, false);
  cell_pe_ = detail::cell_embedding<T>(config_);
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = "dec." + std::to_string(l);
    Layer layer;
    layer.self_attn = detail::make_attention(store, p + ".sa", d, rng);
    layer.pe = nn::make_linear(store, p + ".pe", d, d, rng);
    layer.cross_attn = detail::make_attention(store, p + ".ca", d, rng);
    layer.ffn.mlp = nn::make_mlp(store, p + ".ffn", {d, config_.ffn_dim, d}, rng);
    layer.ffn.norm = nn::make_layer_norm(store, p + ".ffn.norm", d);
    layer.gather = nn::make_mlp(store, p + ".gather", {n * d, d, d}, rng);
    layer.gather_norm = nn::make_layer_norm(store, p + ".gather.norm", d);
    layer.heads = make_heads(store, p, d, 2 * n, rng);
    layers_.push_back(std::move(layer));
  }
}

template <typename T>
DecoderState<T> SgqDecoder<T>::init_state() const {
  return {query_table_, sigmoid(ref_table_), 0};
}

template <typename T>
BevMemory<T> SgqDecoder<T>::memory(const Tensor<T>& bev) const {
  const std::int64_t cells = static_cast<std::int64_t>(config_.bev_height) * config_.bev_width;
  if (bev.rank() != 2 || bev.dim(0) != cells || bev.dim(1) != config_.dim) {
    shape_error("decode", "BEV features " + shape_string(bev.shape()) + " expected [" +
                              std::to_string(cells) + ", " + std::to_string(config_.dim) + "]");
  }
  return {bev, key_pe_(cell_pe_)};
}

template <typename T>
Tensor<T> SgqDecoder<T>::instance_pe(const DecoderState<T>& state,
                                     const Layer&) const {
  const std::int64_t rows = state.refs.dim(0), n = state.refs.dim(1);
  switch (config_.instance_pe) {
    case InstancePe::kNone:
      return Tensor<T>();
    case InstancePe::kLearnable:
      return learnable_pe_;
    case InstancePe::kCenter:
      return instance_pe_proj_(sine_embedding(mean(state.refs, 1), config_.dim,
                                              config_.pe_temperature));
    case InstancePe::kBbox: {
      // Corners pick the extreme coordinates, so gradients reach the refs.
      auto r = state.refs.data();
      std::vector<std::int64_t> lo, hi;
      for (std::int64_t i = 0; i < rows; ++i) {
        for (std::int64_t axis = 0; axis < 2; ++axis) {
          std::int64_t a = i * n * 2 + axis, b = a;
          for (std::int64_t j = 1; j < n; ++j) {
            const std::int64_t k = (i * n + j) * 2 + axis;
            if (r[k] < r[a]) a = k;
            if (r[k] > r[b]) b = k;
          }
          lo.push_back(a);
          hi.push_back(b);
        }
      }
      const Tensor<T> flat = reshape(state.refs, {rows * n * 2, 1});
      const Tensor<T> lo_pts = reshape(index_rows(flat, lo), {rows, 2});
      const Tensor<T> hi_pts = reshape(index_rows(flat, hi), {rows, 2});
      const int half = config_.dim / 2;
      return instance_pe_proj_(concat<T>(
          {sine_embedding(lo_pts, half, config_.pe_temperature),
           sine_embedding(hi_pts, half, config_.pe_temperature)},
          1));
    }
  }
  return Tensor<T>();
}

template <typename T>
std::pair<DecoderState<T>, LayerPrediction<T>> SgqDecoder<T>::layer(
    const DecoderState<T>& state, const BevMemory<T>& memory,
    DecodeProbe<T>* probe) const {
  if (state.layer < 0 || state.layer >= config_.layers) {
    throw std::out_of_range("decoder layer " + std::to_string(state.layer) + " out of range");
  }
  const Layer& L = layers_[static_cast<std::size_t>(state.layer)];
  const int n = config_.num_points;
  const std::int64_t rows = state.queries.dim(0);

  Tensor<T> x = state.queries;
  Tensor<T> query_in = x;
  if (config_.instance_pe != InstancePe::kNone) query_in = add(x, instance_pe(state, L));
  x = detail::attend(L.self_attn, x, query_in, query_in, x, detail::self_spec(config_, 1));

  const Tensor<T> scattered = scatter(x, n);
  if (probe != nullptr) probe->scattered.push_back(scattered.detach());
  const Tensor<T> flat_refs = reshape(state.refs, {rows * n, 2});
  const Tensor<T> pos = L.pe(sine_embedding(flat_refs, config_.dim, config_.pe_temperature));
  const Tensor<T> sq = add(scattered, pos);

  const std::vector<double> ref_values = detail::to_doubles(flat_refs.data());
  Tensor<T> y = detail::attend(L.cross_attn, sq, sq, add(memory.features, memory.key_pe),
                               memory.features, detail::cross_spec(config_, ref_values));
  y = detail::feed_forward(L.ffn, y);

  const Tensor<T> g = L.gather_norm(gather(y, n, L.gather));
  LayerPrediction<T> pred;
  pred.logits = L.heads.cls(g);
  const Tensor<T> offsets = reshape(L.heads.pts(g), {rows, n, 2});
  pred.points = refine_points(state.refs, offsets);
  DecoderState<T> next{g, pred.points, state.layer + 1};
  return {next, pred};
}

template <typename T>
DecoderOutput<T> SgqDecoder<T>::decode(const Tensor<T>& bev, DecodeProbe<T>* probe) const {
  const BevMemory<T> mem = memory(bev);
  DecoderState<T> state = init_state();
  DecoderOutput<T> out;
  const std::int64_t n_main = config_.num_queries;
  const std::int64_t rows = n_main + config_.aux_queries;
  for (int l = 0; l < config_.layers; ++l) {
    out.refs.push_back(state.refs);
    auto [next, pred] = layer(state, mem, probe);
    if (config_.aux_queries > 0) {
      out.layers.push_back(slice_rows(pred, 0, n_main));
      out.aux.push_back(slice_rows(pred, n_main, rows));
    } else {
      out.layers.push_back(pred);
    }
    state = {next.queries, next.refs.detach(), next.layer};
  }
  return out;
}

template <typename T>
PointQueryDecoder<T>::PointQueryDecoder(const DecoderConfig& config,
                                        ParameterStore<T>& store, std::mt19937_64& rng)
    : config_(config) {
  validate_config(config_);
  const int d = config_.dim, n = config_.num_points;
  const int rows = config_.num_queries + config_.aux_queries;
  instance_table_ = store.add_uniform("pq.instance", {rows, d}, 1.0, rng);
  point_table_ = store.add_uniform("pq.point", {n, d}, 1.0, rng);
  ref_table_ = lattice_logits(store, "pq.ref", rows, n);
  key_pe_ = nn::make_linear(store, "pq.key_pe", d, d, rng, false);
  cell_pe_ = detail::cell_embedding<T>(config_);
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = "pq." + std::to_string(l);
    Layer layer;
    layer.self_attn = detail::make_attention(store, p + ".sa", d, rng);
    layer.pe = nn::make_linear(store, p + ".pe", d, d, rng);
    layer.cross_attn = detail::make_attention(store, p + ".ca", d, rng);
    layer.ffn.mlp = nn::make_mlp(store, p + ".ffn", {d, config_.ffn_dim, d}, rng);
    layer.ffn.norm = nn::make_layer_norm(store, p + ".ffn.norm", d);
    layer.heads = make_heads(store, p, d, 2, rng);
    layers_.push_back(std::move(layer));
  }
}

template <typename T>
DecoderState<T> PointQueryDecoder<T>::init_state() const {
  const std::int64_t rows = instance_table_.dim(0), n = config_.num_points;
  std::vector<std::int64_t> inst, pt;
  for (std::int64_t i = 0; i < rows; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      inst.push_back(i);
      pt.push_back(j);
    }
  }
  return {add(index_rows(instance_table_, inst), index_rows(point_table_, pt)),
          sigmoid(ref_table_), 0};
}

template <typename T>
DecoderOutput<T> PointQueryDecoder<T>::decode(const Tensor<T>& bev, DecodeProbe<T>*) const {
  const std::int64_t cells = static_cast<std::int64_t>(config_.bev_height) * config_.bev_width;
  if (bev.rank() != 2 || bev.dim(0) != cells || bev.dim(1) != config_.dim) {
    shape_error("decode", "BEV features " + shape_string(bev.shape()) + " expected [" +
                              std::to_string(cells) + ", " + std::to_string(config_.dim) + "]");
  }
  const Tensor<T> keys = add(bev, key_pe_(cell_pe_));
  const int n = config_.num_points;
  const std::int64_t n_main = config_.num_queries;
  const std::int64_t rows = n_main + config_.aux_queries;
  DecoderState<T> state = init_state();
  DecoderOutput<T> out;
  for (const Layer& L : layers_) {
    out.refs.push_back(state.refs);
    Tensor<T> x = state.queries;
    x = detail::attend(L.self_attn, x, x, x, x, detail::self_spec(config_, n));
    const Tensor<T> flat_refs = reshape(state.refs, {rows * n, 2});
    const Tensor<T> sq =
        add(x, L.pe(sine_embedding(flat_refs, config_.dim, config_.pe_temperature)));
    const std::vector<double> ref_values = detail::to_doubles(flat_refs.data());
    Tensor<T> y = detail::attend(L.cross_attn, sq, sq, keys, bev,
                                 detail::cross_spec(config_, ref_values));
    y = detail::feed_forward(L.ffn, y);

    LayerPrediction<T> pred;
    pred.logits = L.heads.cls(mean(reshape(y, {rows, n, config_.dim}), 1));
    pred.points = refine_points(state.refs, reshape(L.heads.pts(y), {rows, n, 2}));
    if (config_.aux_queries > 0) {
      out.layers.push_back(slice_rows(pred, 0, n_main));
      out.aux.push_back(slice_rows(pred, n_main, rows));
    } else {
      out.layers.push_back(pred);
    }
    state = {y, pred.points.detach(), state.layer + 1};
  }
  return out;
}

template <typename T>
std::unique_ptr<Decoder<T>> make_decoder(const DecoderConfig& config,
                                         ParameterStore<T>& store, std::mt19937_64& rng) {
  if (config.mode == DecoderMode::kSgq) {
    return std::make_unique<SgqDecoder<T>>(config, store, rng);
  }
  return std::make_unique<PointQueryDecoder<T>>(config, store, rng);
}

template <typename T>
std::vector<InstancePrediction> to_instances(const LayerPrediction<T>& pred) {
  const std::int64_t rows = pred.logits.dim(0);
  const std::int64_t n = pred.points.dim(1);
  auto lg = pred.logits.data();
  auto pts = pred.points.data();
  std::vector<InstancePrediction> out(static_cast<std::size_t>(rows));
  for (std::int64_t i = 0; i < rows; ++i) {
    const T* l = lg.data() + i * kNumLogits;
    const double top = *std::max_element(l, l + kNumLogits);
    double total = 0.0;
    std::array<double, kNumLogits> p{};
    for (int c = 0; c < kNumLogits; ++c) {
      p[static_cast<std::size_t>(c)] = std::exp(static_cast<double>(l[c]) - top);
      total += p[static_cast<std::size_t>(c)];
    }
    InstancePrediction& inst = out[static_cast<std::size_t>(i)];
    int best = 0;
    for (int c = 0; c < map::kNumClasses; ++c) {
      inst.class_scores[static_cast<std::size_t>(c)] = p[static_cast<std::size_t>(c)] / total;
      if (inst.class_scores[static_cast<std::size_t>(c)] >
          inst.class_scores[static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    inst.cls = static_cast<map::ElementClass>(best);
    inst.confidence = inst.class_scores[static_cast<std::size_t>(best)];
    for (std::int64_t j = 0; j < n; ++j) {
      inst.points.push_back({static_cast<double>(pts[(i * n + j) * 2]),
                             static_cast<double>(pts[(i * n + j) * 2 + 1])});
    }
  }
  return out;
}

#define SGQ_INSTANTIATE_DECODER(T)                                             \
  template DecoderState<T> init_queries(ParameterStore<T>&, const std::string&, \
                                        int, int, int, std::mt19937_64&);      \
  template DecoderState<T> init_queries<T>(int, int, int, std::uint64_t);      \
  template Tensor<T> scatter(const Tensor<T>&, int);                           \
  template Tensor<T> gather(const Tensor<T>&, int, const nn::Mlp<T>&);         \
  template Tensor<T> refine_points(const Tensor<T>&, const Tensor<T>&);        \
  template class SgqDecoder<T>;                                                \
  template class PointQueryDecoder<T>;                                         \
  template std::unique_ptr<Decoder<T>> make_decoder(                           \
      const DecoderConfig&, ParameterStore<T>&, std::mt19937_64&);             \
  template std::vector<InstancePrediction> to_instances(                       \
      const LayerPrediction<T>&);                                              \
  template AttentionBlock<T> detail::make_attention(                           \
      ParameterStore<T>&, const std::string&, int, std::mt19937_64&);          \
  template Tensor<T> detail::attend(const AttentionBlock<T>&, const Tensor<T>&, \
                                    const Tensor<T>&, const Tensor<T>&,        \
                                    const Tensor<T>&, const AttentionSpec&);   \
  template Tensor<T> detail::feed_forward(const FeedForwardBlock<T>&,          \
                                          const Tensor<T>&);                   \
  template Tensor<T> detail::cell_embedding<T>(const DecoderConfig&);

SGQ_INSTANTIATE_DECODER(float)
SGQ_INSTANTIATE_DECODER(double)

}  // namespace sgq::decoder
