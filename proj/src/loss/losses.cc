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

#include "sgq/loss/losses.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sgq::loss {
namespace {

template <typename T>
Tensor<T> zero() {
  return Tensor<T>::scalar(T(0));
}

template <typename T>
Tensor<T> accumulate(const Tensor<T>& acc, const Tensor<T>& term, double w = 1.0) {
  const Tensor<T> t = w == 1.0 ? term : scale(term, w);
  return acc.defined() ? add(acc, t) : t;
}

std::vector<std::size_t> supervised_layers(std::size_t count, bool all) {
  std::vector<std::size_t> out;
  if (count == 0) return out;
  if (!all) return {count - 1};
  for (std::size_t i = 0; i < count; ++i) out.push_back(i);
  return out;
}

}  // namespace

void validate_config(const LossConfig& c) {
  if (c.K < 1) throw std::invalid_argument("loss.K must be >= 1");
  if (c.focal_gamma < 0.0) throw std::invalid_argument("loss.focal_gamma must be >= 0");
  if (c.focal_alpha < 0.0 || c.focal_alpha > 1.0) {
    throw std::invalid_argument("loss.focal_alpha must be in [0, 1]");
  }
}

double total_loss(const LossBreakdown& b, const LossConfig& c) {
  const std::pair<const char*, double> parts[] = {
      {"cls", b.cls}, {"p2p", b.p2p}, {"dir", b.dir}, {"one2many", b.one2many},
      {"bev", b.bev}, {"pv", b.pv}};
  for (const auto& [name, v] : parts) {
    if (!std::isfinite(v)) {
      throw std::domain_error(std::string("loss component '") + name + "' is not finite");
    }
  }
  return c.beta_o * (b.cls + b.p2p + b.dir) + c.beta_m * b.one2many +
         c.beta_d * (c.alpha_b * b.bev + c.alpha_p * b.pv);
}

template <typename T>
Tensor<T> focal_loss(const Tensor<T>& logits, std::span<const int> targets, double gamma,
                     double alpha, double normalizer) {
  if (logits.rank() != 2 || static_cast<std::size_t>(logits.dim(0)) != targets.size()) {
    shape_error("focal_loss", "logits " + shape_string(logits.shape()) + " for " +
                                  std::to_string(targets.size()) + " targets");
  }
  const std::int64_t rows = logits.dim(0), classes = logits.dim(1);
  if (rows == 0) return zero<T>();
  std::vector<T> onehot(static_cast<std::size_t>(rows * classes), T(0));
  std::vector<T> weight(static_cast<std::size_t>(rows));
  for (std::int64_t i = 0; i < rows; ++i) {
    const int t = targets[static_cast<std::size_t>(i)];
    if (t < 0 || t >= classes) throw std::invalid_argument("focal_loss: target out of range");
    onehot[static_cast<std::size_t>(i * classes + t)] = T(1);
    weight[static_cast<std::size_t>(i)] =
        static_cast<T>(t == classes - 1 ? 1.0 - alpha : alpha);
  }
  const Tensor<T> lt = sum(mul(log_softmax(logits, 1), Tensor<T>::constant(logits.shape(), onehot)), 1);
  const Tensor<T> mod = pow(add_scalar(scale(exp(lt), -1.0), 1.0), gamma);
  const Tensor<T> per = mul(mul(mod, lt), Tensor<T>::constant({rows}, weight));
  return scale(sum(per), -1.0 / normalizer);
}

template <typename T>
std::vector<PredictionView> prediction_views(const decoder::LayerPrediction<T>& pred) {
  std::vector<PredictionView> out;
  for (const decoder::InstancePrediction& inst : decoder::to_instances(pred)) {
    PredictionView v;
    double fg = 0.0;
    for (int c = 0; c < map::kNumClasses; ++c) {
      v.probs[static_cast<std::size_t>(c)] = inst.class_scores[static_cast<std::size_t>(c)];
      fg += inst.class_scores[static_cast<std::size_t>(c)];
    }
    v.probs[map::kNumClasses] = 1.0 - fg;
    v.points = inst.points;
    out.push_back(std::move(v));
  }
  return out;
}

template <typename T>
One2OneTerms<T> loss_one2one_layer(const decoder::LayerPrediction<T>& pred,
                                   std::span<const ElementTarget> gts, const LossConfig& c) {
  const std::int64_t rows = pred.logits.dim(0);
  const std::int64_t n = pred.points.dim(1);
  for (const ElementTarget& g : gts) {
    if (static_cast<std::int64_t>(g.points.size()) != n) {
      throw std::invalid_argument("loss: target has " + std::to_string(g.points.size()) +
                                  " points, predictions have " + std::to_string(n));
    }
  }
  One2OneTerms<T> r;
  const std::vector<PredictionView> views = prediction_views(pred);
  r.match = match(views, gts, c.match);

  std::vector<int> targets(static_cast<std::size_t>(rows), map::kNumClasses);
  std::vector<std::int64_t> pred_rows;
  std::vector<T> gt_pts;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    const int i = r.match.gt_to_pred[j];
    if (i < 0) continue;
    targets[static_cast<std::size_t>(i)] = static_cast<int>(gts[j].cls);
    pred_rows.push_back(i);
    for (const map::Point2& p : map::apply_ordering(gts[j].points, r.match.gt_ordering[j])) {
      gt_pts.push_back(static_cast<T>(p.x));
      gt_pts.push_back(static_cast<T>(p.y));
    }
  }
  const double normalizer = std::max<double>(1.0, static_cast<double>(gts.size()));
  r.cls = scale(focal_loss(pred.logits, targets, c.focal_gamma, c.focal_alpha, normalizer), c.w_cls);

  const std::int64_t m = static_cast<std::int64_t>(pred_rows.size());
  if (m == 0) {
    r.p2p = zero<T>();
    r.dir = zero<T>();
    return r;
  }
  const Tensor<T> matched = reshape(index_rows(reshape(pred.points, {rows, n * 2}), pred_rows), {m, n, 2});
  const Tensor<T> target = Tensor<T>::constant({m, n, 2}, gt_pts);
  r.p2p = scale(mean(l1_distance(reshape(matched, {m * n, 2}), reshape(target, {m * n, 2}))), c.w_pts);

  if (n < 2) {
    r.dir = zero<T>();
    return r;
  }
  std::vector<std::int64_t> keep;
  std::vector<T> gt_edges;
  for (std::int64_t e = 0; e < m * (n - 1); ++e) {
    const std::int64_t k = e / (n - 1), j = e % (n - 1);
    const T dx = gt_pts[static_cast<std::size_t>(((k * n) + j + 1) * 2)] - gt_pts[static_cast<std::size_t>(((k * n) + j) * 2)];
    const T dy = gt_pts[static_cast<std::size_t>(((k * n) + j + 1) * 2 + 1)] - gt_pts[static_cast<std::size_t>(((k * n) + j) * 2 + 1)];
    if (dx == T(0) && dy == T(0)) continue;
    keep.push_back(e);
    gt_edges.push_back(dx);
    gt_edges.push_back(dy);
  }
  if (keep.empty()) {
    r.dir = zero<T>();
    return r;
  }
  const Tensor<T> edges = reshape(sub(slice(matched, 1, 1, n), slice(matched, 1, 0, n - 1)), {m * (n - 1), 2});
  const Tensor<T> cos = cosine_similarity(
      index_rows(edges, keep),
      Tensor<T>::constant({static_cast<std::int64_t>(keep.size()), 2}, gt_edges));
  r.dir = scale(add_scalar(scale(mean(cos), -1.0), 1.0), c.w_dir);
  return r;
}

template <typename T>
Tensor<T> loss_one2many(const std::vector<decoder::LayerPrediction<T>>& aux,
                        std::span<const ElementTarget> gts, const LossConfig& c,
                        std::vector<MatchResult>* matches) {
  if (c.K < 1) throw std::invalid_argument("one2many: K must be >= 1");
  std::vector<ElementTarget> repeated;
  for (int k = 0; k < c.K; ++k) repeated.insert(repeated.end(), gts.begin(), gts.end());
  Tensor<T> acc;
  for (std::size_t l : supervised_layers(aux.size(), c.aux_layers)) {
    One2OneTerms<T> t = loss_one2one_layer(aux[l], repeated, c);
    acc = accumulate(acc, add(add(t.cls, t.p2p), t.dir));
    if (matches != nullptr) matches->push_back(std::move(t.match));
  }
  return acc.defined() ? acc : zero<T>();
}

template <typename T>
Tensor<T> mask_targets(const map::ClassMasks& masks) {
  const std::int64_t cells = static_cast<std::int64_t>(masks.height) * masks.width;
  std::vector<T> v(static_cast<std::size_t>(cells * map::kNumClasses));
  for (int r = 0; r < masks.height; ++r) {
    for (int col = 0; col < masks.width; ++col) {
      for (int c = 0; c < map::kNumClasses; ++c) {
        v[static_cast<std::size_t>((static_cast<std::int64_t>(r) * masks.width + col) * map::kNumClasses + c)] =
            static_cast<T>(masks.at(c, r, col));
      }
    }
  }
  return Tensor<T>::constant({cells, map::kNumClasses}, v);
}

template <typename T>
DenseTerms<T> dense_terms(const Tensor<T>& bev_logits, const Tensor<T>& bev_targets,
                          const Tensor<T>* pv_logits, const Tensor<T>* pv_targets,
                          const LossConfig& c) {
  if (bev_logits.shape() != bev_targets.shape()) {
    shape_error("loss_dense", "BEV logits " + shape_string(bev_logits.shape()) +
                                  " vs targets " + shape_string(bev_targets.shape()));
  }
  DenseTerms<T> d;
  d.bev = mean(bce_with_logits(bev_logits, bev_targets));
  if (c.alpha_p != 0.0 && pv_logits != nullptr && pv_targets != nullptr) {
    if (pv_logits->shape() != pv_targets->shape()) {
      shape_error("loss_dense", "PV logits " + shape_string(pv_logits->shape()) +
                                    " vs targets " + shape_string(pv_targets->shape()));
    }
    d.pv = mean(bce_with_logits(*pv_logits, *pv_targets));
  }
  return d;
}

template <typename T>
Tensor<T> loss_dense(const Tensor<T>& bev_logits, const Tensor<T>& bev_targets,
                     const Tensor<T>* pv_logits, const Tensor<T>* pv_targets,
                     const LossConfig& c) {
  const DenseTerms<T> d = dense_terms(bev_logits, bev_targets, pv_logits, pv_targets, c);
  Tensor<T> out = scale(d.bev, c.alpha_b);
  if (d.pv.defined()) out = add(out, scale(d.pv, c.alpha_p));
  return out;
}

template <typename T>
LossResult<T> compute_loss(const decoder::DecoderOutput<T>& out,
                           std::span<const ElementTarget> gts, const Tensor<T>& bev_logits,
                           const Tensor<T>& bev_targets, const LossConfig& c,
                           const Tensor<T>* pv_logits, const Tensor<T>* pv_targets) {
  validate_config(c);
  if (out.layers.empty()) throw std::invalid_argument("compute_loss: no decoder layers");
  LossResult<T> r;
  Tensor<T> cls, p2p, dir;
  for (std::size_t l : supervised_layers(out.layers.size(), c.aux_layers)) {
    One2OneTerms<T> t = loss_one2one_layer(out.layers[l], gts, c);
    cls = accumulate(cls, t.cls);
    p2p = accumulate(p2p, t.p2p);
    dir = accumulate(dir, t.dir);
    r.matches.push_back(std::move(t.match));
  }
  const Tensor<T> o2m = out.aux.empty() ? zero<T>() : loss_one2many(out.aux, gts, c);
  const DenseTerms<T> dense = dense_terms(bev_logits, bev_targets, pv_logits, pv_targets, c);

  LossBreakdown& b = r.breakdown;
  b.cls = static_cast<double>(cls.item());
  b.p2p = static_cast<double>(p2p.item());
  b.dir = static_cast<double>(dir.item());
  b.one2many = static_cast<double>(o2m.item());
  b.bev = static_cast<double>(dense.bev.item());
  b.pv = dense.pv.defined() ? static_cast<double>(dense.pv.item()) : 0.0;
  b.total = total_loss(b, c);

  Tensor<T> total = scale(add(add(cls, p2p), dir), c.beta_o);
  total = add(total, scale(o2m, c.beta_m));
  Tensor<T> d = scale(dense.bev, c.alpha_b);
  if (dense.pv.defined()) d = add(d, scale(dense.pv, c.alpha_p));
  r.total = add(total, scale(d, c.beta_d));
  return r;
}

#define SGQ_INSTANTIATE_LOSS(T)                                                \
  template Tensor<T> focal_loss(const Tensor<T>&, std::span<const int>, double, \
                                double, double);                               \
  template std::vector<PredictionView> prediction_views(                        \
      const decoder::LayerPrediction<T>&);                                     \
  template One2OneTerms<T> loss_one2one_layer(                                 \
      const decoder::LayerPrediction<T>&, std::span<const ElementTarget>,      \
      const LossConfig&);                                                      \
  template Tensor<T> loss_one2many(                                            \
      const std::vector<decoder::LayerPrediction<T>>&,                         \
      std::span<const ElementTarget>, const LossConfig&,                       \
      std::vector<MatchResult>*);                                              \
  template Tensor<T> mask_targets<T>(const map::ClassMasks&);                  \
  template DenseTerms<T> dense_terms(const Tensor<T>&, const Tensor<T>&,       \
                                     const Tensor<T>*, const Tensor<T>*,       \
                                     const LossConfig&);                       \
  template Tensor<T> loss_dense(const Tensor<T>&, const Tensor<T>&,            \
                                const Tensor<T>*, const Tensor<T>*,            \
                                const LossConfig&);                            \
  template LossResult<T> compute_loss(                                         \
      const decoder::DecoderOutput<T>&, std::span<const ElementTarget>,        \
      const Tensor<T>&, const Tensor<T>&, const LossConfig&, const Tensor<T>*, \
      const Tensor<T>*);

SGQ_INSTANTIATE_LOSS(float)
SGQ_INSTANTIATE_LOSS(double)

}  // namespace sgq::loss
