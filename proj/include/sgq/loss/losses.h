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

#ifndef SGQ_LOSS_LOSSES_H_
#define SGQ_LOSS_LOSSES_H_

#include <span>
#include <vector>

#include "sgq/decoder/sgq_decoder.h"
#include "sgq/loss/matching.h"
#include "sgq/map/geometry.h"
#include "sgq/tensor/ops.h"

namespace sgq::loss {

struct LossConfig {
  // Top-level balance of the one-to-one, one-to-many and dense terms, and
  // of the BEV and PV parts of the dense term.
  double beta_o = 1.0, beta_m = 1.0, beta_d = 1.0;
  double alpha_b = 1.0, alpha_p = 0.0;
  int K = 6;  // GT repeats for one-to-many
  MatchWeights match;
  double focal_gamma = 2.0;
  double focal_alpha = 0.25;  // weight of foreground targets; 1 - alpha for background
  bool aux_layers = true;     // supervise every decoder layer
  // Weights inside the one-to-one recipe.
  double w_cls = 2.0, w_pts = 5.0, w_dir = 0.005;
};

void validate_config(const LossConfig& config);

// Component values as they enter the total (already carrying w_cls, w_pts,
// w_dir and summed over supervised layers).
struct LossBreakdown {
  double cls = 0.0, p2p = 0.0, dir = 0.0;
  double one2many = 0.0;
  double bev = 0.0, pv = 0.0;
  double total = 0.0;
};

// beta_o*(cls+p2p+dir) + beta_m*one2many + beta_d*(alpha_b*bev + alpha_p*pv).
// A non-finite component throws std::domain_error naming it.
double total_loss(const LossBreakdown& components, const LossConfig& config);

// Softmax focal loss over the last axis of logits [N, C] against class
// indices, summed and divided by `normalizer`.
template <typename T>
Tensor<T> focal_loss(const Tensor<T>& logits, std::span<const int> targets,
                     double gamma, double alpha, double normalizer);

// Class probabilities and points of every row.
template <typename T>
std::vector<PredictionView> prediction_views(
    const decoder::LayerPrediction<T>& pred);

template <typename T>
struct One2OneTerms {
  Tensor<T> cls, p2p, dir;  // weighted scalars
  MatchResult match;
};

template <typename T>
One2OneTerms<T> loss_one2one_layer(const decoder::LayerPrediction<T>& pred,
                                   std::span<const ElementTarget> gts,
                                   const LossConfig& config);

// Sum over supervised layers of cls + p2p + dir against gts repeated K
// times. K < 1 throws.
template <typename T>
Tensor<T> loss_one2many(const std::vector<decoder::LayerPrediction<T>>& aux,
                        std::span<const ElementTarget> gts,
                        const LossConfig& config,
                        std::vector<MatchResult>* matches = nullptr);

// Row-major cells by class: [H * W, 3].
template <typename T>
Tensor<T> mask_targets(const map::ClassMasks& masks);

// Mean per-pixel binary cross-entropy terms.
template <typename T>
struct DenseTerms {
  Tensor<T> bev;
  Tensor<T> pv;  // undefined when alpha_p == 0 or no PV input
};

template <typename T>
DenseTerms<T> dense_terms(const Tensor<T>& bev_logits,
                          const Tensor<T>& bev_targets,
                          const Tensor<T>* pv_logits,
                          const Tensor<T>* pv_targets,
                          const LossConfig& config);

// alpha_b * bev + alpha_p * pv.
template <typename T>
Tensor<T> loss_dense(const Tensor<T>& bev_logits, const Tensor<T>& bev_targets,
                     const Tensor<T>* pv_logits, const Tensor<T>* pv_targets,
                     const LossConfig& config);

template <typename T>
struct LossResult {
  Tensor<T> total;
  LossBreakdown breakdown;
  std::vector<MatchResult> matches;  // one-to-one, per supervised layer
};

template <typename T>
LossResult<T> compute_loss(const decoder::DecoderOutput<T>& out,
                           std::span<const ElementTarget> gts,
                           const Tensor<T>& bev_logits,
                           const Tensor<T>& bev_targets,
                           const LossConfig& config,
                           const Tensor<T>* pv_logits = nullptr,
                           const Tensor<T>* pv_targets = nullptr);

}  // namespace sgq::loss

#endif  // SGQ_LOSS_LOSSES_H_
