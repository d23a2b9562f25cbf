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

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "sgq/loss/hungarian.h"
#include "sgq/loss/losses.h"
#include "sgq/loss/matching.h"
#include "sgq/map/geometry.h"
#include "sgq/tensor/grad_check.h"
#include "support/oracles.h"

namespace sgq::loss {
namespace {

using map::Point2;
using T = Tensor<double>;
using sgq::testing::assignment_cost;
using sgq::testing::best_ordering_cost;
using sgq::testing::brute_force_assignment_cost;
using sgq::testing::enumerate_orderings;
using sgq::testing::manhattan_sum;

std::vector<Point2> random_points(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point2> p(static_cast<std::size_t>(n));
  for (Point2& q : p) q = {u(rng), u(rng)};
  return p;
}

ElementTarget target(map::ElementClass cls, bool closed, std::vector<Point2> pts) {
  ElementTarget t;
  t.cls = cls;
  t.closed = closed;
  t.points = std::move(pts);
  return t;
}

// Logits that put nearly all mass on `cls` (background = 3).
std::vector<double> confident_logits(int cls) {
  std::vector<double> l(decoder::kNumLogits, -20.0);
  l[static_cast<std::size_t>(cls)] = 20.0;
  return l;
}

decoder::LayerPrediction<double> prediction(const std::vector<std::vector<Point2>>& points,
                                            const std::vector<int>& classes) {
  decoder::LayerPrediction<double> p;
  const std::int64_t rows = static_cast<std::int64_t>(points.size());
  const std::int64_t n = static_cast<std::int64_t>(points.front().size());
  std::vector<double> logits, pts;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto l = confident_logits(classes[i]);
    logits.insert(logits.end(), l.begin(), l.end());
    for (const Point2& q : points[i]) {
      pts.push_back(q.x);
      pts.push_back(q.y);
    }
  }
  p.logits = T::constant({rows, decoder::kNumLogits}, logits);
  p.points = T::constant({rows, n, 2}, pts);
  return p;
}

TEST(HungarianTest, SmallExamples) {
  const std::vector<double> two = {1, 2, 2, 1};
  const Assignment a = hungarian(two, 2, 2);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(a.total, 2.0);

  const std::vector<double> diag = {0, 5, 5, 5, 0, 5, 5, 5, 0};
  EXPECT_EQ(hungarian(diag, 3, 3).row_to_col, (std::vector<int>{0, 1, 2}));

  // All-equal costs: the lowest index wins every tie.
  const std::vector<double> flat(9, 1.0);
  EXPECT_EQ(hungarian(flat, 3, 3).row_to_col, (std::vector<int>{0, 1, 2}));

  const std::vector<double> bad = {1, std::numeric_limits<double>::quiet_NaN()};
  EXPECT_THROW(hungarian(bad, 1, 2), std::invalid_argument);
  const std::vector<double> inf = {1, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(hungarian(inf, 2, 1), std::invalid_argument);
}

TEST(HungarianTest, RectangularAssignsSmallerSide) {
  const std::vector<double> wide = {4, 1, 3, 2, 0, 5};  // 2 x 3
  const Assignment a = hungarian(wide, 2, 3);
  EXPECT_EQ(a.row_to_col, (std::vector<int>{1, 0}));
  EXPECT_EQ(a.col_to_row, (std::vector<int>{1, 0, -1}));
  EXPECT_DOUBLE_EQ(a.total, 3.0);
  const std::vector<double> tall = {4, 2, 1, 0, 0.5, 5};  // 3 x 2
  const Assignment b = hungarian(tall, 3, 2);
  EXPECT_EQ(b.col_to_row, (std::vector<int>{2, 1}));
  EXPECT_EQ(b.row_to_col, (std::vector<int>{-1, 1, 0}));
}

TEST(HungarianTest, MatchesBruteForceOnRandomMatrices) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> size(1, 7);
  for (int trial = 0; trial < 300; ++trial) {
    const int rows = size(rng), cols = size(rng);
    std::vector<double> m = sgq::testing::random_matrix(rng, rows, cols);
    if (trial % 3 == 0) {
      for (double& x : m) x = std::round(x / 3.0);  // many ties
    }
    const Assignment a = hungarian(m, rows, cols);
    const double oracle = brute_force_assignment_cost(m, rows, cols);
    EXPECT_NEAR(a.total, oracle, 1e-9) << rows << "x" << cols;
    EXPECT_NEAR(assignment_cost(m, cols, a.row_to_col), a.total, 1e-12);
    // Injective and covering the smaller side.
    int assigned = 0;
    std::vector<int> seen(static_cast<std::size_t>(cols), 0);
    for (int r = 0; r < rows; ++r) {
      const int c = a.row_to_col[static_cast<std::size_t>(r)];
      if (c < 0) continue;
      ++assigned;
      EXPECT_EQ(seen[static_cast<std::size_t>(c)]++, 0);
      EXPECT_EQ(a.col_to_row[static_cast<std::size_t>(c)], r);
    }
    EXPECT_EQ(assigned, std::min(rows, cols));
  }
}

TEST(PointAssignmentTest, IdentityAndReversal) {
  std::mt19937_64 rng(2);
  const auto pts = random_points(rng, 6);
  const ElementTarget open = target(map::ElementClass::kDivider, false, pts);
  EXPECT_EQ(point_assignment(pts, open), (map::Ordering{0, 1, 2, 3, 4, 5}));
  std::vector<Point2> rev(pts.rbegin(), pts.rend());
  const map::Ordering o = point_assignment(rev, open);
  EXPECT_EQ(o, (map::Ordering{5, 4, 3, 2, 1, 0}));
  EXPECT_EQ(manhattan_sum(rev, pts, o), 0.0);
}

TEST(PointAssignmentTest, MatchesExhaustiveScan) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const bool closed = trial % 2 == 1;
    const auto gt = random_points(rng, 20);
    const auto pred = random_points(rng, 20);
    const map::Ordering o = point_assignment(pred, target(map::ElementClass::kBoundary, closed, gt));
    const auto all = enumerate_orderings(20, closed);
    EXPECT_NE(std::find(all.begin(), all.end(), o), all.end());
    EXPECT_NEAR(manhattan_sum(pred, gt, o), best_ordering_cost(pred, gt, closed), 1e-12);
  }
}

TEST(MatchCostTest, ExactMatchCostsMinusLambdaCls) {
  std::mt19937_64 rng(4);
  const auto pts = random_points(rng, 5);
  PredictionView v;
  v.probs = {1.0, 0.0, 0.0, 0.0};
  v.points = pts;
  const ElementTarget t = target(map::ElementClass::kDivider, false, pts);
  EXPECT_DOUBLE_EQ(instance_match_cost(v, t), -2.0);
  v.points.assign(pts.rbegin(), pts.rend());
  EXPECT_DOUBLE_EQ(instance_match_cost(v, t), -2.0);
}

TEST(MatchCostTest, EqualsBruteForceAndIsShiftInvariant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const MatchWeights w{1.5, 4.0};
  for (int trial = 0; trial < 50; ++trial) {
    const bool closed = trial % 2 == 0;
    const auto gt = random_points(rng, 8);
    PredictionView v;
    double s = 0.0;
    for (double& p : v.probs) s += (p = u(rng));
    for (double& p : v.probs) p /= s;
    v.points = random_points(rng, 8);
    const auto cls = static_cast<map::ElementClass>(trial % 3);
    const double cost = instance_match_cost(v, target(cls, closed, gt), w);
    const double oracle = -w.lambda_cls * v.probs[static_cast<std::size_t>(cls)] +
                          w.lambda_pts * best_ordering_cost(v.points, gt, closed) / 8.0;
    EXPECT_NEAR(cost, oracle, 1e-12);
    if (closed) {
      for (int shift = 1; shift < 8; ++shift) {
        std::vector<Point2> rooted(gt.begin() + shift, gt.end());
        rooted.insert(rooted.end(), gt.begin(), gt.begin() + shift);
        EXPECT_NEAR(instance_match_cost(v, target(cls, true, rooted), w), cost, 1e-9);
      }
    }
  }
}

TEST(MatchTest, InjectiveCoversGtAndIsPermutationEquivariant) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<PredictionView> preds(7);
    for (auto& v : preds) {
      double s = 0.0;
      for (double& p : v.probs) s += (p = u(rng));
      for (double& p : v.probs) p /= s;
      v.points = random_points(rng, 4);
    }
    std::vector<ElementTarget> gts;
    for (int g = 0; g < 4; ++g) {
      gts.push_back(target(static_cast<map::ElementClass>(g % 3), g == 1, random_points(rng, 4)));
    }
    const MatchResult m = match(preds, gts);
    std::vector<int> count(preds.size(), 0);
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const int p = m.gt_to_pred[g];
      ASSERT_GE(p, 0);
      EXPECT_EQ(count[static_cast<std::size_t>(p)]++, 0);
      EXPECT_EQ(m.pred_to_gt[static_cast<std::size_t>(p)], static_cast<int>(g));
      EXPECT_EQ(m.gt_ordering[g], point_assignment(preds[static_cast<std::size_t>(p)].points, gts[g]));
    }
    // Brute-force the instance level.
    std::vector<double> cost;
    for (const auto& v : preds) {
      for (const auto& g : gts) cost.push_back(instance_match_cost(v, g));
    }
    EXPECT_NEAR(m.total_cost, brute_force_assignment_cost(cost, 7, 4), 1e-9);

    std::vector<int> perm(preds.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<PredictionView> shuffled;
    for (int i : perm) shuffled.push_back(preds[static_cast<std::size_t>(i)]);
    const MatchResult ms = match(shuffled, gts);
    EXPECT_NEAR(ms.total_cost, m.total_cost, 1e-12);
    for (std::size_t g = 0; g < gts.size(); ++g) {
      EXPECT_EQ(perm[static_cast<std::size_t>(ms.gt_to_pred[g])], m.gt_to_pred[g]);
    }
  }
}

TEST(MatchTest, FewerPredictionsThanGt) {
  std::mt19937_64 rng(7);
  std::vector<PredictionView> preds(2);
  for (auto& v : preds) {
    v.probs = {0.25, 0.25, 0.25, 0.25};
    v.points = random_points(rng, 3);
  }
  std::vector<ElementTarget> gts;
  for (int g = 0; g < 3; ++g) gts.push_back(target(map::ElementClass::kDivider, false, random_points(rng, 3)));
  const MatchResult m = match(preds, gts);
  EXPECT_EQ(std::count(m.gt_to_pred.begin(), m.gt_to_pred.end(), -1), 1);
  for (std::size_t g = 0; g < 3; ++g) {
    if (m.gt_to_pred[g] < 0) EXPECT_TRUE(m.gt_ordering[g].empty());
  }
}

TEST(FocalLossTest, UniformLogitsMatchClosedForm) {
  const std::vector<int> targets = {0, 3, 2, 3, 1};
  const T logits = T::zeros({5, 4});
  for (double gamma : {0.0, 2.0}) {
    const double value = focal_loss(logits, std::span<const int>(targets), gamma, 0.25, 2.0).item();
    double oracle = 0.0;
    for (int t : targets) {
      const double w = t == 3 ? 0.75 : 0.25;
      oracle += w * std::pow(1.0 - 0.25, gamma) * std::log(4.0);
    }
    EXPECT_NEAR(value, oracle / 2.0, 1e-12) << gamma;
  }
  EXPECT_THROW(focal_loss(logits, std::span<const int>(targets.data(), 4), 2.0, 0.25, 1.0), std::exception);
}

TEST(One2OneTest, PerfectPredictionHasZeroGeometryTerms) {
  std::mt19937_64 rng(8);
  const auto a = random_points(rng, 5), b = random_points(rng, 5);
  const std::vector<ElementTarget> gts = {target(map::ElementClass::kDivider, false, a),
                                          target(map::ElementClass::kPedCrossing, true, b)};
  const auto pred = prediction({b, random_points(rng, 5), a}, {1, 3, 0});
  const auto t = loss_one2one_layer(pred, std::span(gts), LossConfig{});
  EXPECT_EQ(t.p2p.item(), 0.0);
  EXPECT_NEAR(t.dir.item(), 0.0, 1e-12);
  EXPECT_LT(t.cls.item(), 1e-12);
  EXPECT_EQ(t.match.gt_to_pred, (std::vector<int>{2, 0}));
}

TEST(One2OneTest, TranslationCostsL1AndKeepsDirection) {
  std::mt19937_64 rng(9);
  const auto a = random_points(rng, 6);
  std::vector<Point2> moved = a;
  for (Point2& p : moved) {
    p.x += 0.03;
    p.y -= 0.02;
  }
  const std::vector<ElementTarget> gts = {target(map::ElementClass::kBoundary, false, a)};
  LossConfig c;
  const auto t = loss_one2one_layer(prediction({moved}, {2}), std::span(gts), c);
  EXPECT_NEAR(t.p2p.item(), c.w_pts * 0.05, 1e-12);
  EXPECT_NEAR(t.dir.item(), 0.0, 1e-12);
}

TEST(One2OneTest, EdgeDirectionSkipsZeroLengthEdges) {
  const std::vector<Point2> gt = {{0.1, 0.1}, {0.1, 0.1}, {0.5, 0.1}};
  const std::vector<Point2> pr = {{0.1, 0.1}, {0.3, 0.4}, {0.5, 0.7}};
  const std::vector<ElementTarget> gts = {target(map::ElementClass::kDivider, false, gt)};
  LossConfig c;
  c.w_dir = 1.0;
  const auto t = loss_one2one_layer(prediction({pr}, {0}), std::span(gts), c);
  // Only the second edge counts: (0.2, 0.3) against (0.4, 0).
  const double cosine = 0.2 / std::hypot(0.2, 0.3);
  EXPECT_NEAR(t.dir.item(), 1.0 - cosine, 1e-9);
}

TEST(One2OneTest, GradientsMatchCentralDifferences) {
  std::mt19937_64 rng(10);
  const std::vector<ElementTarget> gts = {
      target(map::ElementClass::kDivider, false, random_points(rng, 4)),
      target(map::ElementClass::kPedCrossing, true, random_points(rng, 4))};
  std::uniform_real_distribution<double> u(0.05, 0.95), l(-1.0, 1.0);
  std::vector<double> pts(3 * 4 * 2), logits(3 * 4);
  for (double& x : pts) x = u(rng);
  for (double& x : logits) x = l(rng);
  const T p = T::parameter({3, 4, 2}, pts);
  const T lg = T::parameter({3, 4}, logits);
  LossConfig c;
  auto loss = [&]() {
    decoder::LayerPrediction<double> pred{lg, p};
    const auto t = loss_one2one_layer(pred, std::span(gts), c);
    return add(add(t.cls, t.p2p), t.dir);
  };
  EXPECT_LT(grad_check(loss, p).max_relative_error, 1e-4);
  EXPECT_LT(grad_check(loss, lg).max_relative_error, 1e-4);
}

TEST(One2ManyTest, SingleRepeatEqualsOne2One) {
  std::mt19937_64 rng(11);
  const std::vector<ElementTarget> gts = {
      target(map::ElementClass::kDivider, false, random_points(rng, 3)),
      target(map::ElementClass::kBoundary, true, random_points(rng, 3))};
  std::vector<std::vector<Point2>> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(random_points(rng, 3));
  auto pred = prediction(pts, {0, 1, 2, 3, 0});
  pred.logits = T::constant({5, 4}, std::vector<double>(20, 0.3));
  LossConfig c;
  c.K = 1;
  const auto t = loss_one2one_layer(pred, std::span(gts), c);
  const double one2one = t.cls.item() + t.p2p.item() + t.dir.item();
  EXPECT_NEAR(loss_one2many<double>({pred}, std::span(gts), c).item(), one2one, 1e-12);
  c.K = 0;
  EXPECT_THROW(loss_one2many<double>({pred}, std::span(gts), c), std::invalid_argument);
}

TEST(One2ManyTest, EmptySceneIsClassificationOnly) {
  std::mt19937_64 rng(12);
  const auto pred = prediction({random_points(rng, 3), random_points(rng, 3)}, {0, 3});
  const std::vector<ElementTarget> none;
  LossConfig c;
  const auto t = loss_one2one_layer(pred, std::span(none), c);
  EXPECT_EQ(t.p2p.item(), 0.0);
  EXPECT_EQ(t.dir.item(), 0.0);
  EXPECT_GT(t.cls.item(), 0.0);
  EXPECT_NEAR(loss_one2many<double>({pred}, std::span(none), c).item(), t.cls.item(), 1e-12);
}

TEST(One2ManyTest, EachGtMatchedAtMostKTimes) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ElementTarget> gts;
    for (int g = 0; g < 3; ++g) gts.push_back(target(static_cast<map::ElementClass>(g), false, random_points(rng, 3)));
    std::vector<std::vector<Point2>> pts;
    std::vector<int> classes;
    for (int i = 0; i < 24; ++i) {
      pts.push_back(random_points(rng, 3));
      classes.push_back(i % 4);
    }
    LossConfig c;
    c.K = 4;
    std::vector<MatchResult> matches;
    loss_one2many<double>({prediction(pts, classes)}, std::span(gts), c, &matches);
    ASSERT_EQ(matches.size(), 1u);
    ASSERT_EQ(matches[0].gt_to_pred.size(), 12u);
    std::vector<int> per_gt(3, 0);
    for (std::size_t j = 0; j < 12; ++j) {
      if (matches[0].gt_to_pred[j] >= 0) ++per_gt[j % 3];
    }
    for (int k : per_gt) EXPECT_EQ(k, 4);  // 24 predictions cover all 12 copies
  }
}

TEST(DenseLossTest, SaturatedAndUniformLogits) {
  const std::vector<double> targets = {1, 0, 0, 1, 1, 0};
  const T tg = T::constant({2, 3}, targets);
  std::vector<double> sat;
  for (double t : targets) sat.push_back(t > 0.5 ? 20.0 : -20.0);
  LossConfig c;
  EXPECT_LT(loss_dense(T::constant({2, 3}, sat), tg, static_cast<const T*>(nullptr), static_cast<const T*>(nullptr), c).item(), 1e-6);
  EXPECT_NEAR(loss_dense(T::zeros({2, 3}), tg, static_cast<const T*>(nullptr), static_cast<const T*>(nullptr), c).item(), std::log(2.0), 1e-9);
  EXPECT_THROW(loss_dense(T::zeros({3, 2}), tg, static_cast<const T*>(nullptr), static_cast<const T*>(nullptr), c), std::exception);

  // alpha_p = 0: PV inputs are not even looked at.
  const T pv_logits = T::zeros({4});
  const T pv_targets = T::zeros({5});
  EXPECT_NEAR(loss_dense(T::zeros({2, 3}), tg, &pv_logits, &pv_targets, c).item(), std::log(2.0), 1e-12);
  c.alpha_p = 0.5;
  const T pv_t = T::constant({2}, {1.0, 0.0});
  const T pv_l = T::constant({2}, {20.0, -20.0});
  EXPECT_NEAR(loss_dense(T::zeros({2, 3}), tg, &pv_l, &pv_t, c).item(), std::log(2.0), 1e-6);
  EXPECT_THROW(loss_dense(T::zeros({2, 3}), tg, &pv_logits, &pv_targets, c), std::exception);
}

TEST(DenseLossTest, MaskTargetsFollowCellOrder) {
  map::ClassMasks m;
  m.height = 2;
  m.width = 2;
  for (auto& mask : m.masks) mask.assign(4, 0);
  m.masks[1][3] = 1;  // class 1 at row 1, col 1
  const T t = mask_targets<double>(m);
  ASSERT_EQ(t.shape(), (Shape{4, 3}));
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(t.data()[i], i == 3 * 3 + 1 ? 1.0 : 0.0);
}

TEST(TotalLossTest, WeightsAndValidation) {
  LossBreakdown b{0.5, 0.25, 0.125, 2.0, 0.75, 3.0, 0.0};
  LossConfig c;
  c.beta_o = c.beta_m = c.beta_d = 0.0;
  EXPECT_EQ(total_loss(b, c), 0.0);
  c = LossConfig{};
  c.beta_o = 0.0;
  c.beta_d = 0.0;
  c.beta_m = 3.0;
  EXPECT_DOUBLE_EQ(total_loss(b, c), 6.0);
  c = LossConfig{};
  c.beta_o = 2.0;
  c.beta_m = 0.5;
  c.beta_d = 4.0;
  c.alpha_b = 1.0;
  c.alpha_p = 0.1;
  EXPECT_NEAR(total_loss(b, c), 2.0 * 0.875 + 0.5 * 2.0 + 4.0 * (0.75 + 0.3), 1e-12);
  b.dir = std::numeric_limits<double>::quiet_NaN();
  try {
    total_loss(b, c);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("dir"), std::string::npos);
  }
  LossConfig bad;
  bad.focal_alpha = 1.5;
  EXPECT_THROW(validate_config(bad), std::invalid_argument);
}

TEST(TotalLossTest, ComputeLossBreakdownRecomposes) {
  std::mt19937_64 rng(14);
  const std::vector<ElementTarget> gts = {
      target(map::ElementClass::kDivider, false, random_points(rng, 3)),
      target(map::ElementClass::kPedCrossing, true, random_points(rng, 3))};
  std::uniform_real_distribution<double> u(0.05, 0.95), l(-1.0, 1.0);
  decoder::DecoderOutput<double> out;
  for (int layer = 0; layer < 3; ++layer) {
    std::vector<double> pts(4 * 3 * 2), logits(4 * 4);
    for (double& x : pts) x = u(rng);
    for (double& x : logits) x = l(rng);
    out.layers.push_back({T::constant({4, 4}, logits), T::constant({4, 3, 2}, pts)});
    out.aux.push_back(out.layers.back());
  }
  std::vector<double> bl(8 * 3), bt(8 * 3);
  for (double& x : bl) x = l(rng);
  for (std::size_t i = 0; i < bt.size(); ++i) bt[i] = i % 5 == 0 ? 1.0 : 0.0;
  for (bool aux_layers : {true, false}) {
    LossConfig c;
    c.aux_layers = aux_layers;
    c.beta_m = 0.7;
    c.beta_d = 1.3;
    const auto r = compute_loss(out, std::span(gts), T::constant({8, 3}, bl), T::constant({8, 3}, bt), c);
    EXPECT_EQ(r.matches.size(), aux_layers ? 3u : 1u);
    EXPECT_NEAR(r.total.item(), r.breakdown.total, 1e-9);
    EXPECT_NEAR(total_loss(r.breakdown, c), r.breakdown.total, 1e-9);
    EXPECT_GT(r.breakdown.one2many, 0.0);
    EXPECT_GT(r.breakdown.bev, 0.0);
  }
}

}  // namespace
}  // namespace sgq::loss
