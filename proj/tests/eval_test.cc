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
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgq/eval/average_precision.h"
#include "sgq/eval/bench.h"
#include "sgq/eval/chamfer.h"
#include "sgq/eval/config.h"
#include "sgq/eval/model.h"
#include "sgq/eval/prediction_io.h"
#include "sgq/eval/svg.h"
#include "sgq/eval/trainer.h"
#include "sgq/map/scene_io.h"
#include "sgq/synth/scene_synth.h"
#include "sgq/tensor/checkpoint.h"
#include "support/oracles.h"

namespace sgq::eval {
namespace {

using map::ElementClass;
using map::Point2;

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("sgq_eval_test_" + name);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PredictedElement as_prediction(const map::MapElement& e, double confidence) {
  PredictedElement p;
  p.cls = e.cls;
  p.confidence = confidence;
  p.class_scores[static_cast<int>(e.cls)] = confidence;
  p.points = e.points;
  p.closed = e.closed;
  return p;
}

PredictedScene perfect_prediction(const map::Scene& scene) {
  PredictedScene p;
  p.id = scene.id;
  for (const auto& e : scene.elements) p.elements.push_back(as_prediction(e, 0.9));
  return p;
}

std::vector<map::Scene> synth_scenes(int count, std::uint64_t seed) {
  synth::SynthParams params;
  params.seed = seed;
  std::vector<map::Scene> out;
  for (int i = 0; i < count; ++i) out.push_back(synth::synth_scene(params, i));
  return out;
}

map::Scene one_divider_scene() {
  map::Scene s;
  s.id = "one";
  map::MapElement e;
  e.cls = ElementClass::kDivider;
  for (int i = 0; i < 20; ++i) e.points.push_back({-5.0 + 0.5 * i, 3.0});
  s.elements.push_back(e);
  return s;
}

TEST(ChamferTest, Examples) {
  const std::vector<Point2> a = {{0, 0}, {1, 0}};
  const std::vector<Point2> b = {{0, 1}, {1, 1}};
  EXPECT_DOUBLE_EQ(chamfer_distance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(chamfer_distance(a, b), 1.0);
  const std::vector<Point2> c = {{0, 0}};
  // a->c: (0 + 1) / 2, c->a: 0.
  EXPECT_DOUBLE_EQ(chamfer_distance(a, c), 0.25);
}

TEST(ChamferTest, MatchesOracleAndIsSymmetric) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  std::uniform_int_distribution<int> len(1, 25);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> a(len(rng)), b(len(rng));
    for (auto& p : a) p = {u(rng), u(rng)};
    for (auto& p : b) p = {u(rng), u(rng)};
    const double d = chamfer_distance(a, b);
    EXPECT_NEAR(d, sgq::testing::chamfer_oracle(a, b), 1e-12);
    EXPECT_NEAR(d, chamfer_distance(b, a), 1e-12);
    EXPECT_GE(d, 0.0);
  }
}

TEST(ChamferTest, EmptyThrows) {
  const std::vector<Point2> a = {{0, 0}};
  const std::vector<Point2> none;
  EXPECT_THROW(chamfer_distance(a, none), std::invalid_argument);
  EXPECT_THROW(chamfer_distance(none, a), std::invalid_argument);
}

TEST(ApTest, InterpolatedApOnHandCurve) {
  const std::vector<PrPoint> curve = {{1.0, 0.5}, {0.5, 1.0}};
  // Levels 0..0.50 see precision 1, levels 0.51..1 see 0.5.
  EXPECT_NEAR(interpolated_ap(curve, 101), (51.0 + 25.0) / 101.0, 1e-12);
  EXPECT_DOUBLE_EQ(interpolated_ap({}, 101), 0.0);
  const std::vector<PrPoint> half = {{1.0, 0.5}};
  EXPECT_NEAR(interpolated_ap(half, 11), 6.0 / 11.0, 1e-12);
}

TEST(ApTest, PerfectPredictionsScoreOne) {
  const auto scenes = synth_scenes(8, 3);
  std::vector<PredictedScene> preds;
  for (const auto& s : scenes) preds.push_back(perfect_prediction(s));
  for (const EvalConfig& cfg : {EvalConfig::map1(), EvalConfig::map2()}) {
    const ApResult r = evaluate_ap(preds, scenes, cfg);
    for (int c = 0; c < map::kNumClasses; ++c) {
      if (r.gt_count[c] > 0) EXPECT_DOUBLE_EQ(r.class_ap[c], 1.0) << c;
    }
  }
}

TEST(ApTest, NoPredictionsScoreZero) {
  const auto scenes = synth_scenes(4, 3);
  const ApResult r = evaluate_ap(std::vector<PredictedScene>{}, scenes, EvalConfig::map2());
  EXPECT_DOUBLE_EQ(r.map, 0.0);
  for (int c = 0; c < map::kNumClasses; ++c) EXPECT_DOUBLE_EQ(r.class_ap[c], 0.0);
}

TEST(ApTest, DuplicateAfterTruePositive) {
  const map::Scene s = one_divider_scene();
  PredictedScene p;
  p.id = s.id;
  p.elements.push_back(as_prediction(s.elements[0], 0.9));
  p.elements.push_back(as_prediction(s.elements[0], 0.8));
  const std::vector<map::Scene> gts = {s};
  const std::vector<PredictedScene> preds = {p};
  const auto curve = pr_curve(preds, gts, ElementClass::kDivider, 0.5);
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_DOUBLE_EQ(curve[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(curve[0].recall, 1.0);
  EXPECT_DOUBLE_EQ(curve[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(curve[1].recall, 1.0);
  EXPECT_DOUBLE_EQ(interpolated_ap(curve), 1.0);
}

TEST(ApTest, FalsePositiveFirstHalvesPrecision) {
  const map::Scene s = one_divider_scene();
  PredictedScene p;
  p.id = s.id;
  PredictedElement far = as_prediction(s.elements[0], 0.95);
  for (auto& q : far.points) q.y += 10.0;
  p.elements.push_back(far);
  p.elements.push_back(as_prediction(s.elements[0], 0.5));
  const std::vector<map::Scene> gts = {s};
  const std::vector<PredictedScene> preds = {p};
  const auto curve = pr_curve(preds, gts, ElementClass::kDivider, 1.0);
  ASSERT_EQ(curve.size(), 2u);
  EXPECT_DOUBLE_EQ(curve[0].precision, 0.0);
  EXPECT_DOUBLE_EQ(curve[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(interpolated_ap(curve), 0.5);
}

TEST(ApTest, ConfidenceFloorDropsPredictions) {
  const map::Scene s = one_divider_scene();
  PredictedScene p;
  p.id = s.id;
  p.elements.push_back(as_prediction(s.elements[0], 0.2));
  const std::vector<map::Scene> gts = {s};
  const std::vector<PredictedScene> preds = {p};
  EXPECT_EQ(pr_curve(preds, gts, ElementClass::kDivider, 0.5, 0.3).size(), 0u);
  EXPECT_EQ(pr_curve(preds, gts, ElementClass::kDivider, 0.5, 0.1).size(), 1u);
}

TEST(ApTest, UnknownSceneThrowsAndMissingClassScoresZero) {
  const map::Scene s = one_divider_scene();
  PredictedScene p = perfect_prediction(s);
  const std::vector<map::Scene> gts = {s};
  const ApResult r = evaluate_ap(std::vector<PredictedScene>{p}, gts, EvalConfig::map2());
  EXPECT_DOUBLE_EQ(r.class_ap[0], 1.0);
  EXPECT_DOUBLE_EQ(r.class_ap[1], 0.0);
  EXPECT_DOUBLE_EQ(r.class_ap[2], 0.0);
  EXPECT_NEAR(r.map, 1.0 / 3.0, 1e-12);
  p.id = "missing";
  EXPECT_THROW(evaluate_ap(std::vector<PredictedScene>{p}, gts, EvalConfig::map2()),
               std::invalid_argument);
}

TEST(ApTest, ConfigValidation) {
  EXPECT_NO_THROW(validate_config(EvalConfig::map1()));
  EXPECT_THROW(validate_config(EvalConfig{{1.0, 0.5}, 0.0, 101}), std::invalid_argument);
  EXPECT_THROW(validate_config(EvalConfig{{-1.0}, 0.0, 101}), std::invalid_argument);
  EXPECT_THROW(validate_config(EvalConfig{{0.5}, 0.0, 1}), std::invalid_argument);
}

// Noisy copies of most GT elements, confusions and a few spurious ones.
std::vector<PredictedScene> noisy_predictions(const std::vector<map::Scene>& scenes,
                                              std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.6);
  std::vector<PredictedScene> out;
  for (const auto& s : scenes) {
    PredictedScene p;
    p.id = s.id;
    for (const auto& e : s.elements) {
      if (u(rng) < 0.35) continue;
      PredictedElement q = as_prediction(e, 0.05 + 0.9 * u(rng));
      const double dx = noise(rng), dy = noise(rng);
      for (auto& pt : q.points) pt = {pt.x + dx, pt.y + dy};
      p.elements.push_back(q);
    }
    for (int k = 0; k < 2; ++k) {
      PredictedElement q;
      q.cls = static_cast<ElementClass>(rng() % map::kNumClasses);
      q.confidence = 0.05 + 0.9 * u(rng);
      const double x0 = -14.0 + 28.0 * u(rng), y0 = -29.0 + 58.0 * u(rng);
      for (int i = 0; i < 20; ++i) q.points.push_back({x0 + 0.1 * i, y0});
      p.elements.push_back(q);
    }
    out.push_back(p);
  }
  return out;
}

TEST(ApPropertyTest, RangeAndMeanOfClasses) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto scenes = synth_scenes(6, 100 + trial);
    const auto preds = noisy_predictions(scenes, rng);
    for (const EvalConfig& cfg : {EvalConfig::map1(), EvalConfig::map2()}) {
      const ApResult r = evaluate_ap(preds, scenes, cfg);
      double mean = 0.0;
      for (int c = 0; c < map::kNumClasses; ++c) {
        ASSERT_EQ(r.ap[c].size(), cfg.thresholds.size());
        double class_mean = 0.0;
        for (double a : r.ap[c]) {
          EXPECT_GE(a, 0.0);
          EXPECT_LE(a, 1.0);
          class_mean += a / static_cast<double>(r.ap[c].size());
        }
        EXPECT_NEAR(r.class_ap[c], class_mean, 1e-12);
        mean += r.class_ap[c] / map::kNumClasses;
      }
      EXPECT_NEAR(r.map, mean, 1e-12);
      // Looser thresholds never hurt.
      for (int c = 0; c < map::kNumClasses; ++c) {
        for (std::size_t t = 1; t < r.ap[c].size(); ++t) {
          EXPECT_GE(r.ap[c][t] + 1e-12, r.ap[c][t - 1]);
        }
      }
    }
  }
}

TEST(ApPropertyTest, AddingTruePositiveForMissedGtNeverLowersAp) {
  std::mt19937_64 rng(23);
  const double widest = EvalConfig::map2().thresholds.back();
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto scenes = synth_scenes(5, 300 + trial);
    auto preds = noisy_predictions(scenes, rng);
    // A GT no prediction of its class comes within the widest threshold of.
    for (std::size_t si = 0; si < scenes.size(); ++si) {
      for (const auto& g : scenes[si].elements) {
        bool reachable = false;
        for (const auto& p : preds[si].elements) {
          if (p.cls == g.cls && chamfer_distance(p.points, g.points) < widest) reachable = true;
        }
        if (reachable) continue;
        for (const EvalConfig& cfg : {EvalConfig::map1(), EvalConfig::map2()}) {
          const ApResult before = evaluate_ap(preds, scenes, cfg);
          auto more = preds;
          more[si].elements.push_back(as_prediction(g, 1.0));
          const ApResult after = evaluate_ap(more, scenes, cfg);
          const int c = static_cast<int>(g.cls);
          for (std::size_t t = 0; t < cfg.thresholds.size(); ++t) {
            EXPECT_GE(after.ap[c][t] + 1e-12, before.ap[c][t]);
          }
          EXPECT_GT(after.class_ap[c], before.class_ap[c]);
        }
        ++checked;
        break;
      }
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(ApTest, TableFormat) {
  const auto scenes = synth_scenes(2, 3);
  std::vector<PredictedScene> preds;
  for (const auto& s : scenes) preds.push_back(perfect_prediction(s));
  const std::string table = format_ap_table(evaluate_ap(preds, scenes, EvalConfig::map1()),
                                            evaluate_ap(preds, scenes, EvalConfig::map2()));
  EXPECT_NE(table.find("AP_div"), std::string::npos);
  EXPECT_NE(table.find("mAP1"), std::string::npos);
  EXPECT_NE(table.find("mAP2"), std::string::npos);
}

TEST(PredictionIoTest, RoundTrip) {
  const auto scenes = synth_scenes(3, 9);
  std::mt19937_64 rng(2);
  const auto preds = noisy_predictions(scenes, rng);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const PredictedScene back = parse_prediction(serialize_prediction(preds[i], scenes[i].range));
    ASSERT_EQ(back.id, preds[i].id);
    ASSERT_EQ(back.elements.size(), preds[i].elements.size());
    for (std::size_t k = 0; k < back.elements.size(); ++k) {
      const auto& a = back.elements[k];
      const auto& b = preds[i].elements[k];
      EXPECT_EQ(a.cls, b.cls);
      EXPECT_EQ(a.closed, b.closed);
      EXPECT_DOUBLE_EQ(a.confidence, b.confidence);
      EXPECT_EQ(a.class_scores, b.class_scores);
      EXPECT_EQ(a.points, b.points);
    }
  }
  const fs::path path = temp_path("preds.jsonl");
  write_prediction_file(path.string(), preds, scenes[0].range);
  const auto read = read_prediction_file(path.string());
  ASSERT_EQ(read.size(), preds.size());
  EXPECT_EQ(read[2].elements.size(), preds[2].elements.size());
  fs::remove(path);
}

TEST(PredictionIoTest, SceneFileIsAPredictionFile) {
  const map::Scene s = one_divider_scene();
  const PredictedScene p = parse_prediction(map::serialize_scene(s));
  ASSERT_EQ(p.elements.size(), 1u);
  EXPECT_DOUBLE_EQ(p.elements[0].confidence, 1.0);
  EXPECT_DOUBLE_EQ(p.elements[0].class_scores[0], 1.0);
  EXPECT_DOUBLE_EQ(p.elements[0].class_scores[1], 0.0);
}

TEST(PredictionIoTest, ErrorsNameFileAndLine) {
  const fs::path path = temp_path("bad.jsonl");
  {
    std::ofstream out(path);
    out << map::serialize_scene(one_divider_scene()) << "\n{not json\n";
  }
  try {
    read_prediction_file(path.string());
    FAIL() << "expected an error";
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find(path.string() + ":2:"), std::string::npos) << e.what();
  }
  fs::remove(path);
  PredictedScene p = perfect_prediction(one_divider_scene());
  auto j = nlohmann::json::parse(serialize_prediction(p, map::BevRange{}));
  EXPECT_NO_THROW(parse_prediction(j.dump()));
  j["elements"][0]["confidence"] = 2.0;
  EXPECT_THROW(parse_prediction(j.dump()), std::invalid_argument);
  j["elements"][0]["confidence"] = 0.5;
  j["elements"][0]["class"] = "tree";
  EXPECT_THROW(parse_prediction(j.dump()), std::invalid_argument);
}

TEST(ConfigTest, FormatRoundTrips) {
  RunConfig c;
  c.encoder.grid_height = 16;
  c.encoder.grid_width = 8;
  c.decoder.num_queries = 12;
  c.decoder.layers = 3;
  c.loss.w_pts = 2.5;
  c.train.lr = 1e-3;
  c.train.schedule = LrSchedule::kCosine;
  c.confidence_floor = 0.1;
  finalize(c);
  RunConfig back;
  apply_config(back, parse_key_values(format_config(c)));
  finalize(back);
  EXPECT_EQ(format_config(back), format_config(c));
}

TEST(ConfigTest, Errors) {
  RunConfig c;
  EXPECT_THROW(apply_config(c, {{"decoder.bogus", "1"}}), std::invalid_argument);
  try {
    apply_config(c, {{"decoder.N", "many"}});
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("decoder.N"), std::string::npos);
  }
  EXPECT_THROW(parse_key_values("a = 1\nnovalue\n"), std::invalid_argument);
  const auto kv = parse_key_values("# comment\n a = 1 # trailing\n\nb=two\n");
  EXPECT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv.at("a"), "1");
  EXPECT_EQ(kv.at("b"), "two");
  RunConfig bad;
  bad.train.lr = 0.0;
  EXPECT_THROW(finalize(bad), std::invalid_argument);
}

TEST(ConfigTest, OverfitPresetLoads) {
  const RunConfig c = load_config_file(SGQ_SOURCE_DIR "/configs/overfit.cfg");
  EXPECT_EQ(c.decoder.mode, decoder::DecoderMode::kSgq);
  EXPECT_EQ(c.decoder.bev_height, c.encoder.grid_height);
}

TEST(SvgTest, BalancedTagsAndTitle) {
  const auto scenes = synth_scenes(2, 4);
  const PredictedScene p = perfect_prediction(scenes[0]);
  for (const std::string svg : {render_svg(scenes[0]), render_svg(scenes[0], &p)}) {
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("<title>" + scenes[0].id + "</title>"), std::string::npos);
    int depth = 0;
    for (std::size_t i = svg.find('<'); i != std::string::npos; i = svg.find('<', i + 1)) {
      const std::size_t end = svg.find('>', i);
      ASSERT_NE(end, std::string::npos);
      const std::string tag = svg.substr(i, end - i + 1);
      if (tag.rfind("<?", 0) == 0 || tag.rfind("<!", 0) == 0) continue;
      if (tag.rfind("</", 0) == 0) {
        --depth;
      } else if (tag[tag.size() - 2] != '/') {
        ++depth;
      }
      ASSERT_GE(depth, 0);
    }
    EXPECT_EQ(depth, 0);
  }
}

TEST(SvgTest, PredictionsOnlyAddTheirGroup) {
  const auto scenes = synth_scenes(1, 4);
  const std::string gt_only = render_svg(scenes[0]);
  EXPECT_EQ(gt_only.find("id=\"predictions\""), std::string::npos);
  const PredictedScene p = perfect_prediction(scenes[0]);
  std::string both = render_svg(scenes[0], &p);
  const std::size_t group = both.find("<g id=\"predictions\"");
  ASSERT_NE(group, std::string::npos);
  const std::size_t start = both.rfind('\n', group) + 1;
  const std::size_t end = both.find("</g>", group);
  ASSERT_NE(end, std::string::npos);
  std::size_t stop = end + 4;
  if (stop < both.size() && both[stop] == '\n') ++stop;
  both.erase(start, stop - start);
  EXPECT_EQ(both, gt_only);
}

TEST(SvgTest, EmptySceneRenders) {
  map::Scene s;
  s.id = "a<b";
  const std::string svg = render_svg(s);
  EXPECT_NE(svg.find("a&lt;b"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(BenchTest, CountsAreDeterministic) {
  BenchConfig cfg;
  cfg.queries = {4, 8};
  cfg.n = 5;
  cfg.dim = 16;
  cfg.layers = 1;
  cfg.heads = 2;
  cfg.ffn_dim = 16;
  cfg.bev_height = 8;
  cfg.bev_width = 4;
  const auto a = bench_decoder(cfg);
  const auto b = bench_decoder(cfg);
  ASSERT_EQ(a.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].self_scores, b[i].self_scores);
    EXPECT_EQ(a[i].cross_scores, b[i].cross_scores);
    EXPECT_EQ(a[i].peak_bytes, b[i].peak_bytes);
  }
  for (const auto& r : a) {
    const std::int64_t len = r.mode == decoder::DecoderMode::kSgq ? r.num_queries
                                                                   : r.num_queries * r.n;
    EXPECT_EQ(r.self_scores, cfg.heads * len * len);
  }
  EXPECT_NE(format_bench_table(a).find("point"), std::string::npos);
  const std::string csv = bench_csv(a);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

RunConfig tiny_config() {
  RunConfig c;
  c.encoder.grid_height = 8;
  c.encoder.grid_width = 4;
  c.encoder.layers = 1;
  c.decoder.num_queries = 4;
  c.decoder.dim = 16;
  c.decoder.layers = 1;
  c.decoder.heads = 2;
  c.decoder.ffn_dim = 16;
  c.train.iterations = 3;
  c.train.lr = 1e-3;
  c.train.seed = 11;
  finalize(c);
  return c;
}

std::vector<Sample<float>> tiny_samples(const RunConfig& c, std::vector<map::Scene>* scenes) {
  synth::SynthParams params;
  params.image_width = 32;
  params.image_height = 16;
  params.seed = 8;
  std::vector<Sample<float>> out;
  for (int i = 0; i < 2; ++i) {
    scenes->push_back(synth::synth_scene(params, i));
    out.push_back(make_sample<float>(scenes->back(), params, i, c.encoder.grid_height,
                                     c.encoder.grid_width));
  }
  return out;
}

TEST(TrainerTest, ScheduledLr) {
  TrainConfig t;
  t.lr = 1.0;
  t.iterations = 11;
  EXPECT_DOUBLE_EQ(scheduled_lr(t, 7), 1.0);
  t.schedule = LrSchedule::kCosine;
  EXPECT_NEAR(scheduled_lr(t, 0), 1.0, 1e-12);
  EXPECT_NEAR(scheduled_lr(t, 10), 0.05, 1e-12);
  EXPECT_NEAR(scheduled_lr(t, 5), 0.525, 1e-12);
  for (int i = 1; i < 11; ++i) EXPECT_LT(scheduled_lr(t, i), scheduled_lr(t, i - 1));
}

TEST(TrainerTest, ZeroIterationsSavesInitialParameters) {
  RunConfig c = tiny_config();
  c.train.iterations = 0;
  std::vector<map::Scene> scenes;
  const auto samples = tiny_samples(c, &scenes);
  MapModel<float> model(c, c.train.seed);
  const fs::path path = temp_path("zero.ckpt");
  const TrainResult r = train(model, samples, nullptr, path.string());
  EXPECT_EQ(r.iterations_done, 0);
  EXPECT_FALSE(r.aborted);
  EXPECT_EQ(read_checkpoint(path.string()), checkpoint_entries(model.parameters()));
  MapModel<float> fresh(c, c.train.seed);
  EXPECT_EQ(read_checkpoint(path.string()), checkpoint_entries(fresh.parameters()));
  fs::remove(path);
}

TEST(TrainerTest, SameSeedSameLogAndCheckpointReloads) {
  const RunConfig c = tiny_config();
  std::vector<map::Scene> scenes;
  const auto samples = tiny_samples(c, &scenes);
  std::ostringstream log_a, log_b;
  MapModel<float> a(c, c.train.seed), b(c, c.train.seed);
  const fs::path path = temp_path("same.ckpt");
  const TrainResult ra = train(a, samples, &log_a, path.string());
  const TrainResult rb = train(b, samples, &log_b);
  EXPECT_FALSE(ra.aborted);
  EXPECT_EQ(ra.iterations_done, 3);
  ASSERT_EQ(ra.log.size(), 3u);
  EXPECT_EQ(log_a.str(), log_b.str());
  EXPECT_FALSE(log_a.str().empty());
  for (const auto& e : ra.log) EXPECT_TRUE(std::isfinite(e.loss.total));
  EXPECT_EQ(checkpoint_entries(a.parameters()), checkpoint_entries(b.parameters()));

  MapModel<float> fresh(c, 999);
  EXPECT_NE(checkpoint_entries(fresh.parameters()), checkpoint_entries(a.parameters()));
  load_checkpoint(fresh.parameters(), read_checkpoint(path.string()));
  const PredictedScene pa = predict(a, samples[0]);
  const PredictedScene pf = predict(fresh, samples[0]);
  ASSERT_EQ(pa.elements.size(), pf.elements.size());
  for (std::size_t i = 0; i < pa.elements.size(); ++i) {
    EXPECT_EQ(pa.elements[i].points, pf.elements[i].points);
  }
  const Evaluation ev = evaluate_model(a, samples, scenes);
  EXPECT_EQ(ev.predictions.size(), samples.size());
  EXPECT_GE(ev.map2.map, 0.0);
  fs::remove(path);
}

TEST(TrainerTest, NonFiniteParameterAborts) {
  const RunConfig c = tiny_config();
  std::vector<map::Scene> scenes;
  const auto samples = tiny_samples(c, &scenes);
  MapModel<float> model(c, c.train.seed);
  auto& entries = model.parameters().entries();
  entries.back().second.mutable_data()[0] = std::numeric_limits<float>::quiet_NaN();
  std::ostringstream log;
  const TrainResult r = train(model, samples, &log);
  EXPECT_TRUE(r.aborted);
  EXPECT_EQ(r.iterations_done, 0);
  EXPECT_FALSE(r.error.empty());
  EXPECT_NE(log.str().find("abort"), std::string::npos);
}

TEST(TrainerTest, NoSamplesThrows) {
  const RunConfig c = tiny_config();
  MapModel<float> model(c, 1);
  EXPECT_THROW(train(model, {}), std::invalid_argument);
}

// The command-line front end, run as a subprocess.
int run_cli(const std::string& args, const fs::path& stdout_path) {
  const std::string cmd = std::string("\"") + SGQ_CLI_PATH + "\" " + args + " > \"" +
                          stdout_path.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliTest, UsageErrorsExitTwo) {
  const fs::path out = temp_path("cli_usage.txt");
  EXPECT_EQ(run_cli("", out), 2);
  EXPECT_EQ(run_cli("synth --nope 3", out), 2);
  EXPECT_EQ(run_cli("frobnicate", out), 2);
  EXPECT_EQ(run_cli("--help", out), 0);
  fs::remove(out);
}

TEST(CliTest, SynthIsReproducibleAndEvalScoresGroundTruthOne) {
  const fs::path a = temp_path("cli_a.jsonl"), b = temp_path("cli_b.jsonl");
  const fs::path out = temp_path("cli_out.txt");
  ASSERT_EQ(run_cli("synth --count 4 --seed 7 --out \"" + a.string() + "\"", out), 0);
  EXPECT_NE(slurp(out).find("wrote 4 scenes"), std::string::npos);
  ASSERT_EQ(run_cli("synth --count 4 --seed 7 --out \"" + b.string() + "\"", out), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(slurp(a).empty());

  ASSERT_EQ(run_cli("eval --gt \"" + a.string() + "\" --pred \"" + a.string() + "\"", out), 0);
  const std::string table = slurp(out);
  EXPECT_NE(table.find("mAP1"), std::string::npos);
  for (const char* row : {"mAP1", "mAP2"}) {
    const std::size_t at = table.find(std::string(row) + " ");
    ASSERT_NE(at, std::string::npos);
    const std::string line = table.substr(at, table.find('\n', at) - at);
    EXPECT_NE(line.find("1.000"), std::string::npos) << line;
  }
  EXPECT_EQ(run_cli("eval --gt \"" + a.string() + "\"", out), 1);
  const fs::path svg = temp_path("cli.svg");
  EXPECT_EQ(run_cli("render --scene \"" + a.string() + "\" --out \"" + svg.string() + "\"", out), 0);
  EXPECT_EQ(slurp(svg).rfind("<?xml", 0), 0u);
  for (const auto& p : {a, b, out, svg}) fs::remove(p);
  fs::remove(fs::path(a.string() + ".params"));
  fs::remove(fs::path(b.string() + ".params"));
}

}  // namespace
}  // namespace sgq::eval
