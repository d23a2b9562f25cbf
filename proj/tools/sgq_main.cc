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

// Command-line front end: synth, train, eval, bench, render.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sgq/eval/average_precision.h"
#include "sgq/eval/bench.h"
#include "sgq/eval/config.h"
#include "sgq/eval/model.h"
#include "sgq/eval/prediction_io.h"
#include "sgq/eval/svg.h"
#include "sgq/eval/trainer.h"
#include "sgq/map/scene_io.h"
#include "sgq/synth/scene_synth.h"
#include "sgq/tensor/checkpoint.h"

namespace {

using namespace sgq;

constexpr int kUsageExit = 2;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string params_path(const std::string& dataset) { return dataset + ".params"; }
std::string config_path(const std::string& checkpoint) { return checkpoint + ".cfg"; }

synth::SynthParams dataset_params(const std::string& dataset, const std::vector<map::Scene>& scenes) {
  const std::string sidecar = params_path(dataset);
  if (std::filesystem::exists(sidecar)) return synth::parse_params(read_text(sidecar));
  synth::SynthParams p;
  if (!scenes.empty()) p.range = scenes.front().range;
  return p;
}

std::vector<eval::Sample<float>> make_samples(const std::vector<map::Scene>& scenes,
                                              const synth::SynthParams& params,
                                              const eval::RunConfig& config) {
  std::vector<eval::Sample<float>> samples;
  samples.reserve(scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    samples.push_back(eval::make_sample<float>(scenes[i], params, i, config.encoder.grid_height,
                                               config.encoder.grid_width));
  }
  return samples;
}

eval::RunConfig run_config(const std::string& path, const std::uint64_t* seed) {
  eval::RunConfig config = path.empty() ? eval::RunConfig{} : eval::load_config_file(path);
  if (seed) config.train.seed = *seed;
  eval::finalize(config);
  return config;
}

struct Common {
  std::uint64_t seed = 0;
  std::string config;
  std::string out;
  std::string csv;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vectorized map construction with scatter-and-gather queries"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--config", common.config, "key=value config file");
    sub->add_option("--out", common.out, "output path");
  };

  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic scene file");
  add_common(synth_cmd);
  int scene_count = 8;
  std::string params_file;
  synth_cmd->add_option("--count", scene_count, "number of scenes")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--params", params_file, "generator key=value file");

  CLI::App* train_cmd = app.add_subcommand("train", "train a model on a scene file");
  add_common(train_cmd);
  std::string train_data;
  int iterations = -1;
  std::string log_file;
  train_cmd->add_option("--data", train_data, "scene file")->required();
  train_cmd->add_option("--iterations", iterations, "override train.iterations");
  train_cmd->add_option("--log", log_file, "training log path (default stdout)");

  CLI::App* eval_cmd = app.add_subcommand("eval", "AP evaluation against ground truth");
  add_common(eval_cmd);
  std::string gt_file, pred_file, checkpoint_file;
  eval_cmd->add_option("--gt", gt_file, "ground-truth scene file")->required();
  auto* pred_opt = eval_cmd->add_option("--pred", pred_file, "prediction file");
  auto* ckpt_opt = eval_cmd->add_option("--checkpoint", checkpoint_file, "model checkpoint");
  pred_opt->excludes(ckpt_opt);

  CLI::App* bench_cmd = app.add_subcommand("bench", "decoder query-count scaling benchmark");
  add_common(bench_cmd);
  eval::BenchConfig bench;
  std::vector<std::string> bench_modes = {"sgq", "point_query"};
  bench_cmd->add_option("--queries", bench.queries, "instance query counts")->delimiter(',');
  bench_cmd->add_option("--points", bench.n, "points per instance");
  bench_cmd->add_option("--modes", bench_modes, "decoder modes")->delimiter(',');
  bench_cmd->add_option("--dim", bench.dim, "embedding width");
  bench_cmd->add_option("--layers", bench.layers, "decoder layers");
  bench_cmd->add_option("--heads", bench.heads, "attention heads");
  bench_cmd->add_option("--window", bench.cross_window, "cross-attention window radius, <0 dense");
  bench_cmd->add_option("--repeats", bench.repeats, "forwards per measurement");
  bench_cmd->add_option("--csv", common.csv, "also write CSV here");

  CLI::App* render_cmd = app.add_subcommand("render", "draw a scene as SVG");
  add_common(render_cmd);
  std::string render_scene, render_pred, render_id;
  int render_index = 0;
  render_cmd->add_option("--scene", render_scene, "scene file")->required();
  render_cmd->add_option("--pred", render_pred, "prediction file");
  render_cmd->add_option("--index", render_index, "scene index in the file");
  render_cmd->add_option("--id", render_id, "scene id (overrides --index)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsageExit;
  }

  try {
    if (synth_cmd->parsed()) {
      if (common.out.empty()) throw std::invalid_argument("synth: --out is required");
      synth::SynthParams params =
          params_file.empty() ? synth::SynthParams{} : synth::parse_params(read_text(params_file));
      if (synth_cmd->count("--seed")) params.seed = common.seed;
      synth::validate_params(params);
      std::vector<map::Scene> scenes;
      for (int i = 0; i < scene_count; ++i) {
        scenes.push_back(synth::synth_scene(params, static_cast<std::uint64_t>(i)));
      }
      map::write_scene_file(common.out, scenes);
      write_text(params_path(common.out), synth::format_params(params));
      std::cout << "wrote " << scenes.size() << " scenes to " << common.out << '\n';
      return 0;
    }

    if (train_cmd->parsed()) {
      if (common.out.empty()) throw std::invalid_argument("train: --out is required");
      eval::RunConfig config =
          run_config(common.config, train_cmd->count("--seed") ? &common.seed : nullptr);
      if (iterations >= 0) config.train.iterations = iterations;
      const std::vector<map::Scene> scenes = map::read_scene_file(train_data);
      const auto samples = make_samples(scenes, dataset_params(train_data, scenes), config);
      eval::MapModel<float> model(config, config.train.seed);
      std::ofstream log_stream;
      std::ostream* log = &std::cout;
      if (!log_file.empty()) {
        log_stream.open(log_file);
        if (!log_stream) throw std::runtime_error("cannot open " + log_file);
        log = &log_stream;
      }
      write_text(config_path(common.out), eval::format_config(config));
      const eval::TrainResult result = eval::train(model, samples, log, common.out);
      if (result.aborted) {
        std::cerr << "training aborted at iteration " << result.iterations_done << ": "
                  << result.error << '\n';
        return 1;
      }
      const eval::Evaluation ev = eval::evaluate_model(model, samples, scenes);
      std::cout << eval::format_ap_table(ev.map1, ev.map2);
      return 0;
    }

    if (eval_cmd->parsed()) {
      const std::vector<map::Scene> scenes = map::read_scene_file(gt_file);
      eval::EvalConfig m1 = eval::EvalConfig::map1(), m2 = eval::EvalConfig::map2();
      std::vector<eval::PredictedScene> preds;
      if (!pred_file.empty()) {
        preds = eval::read_prediction_file(pred_file);
        if (!common.config.empty()) {
          const eval::RunConfig config = run_config(common.config, nullptr);
          m1.confidence_floor = m2.confidence_floor = config.confidence_floor;
        }
      } else if (!checkpoint_file.empty()) {
        const std::string cfg = common.config.empty() ? config_path(checkpoint_file) : common.config;
        const eval::RunConfig config = run_config(cfg, nullptr);
        eval::MapModel<float> model(config, config.train.seed);
        load_checkpoint(model.parameters(), read_checkpoint(checkpoint_file));
        const auto samples = make_samples(scenes, dataset_params(gt_file, scenes), config);
        for (const auto& s : samples) preds.push_back(eval::predict(model, s));
        m1.confidence_floor = m2.confidence_floor = config.confidence_floor;
        if (!common.out.empty()) {
          std::ofstream out(common.out, std::ios::binary);
          if (!out) throw std::runtime_error("cannot open " + common.out + " for writing");
          for (std::size_t i = 0; i < preds.size(); ++i) {
            out << eval::serialize_prediction(preds[i], scenes[i].range) << '\n';
          }
        }
      } else {
        throw std::invalid_argument("eval: one of --pred or --checkpoint is required");
      }
      const eval::ApResult a1 = eval::evaluate_ap(preds, scenes, m1);
      const eval::ApResult a2 = eval::evaluate_ap(preds, scenes, m2);
      std::cout << eval::format_ap_table(a1, a2);
      return 0;
    }

    if (bench_cmd->parsed()) {
      bench.seed = common.seed;
      bench.modes.clear();
      for (const std::string& m : bench_modes) bench.modes.push_back(decoder::parse_decoder_mode(m));
      const auto records = eval::bench_decoder(bench);
      std::cout << eval::format_bench_table(records);
      if (!common.csv.empty()) write_text(common.csv, eval::bench_csv(records));
      return 0;
    }

    if (render_cmd->parsed()) {
      if (common.out.empty()) throw std::invalid_argument("render: --out is required");
      const std::vector<map::Scene> scenes = map::read_scene_file(render_scene);
      const map::Scene* scene = nullptr;
      if (!render_id.empty()) {
        for (const auto& s : scenes) {
          if (s.id == render_id) scene = &s;
        }
        if (!scene) throw std::invalid_argument("render: no scene with id " + render_id);
      } else {
        if (render_index < 0 || render_index >= static_cast<int>(scenes.size())) {
          throw std::out_of_range("render: scene index out of range");
        }
        scene = &scenes[static_cast<std::size_t>(render_index)];
      }
      std::vector<eval::PredictedScene> preds;
      const eval::PredictedScene* pred = nullptr;
      if (!render_pred.empty()) {
        preds = eval::read_prediction_file(render_pred);
        for (const auto& p : preds) {
          if (p.id == scene->id) pred = &p;
        }
        if (!pred) throw std::invalid_argument("render: no prediction for scene " + scene->id);
      }
      eval::write_svg_file(common.out, eval::render_svg(*scene, pred));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsageExit;
}
