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

#include "sgq/eval/config.h"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace sgq::eval {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int to_int(const std::string& v) {
  std::size_t pos = 0;
  const int r = std::stoi(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not an integer");
  return r;
}

double to_double(const std::string& v) {
  std::size_t pos = 0;
  const double r = std::stod(v, &pos);
  if (pos != v.size()) throw std::invalid_argument("not a number");
  return r;
}

bool to_switch(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("expected on or off");
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"bev.height", [](RunConfig& c, const std::string& v) { c.encoder.grid_height = to_int(v); }},
      {"bev.width", [](RunConfig& c, const std::string& v) { c.encoder.grid_width = to_int(v); }},
      {"encoder.mode", [](RunConfig& c, const std::string& v) { c.encoder.mode = bev::parse_mode(v); }},
      {"encoder.layers", [](RunConfig& c, const std::string& v) { c.encoder.layers = to_int(v); }},
      {"encoder.kernel", [](RunConfig& c, const std::string& v) { c.encoder.kernel = to_int(v); }},
      {"encoder.heights", [](RunConfig& c, const std::string& v) { c.encoder.heights = to_list(v); }},
      {"encoder.clamp", [](RunConfig& c, const std::string& v) { c.encoder.clamp = to_double(v); }},
      {"decoder.mode", [](RunConfig& c, const std::string& v) { c.decoder.mode = decoder::parse_decoder_mode(v); }},
      {"decoder.N", [](RunConfig& c, const std::string& v) { c.decoder.num_queries = to_int(v); }},
      {"decoder.n", [](RunConfig& c, const std::string& v) { c.decoder.num_points = to_int(v); }},
      {"decoder.D", [](RunConfig& c, const std::string& v) { c.decoder.dim = to_int(v); }},
      {"decoder.layers", [](RunConfig& c, const std::string& v) { c.decoder.layers = to_int(v); }},
      {"decoder.heads", [](RunConfig& c, const std::string& v) { c.decoder.heads = to_int(v); }},
      {"decoder.ffn", [](RunConfig& c, const std::string& v) { c.decoder.ffn_dim = to_int(v); }},
      {"decoder.cross_window", [](RunConfig& c, const std::string& v) { c.decoder.cross_window = to_int(v); }},
      {"decoder.instance_pe", [](RunConfig& c, const std::string& v) { c.decoder.instance_pe = decoder::parse_instance_pe(v); }},
      {"decoder.aux_queries", [](RunConfig& c, const std::string& v) { c.decoder.aux_queries = to_int(v); }},
      {"decoder.temperature", [](RunConfig& c, const std::string& v) { c.decoder.pe_temperature = to_double(v); }},
      {"loss.beta_o", [](RunConfig& c, const std::string& v) { c.loss.beta_o = to_double(v); }},
      {"loss.beta_m", [](RunConfig& c, const std::string& v) { c.loss.beta_m = to_double(v); }},
      {"loss.beta_d", [](RunConfig& c, const std::string& v) { c.loss.beta_d = to_double(v); }},
      {"loss.alpha_b", [](RunConfig& c, const std::string& v) { c.loss.alpha_b = to_double(v); }},
      {"loss.alpha_p", [](RunConfig& c, const std::string& v) { c.loss.alpha_p = to_double(v); }},
      {"loss.K", [](RunConfig& c, const std::string& v) { c.loss.K = to_int(v); }},
      {"loss.lambda_cls", [](RunConfig& c, const std::string& v) { c.loss.match.lambda_cls = to_double(v); }},
      {"loss.lambda_pts", [](RunConfig& c, const std::string& v) { c.loss.match.lambda_pts = to_double(v); }},
      {"loss.focal_gamma", [](RunConfig& c, const std::string& v) { c.loss.focal_gamma = to_double(v); }},
      {"loss.focal_alpha", [](RunConfig& c, const std::string& v) { c.loss.focal_alpha = to_double(v); }},
      {"loss.aux_layers", [](RunConfig& c, const std::string& v) { c.loss.aux_layers = to_switch(v); }},
      {"loss.w_cls", [](RunConfig& c, const std::string& v) { c.loss.w_cls = to_double(v); }},
      {"loss.w_pts", [](RunConfig& c, const std::string& v) { c.loss.w_pts = to_double(v); }},
      {"loss.w_dir", [](RunConfig& c, const std::string& v) { c.loss.w_dir = to_double(v); }},
      {"train.iterations", [](RunConfig& c, const std::string& v) { c.train.iterations = to_int(v); }},
      {"train.lr", [](RunConfig& c, const std::string& v) { c.train.lr = to_double(v); }},
      {"train.weight_decay", [](RunConfig& c, const std::string& v) { c.train.weight_decay = to_double(v); }},
      {"train.clip", [](RunConfig& c, const std::string& v) { c.train.clip = to_double(v); }},
      {"train.seed", [](RunConfig& c, const std::string& v) { c.train.seed = std::stoull(v); }},
      {"train.log_every", [](RunConfig& c, const std::string& v) { c.train.log_every = to_int(v); }},
      {"train.checkpoint_every", [](RunConfig& c, const std::string& v) { c.train.checkpoint_every = to_int(v); }},
      {"train.lr_schedule", [](RunConfig& c, const std::string& v) {
         if (v == "constant") c.train.schedule = LrSchedule::kConstant;
         else if (v == "cosine") c.train.schedule = LrSchedule::kCosine;
         else throw std::invalid_argument("expected constant or cosine");
       }},
      {"eval.confidence_floor", [](RunConfig& c, const std::string& v) { c.confidence_floor = to_double(v); }},
  };
  return table;
}

}  // namespace

void finalize(RunConfig& c) {
  c.decoder.bev_height = c.encoder.grid_height;
  c.decoder.bev_width = c.encoder.grid_width;
  c.encoder.dim = c.decoder.dim;
  bev::validate_config(c.encoder);
  decoder::validate_config(c.decoder);
  loss::validate_config(c.loss);
  if (c.train.iterations < 0) throw std::invalid_argument("train.iterations must be >= 0");
  if (!(c.train.lr > 0.0)) throw std::invalid_argument("train.lr must be positive");
  if (c.train.log_every < 1) throw std::invalid_argument("train.log_every must be >= 1");
  if (c.train.checkpoint_every < 0) throw std::invalid_argument("train.checkpoint_every must be >= 0");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": empty key or value");
    }
    out[key] = value;
  }
  return out;
}

void apply_config(RunConfig& config, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("unknown config key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("config key '" + key + "' = '" + value + "': " + e.what());
    }
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig c;
  try {
    apply_config(c, parse_key_values(ss.str()));
    finalize(c);
  } catch (const std::exception& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return c;
}

std::string format_config(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "bev.height=" << c.encoder.grid_height << "\nbev.width=" << c.encoder.grid_width
     << "\nencoder.mode=" << bev::mode_name(c.encoder.mode)
     << "\nencoder.layers=" << c.encoder.layers << "\nencoder.kernel=" << c.encoder.kernel
     << "\nencoder.heights=";
  for (std::size_t i = 0; i < c.encoder.heights.size(); ++i) {
    os << (i ? "," : "") << c.encoder.heights[i];
  }
  os << "\nencoder.clamp=" << c.encoder.clamp
     << "\ndecoder.mode=" << decoder::mode_name(c.decoder.mode)
     << "\ndecoder.N=" << c.decoder.num_queries << "\ndecoder.n=" << c.decoder.num_points
     << "\ndecoder.D=" << c.decoder.dim << "\ndecoder.layers=" << c.decoder.layers
     << "\ndecoder.heads=" << c.decoder.heads << "\ndecoder.ffn=" << c.decoder.ffn_dim
     << "\ndecoder.cross_window=" << c.decoder.cross_window
     << "\ndecoder.instance_pe=" << decoder::instance_pe_name(c.decoder.instance_pe)
     << "\ndecoder.aux_queries=" << c.decoder.aux_queries
     << "\ndecoder.temperature=" << c.decoder.pe_temperature
     << "\nloss.beta_o=" << c.loss.beta_o << "\nloss.beta_m=" << c.loss.beta_m
     << "\nloss.beta_d=" << c.loss.beta_d << "\nloss.alpha_b=" << c.loss.alpha_b
     << "\nloss.alpha_p=" << c.loss.alpha_p << "\nloss.K=" << c.loss.K
     << "\nloss.lambda_cls=" << c.loss.match.lambda_cls
     << "\nloss.lambda_pts=" << c.loss.match.lambda_pts
     << "\nloss.focal_gamma=" << c.loss.focal_gamma << "\nloss.focal_alpha=" << c.loss.focal_alpha
     << "\nloss.aux_layers=" << (c.loss.aux_layers ? "on" : "off")
     << "\nloss.w_cls=" << c.loss.w_cls << "\nloss.w_pts=" << c.loss.w_pts
     << "\nloss.w_dir=" << c.loss.w_dir
     << "\ntrain.iterations=" << c.train.iterations << "\ntrain.lr=" << c.train.lr
     << "\ntrain.weight_decay=" << c.train.weight_decay << "\ntrain.clip=" << c.train.clip
     << "\ntrain.seed=" << c.train.seed << "\ntrain.log_every=" << c.train.log_every
     << "\ntrain.checkpoint_every=" << c.train.checkpoint_every
     << "\ntrain.lr_schedule=" << (c.train.schedule == LrSchedule::kCosine ? "cosine" : "constant")
     << "\neval.confidence_floor=" << c.confidence_floor << '\n';
  return os.str();
}

int thread_count() {
  const char* env = std::getenv("SGQ_THREADS");
  if (env == nullptr) return 1;
  try {
    return std::max(1, std::stoi(env));
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace sgq::eval
