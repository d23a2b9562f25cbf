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

#include "sgq/eval/svg.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sgq::eval {
namespace {

const char* class_color(map::ElementClass c) {
  switch (c) {
    case map::ElementClass::kDivider: return "#f28c28";
    case map::ElementClass::kPedCrossing: return "#1f6fd1";
    case map::ElementClass::kBoundary: return "#2ca02c";
  }
  return "#000000";
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v + 0.0);
  return buf;
}

struct Frame {
  map::BevRange range;
  SvgOptions opt;
  double px(double x) const { return opt.margin + (x - range.x_min) * opt.pixels_per_meter; }
  double py(double y) const { return opt.margin + (range.y_max - y) * opt.pixels_per_meter; }
  double plot_w() const { return range.width() * opt.pixels_per_meter; }
  double plot_h() const { return range.height() * opt.pixels_per_meter; }
};

void polyline(std::ostream& os, const Frame& f, const std::vector<map::Point2>& pts,
              bool closed, map::ElementClass cls, bool dashed) {
  if (pts.empty()) return;
  os << "    <" << (closed ? "polygon" : "polyline") << " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) os << ' ';
    os << num(f.px(pts[i].x)) << ',' << num(f.py(pts[i].y));
  }
  os << "\" fill=\"none\" stroke=\"" << class_color(cls) << "\" stroke-width=\""
     << (dashed ? "1.5" : "2") << '"';
  if (dashed) os << " stroke-dasharray=\"5,3\"";
  os << "/>\n";
}

double tick_step(double extent) {
  if (extent <= 20.0) return 2.0;
  if (extent <= 60.0) return 5.0;
  return 10.0;
}

void axes(std::ostream& os, const Frame& f) {
  os << "  <g id=\"axes\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "    <rect x=\"" << num(f.px(f.range.x_min)) << "\" y=\"" << num(f.py(f.range.y_max))
     << "\" width=\"" << num(f.plot_w()) << "\" height=\"" << num(f.plot_h())
     << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  const double bottom = f.py(f.range.y_min);
  const double left = f.px(f.range.x_min);
  const double sx = tick_step(f.range.width());
  for (double x = std::ceil(f.range.x_min / sx) * sx; x <= f.range.x_max + 1e-9; x += sx) {
    os << "    <line x1=\"" << num(f.px(x)) << "\" y1=\"" << num(bottom) << "\" x2=\""
       << num(f.px(x)) << "\" y2=\"" << num(bottom + 4) << "\" stroke=\"#444444\"/>\n";
    os << "    <text x=\"" << num(f.px(x)) << "\" y=\"" << num(bottom + 15)
       << "\" text-anchor=\"middle\">" << label(x)
       << "</text>\n";
  }
  const double sy = tick_step(f.range.height());
  for (double y = std::ceil(f.range.y_min / sy) * sy; y <= f.range.y_max + 1e-9; y += sy) {
    os << "    <line x1=\"" << num(left - 4) << "\" y1=\"" << num(f.py(y)) << "\" x2=\""
       << num(left) << "\" y2=\"" << num(f.py(y)) << "\" stroke=\"#444444\"/>\n";
    os << "    <text x=\"" << num(left - 6) << "\" y=\"" << num(f.py(y) + 3)
       << "\" text-anchor=\"end\">" << label(y)
       << "</text>\n";
  }
  os << "    <text x=\"" << num(left + f.plot_w() / 2) << "\" y=\"" << num(bottom + 32)
     << "\" text-anchor=\"middle\">x (m)</text>\n";
  os << "    <text x=\"" << num(14.0) << "\" y=\"" << num(f.py(f.range.y_min) - f.plot_h() / 2)
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
     << num(f.py(f.range.y_min) - f.plot_h() / 2) << ")\">y (m)</text>\n";
  os << "  </g>\n";
}

void legend(std::ostream& os, const Frame& f) {
  const double x0 = f.px(f.range.x_max) + 16;
  double y = f.py(f.range.y_max) + 10;
  os << "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int c = 0; c < map::kNumClasses; ++c) {
    const auto cls = static_cast<map::ElementClass>(c);
    os << "    <line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0 + 24)
       << "\" y2=\"" << num(y) << "\" stroke=\"" << class_color(cls)
       << "\" stroke-width=\"2\"/>\n";
    os << "    <text x=\"" << num(x0 + 30) << "\" y=\"" << num(y + 4) << "\">"
       << map::class_name(cls) << "</text>\n";
    y += 18;
  }
  y += 6;
  os << "    <line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0 + 24)
     << "\" y2=\"" << num(y) << "\" stroke=\"#444444\" stroke-width=\"2\"/>\n";
  os << "    <text x=\"" << num(x0 + 30) << "\" y=\"" << num(y + 4) << "\">ground truth</text>\n";
  y += 18;
  os << "    <line x1=\"" << num(x0) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0 + 24)
     << "\" y2=\"" << num(y)
     << "\" stroke=\"#444444\" stroke-width=\"1.5\" stroke-dasharray=\"5,3\"/>\n";
  os << "    <text x=\"" << num(x0 + 30) << "\" y=\"" << num(y + 4) << "\">prediction</text>\n";
  os << "  </g>\n";
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const map::Scene& scene, const PredictedScene* predictions,
                       const SvgOptions& options) {
  if (options.pixels_per_meter <= 0.0) {
    throw std::invalid_argument("render_svg: pixels_per_meter must be positive");
  }
  const Frame f{scene.range, options};
  const double width = 2 * options.margin + f.plot_w() + options.legend_width;
  const double height = 2 * options.margin + f.plot_h();
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
     << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\">\n";
  os << "  <title>" << escape(scene.id) << "</title>\n";
  os << "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  axes(os, f);
  legend(os, f);
  os << "  <g id=\"ground-truth\">\n";
  for (const map::MapElement& e : scene.elements) polyline(os, f, e.points, e.closed, e.cls, false);
  os << "  </g>\n";
  if (predictions) {
    os << "  <g id=\"predictions\">\n";
    for (const PredictedElement& e : predictions->elements) {
      polyline(os, f, e.points, e.closed, e.cls, true);
    }
    os << "  </g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_svg_file(const std::string& path, const std::string& svg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << svg;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sgq::eval
