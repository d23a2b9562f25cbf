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

#include "sgq/map/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace sgq::map {
namespace {

double dist(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Piecewise-linear path with cumulative arc length.
struct Path {
  std::vector<Point2> pts;
  std::vector<double> cum;  // cum[i] = arc length at pts[i]

  double length() const { return cum.back(); }
  std::size_t segments() const { return pts.size() - 1; }
};

Path build_path(std::span<const Point2> raw, bool closed) {
  Path path;
  for (const Point2& p : raw) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("resample: non-finite coordinate");
    }
    if (path.pts.empty() || !(path.pts.back() == p)) path.pts.push_back(p);
  }
  if (closed && path.pts.size() > 1 && path.pts.back() == path.pts.front()) {
    path.pts.pop_back();
  }
  if (closed && !path.pts.empty()) path.pts.push_back(path.pts.front());
  if (path.pts.size() < 2) {
    throw std::invalid_argument("resample: zero-length input");
  }
  path.cum.assign(path.pts.size(), 0.0);
  for (std::size_t i = 1; i < path.pts.size(); ++i) {
    path.cum[i] = path.cum[i - 1] + dist(path.pts[i - 1], path.pts[i]);
  }
  if (!(path.length() > 0.0)) {
    throw std::invalid_argument("resample: zero-length input");
  }
  return path;
}

inline constexpr int kMaxArcRounds = 64;

struct Walk {
  std::vector<Point2> points;
  double end_position = 0.0;  // arc position of the last placed point
  bool overflow = false;      // ran off the end before placing all points
};

// Places `steps` points after the start, each at Euclidean distance `s` from
// the previous one, taking the first crossing along the path.
Walk walk(const Path& path, double s, int steps) {
  Walk w;
  w.points.reserve(static_cast<std::size_t>(steps) + 1);
  w.points.push_back(path.pts[0]);
  std::size_t seg = 0;
  double u0 = 0.0;
  for (int k = 0; k < steps; ++k) {
    const Point2 c = w.points.back();
    bool placed = false;
    for (; seg < path.segments(); ++seg, u0 = 0.0) {
      const Point2& a = path.pts[seg];
      const Point2& b = path.pts[seg + 1];
      const double dx = b.x - a.x, dy = b.y - a.y;
      const double ex = a.x - c.x, ey = a.y - c.y;
      const double qa = dx * dx + dy * dy;
      const double qb = 2.0 * (dx * ex + dy * ey);
      const double qc = ex * ex + ey * ey - s * s;
      // |a + u (b - a) - c|^2 - s^2 at u = 1; the crossing lies in this
      // segment iff this is >= 0 (distance at u0 is below s).
      const double at_end = qa + qb + qc;
      if (at_end < 0.0) continue;
      const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
      double u = (-qb + std::sqrt(disc)) / (2.0 * qa);
      u = std::clamp(u, u0, 1.0);
      w.points.push_back({a.x + u * dx, a.y + u * dy});
      w.end_position = path.cum[seg] + u * (path.cum[seg + 1] - path.cum[seg]);
      u0 = u;
      placed = true;
      break;
    }
    if (!placed) {
      w.overflow = true;
      w.end_position = std::numeric_limits<double>::infinity();
      return w;
    }
  }
  return w;
}

Point2 point_at(const Path& path, double t) {
  const auto it = std::upper_bound(path.cum.begin(), path.cum.end(), t);
  std::size_t seg = it == path.cum.begin() ? 0 : static_cast<std::size_t>(it - path.cum.begin()) - 1;
  seg = std::min(seg, path.segments() - 1);
  const double len = path.cum[seg + 1] - path.cum[seg];
  const double u = len > 0.0 ? std::clamp((t - path.cum[seg]) / len, 0.0, 1.0) : 0.0;
  const Point2& a = path.pts[seg];
  const Point2& b = path.pts[seg + 1];
  return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
}

// Points at equal arc length; t runs over [0, total].
std::vector<Point2> equal_arc(const Path& path, int steps) {
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) out.push_back(point_at(path, path.length() * k / steps));
  return out;
}

}  // namespace

double polyline_length(std::span<const Point2> points, bool closed) {
  double total = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) {
    total += dist(points[i - 1], points[i]);
  }
  if (closed && points.size() > 1) total += dist(points.back(), points.front());
  return total;
}

namespace {

// Equal-chord points along the path, or nothing when no chord's walk lands
// on the end of the path.
std::optional<std::vector<Point2>> equal_chord(const Path& path, int steps) {
  const double total = path.length();
  // The last point's arc position grows with the chord length, so bisect
  // for the chord whose final step lands on the end of the path.
  double lo = 0.0;
  double hi = total / steps;
  if (walk(path, hi, steps).end_position < total) {
    // Only reachable through rounding on straight inputs.
    hi *= 1.0 + 1e-12;
  }
  for (int iter = 0; iter < 200 && hi - lo > 0.0; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (walk(path, mid, steps).end_position >= total) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  Walk w = walk(path, lo, steps);
  if (w.overflow) w = walk(path, lo * (1.0 - 1e-15), steps);
  if (w.overflow) return std::nullopt;
  w.points.resize(static_cast<std::size_t>(steps) + 1);
  if (dist(w.points.back(), path.pts.back()) > 1e-10 * total) return std::nullopt;
  for (std::size_t k = 1; k < w.points.size(); ++k) {
    if (std::abs(dist(w.points[k - 1], w.points[k]) - lo) > 1e-10 * total) return std::nullopt;
  }
  return std::move(w.points);
}

// One pass of (1/4, 1/2, 1/4) smoothing that keeps the first point and, for
// open polylines, the last.
void smooth_corners(std::vector<Point2>& pts, bool closed) {
  const std::vector<Point2> src = pts;
  const std::size_t m = src.size();
  const std::size_t last = closed ? m : m - 1;
  for (std::size_t i = 1; i < last; ++i) {
    const Point2& a = src[i - 1];
    const Point2& b = src[(i + 1) % m];
    pts[i] = {0.5 * src[i].x + 0.25 * (a.x + b.x), 0.5 * src[i].y + 0.25 * (a.y + b.y)};
  }
}

}  // namespace

std::vector<Point2> resample_polyline(std::span<const Point2> raw, int n,
                                      bool closed) {
  if (raw.size() < 2) {
    throw std::invalid_argument("resample: need at least 2 raw points");
  }
  if (n < 2) throw std::invalid_argument("resample: n must be >= 2");
  Path path = build_path(raw, closed);
  const int steps = closed ? n : n - 1;
  if (!closed && n == 2) return {path.pts.front(), path.pts.back()};

  // A turn of more than 90 degrees within one spacing can leave no chord
  // whose walk lands on the end. Such inputs are replaced by smoothed equal
  // arc-length samples until one does.
  const double total = path.length();
  std::optional<std::vector<Point2>> chord = equal_chord(path, steps);
  std::vector<Point2> first_arc;
  for (int round = 0; !chord && round < kMaxArcRounds; ++round) {
    std::vector<Point2> arc = equal_arc(path, steps);
    if (closed) arc.pop_back();
    if (round == 0) first_arc = arc;
    smooth_corners(arc, closed);
    path = build_path(arc, closed);
    if (static_cast<int>(path.pts.size()) != steps + 1) break;
    chord = equal_chord(path, steps);
    // Hairpins collapse under repeated rounding; keep only solutions that
    // retain most of the original length.
    if (chord && polyline_length(*chord, false) < 0.5 * total) chord.reset();
  }
  std::vector<Point2> out;
  if (chord) {
    out = std::move(*chord);
  } else {
    out = std::move(first_arc);
    if (closed) out.push_back(out.front());
  }
  if (closed) {
    out.pop_back();  // the final step returns to the start
  } else {
    out.back() = path.pts.back();
  }
  return out;
}

MapElement resample_element(std::span<const Point2> raw, int n, bool closed,
                            ElementClass cls) {
  MapElement e;
  e.cls = cls;
  e.closed = closed;
  e.points = resample_polyline(raw, n, closed);
  return e;
}

std::vector<Point2> clip_to_range(std::span<const Point2> points,
                                  const BevRange& range) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) {
    out.push_back({std::clamp(p.x, range.x_min, range.x_max),
                   std::clamp(p.y, range.y_min, range.y_max)});
  }
  return out;
}

std::vector<Ordering> equivalent_permutations(int n, bool closed) {
  std::vector<Ordering> out;
  if (n <= 0) return out;
  if (!closed) {
    Ordering fwd(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) fwd[static_cast<std::size_t>(i)] = i;
    Ordering rev(fwd.rbegin(), fwd.rend());
    out.push_back(std::move(fwd));
    out.push_back(std::move(rev));
    return out;
  }
  for (int shift = 0; shift < n; ++shift) {
    Ordering o(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) o[static_cast<std::size_t>(i)] = (shift + i) % n;
    out.push_back(std::move(o));
  }
  for (int shift = 0; shift < n; ++shift) {
    Ordering o(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      o[static_cast<std::size_t>(i)] = ((shift - i) % n + n) % n;
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Ordering> equivalent_permutations(const MapElement& element) {
  return equivalent_permutations(static_cast<int>(element.points.size()),
                                 element.closed);
}

std::vector<Point2> apply_ordering(std::span<const Point2> points,
                                   const Ordering& ordering) {
  if (ordering.size() != points.size()) {
    throw std::invalid_argument("apply_ordering: size mismatch");
  }
  std::vector<Point2> out;
  out.reserve(points.size());
  for (int idx : ordering) out.push_back(points[static_cast<std::size_t>(idx)]);
  return out;
}

Ordering inverse_ordering(const Ordering& ordering) {
  Ordering inv(ordering.size());
  for (std::size_t i = 0; i < ordering.size(); ++i) {
    inv[static_cast<std::size_t>(ordering[i])] = static_cast<int>(i);
  }
  return inv;
}

std::vector<Point2> normalize_points(std::span<const Point2> points,
                                     const BevRange& range) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) {
    if (!range.contains(p)) {
      throw std::invalid_argument("normalize_points: point (" +
                                  std::to_string(p.x) + ", " +
                                  std::to_string(p.y) +
                                  ") outside the BEV range");
    }
    out.push_back({(p.x - range.x_min) / range.width(),
                   (p.y - range.y_min) / range.height()});
  }
  return out;
}

std::vector<Point2> denormalize_points(std::span<const Point2> points,
                                       const BevRange& range) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) {
    out.push_back({range.x_min + p.x * range.width(),
                   range.y_min + p.y * range.height()});
  }
  return out;
}

double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  }
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

std::int64_t ClassMasks::count(int cls) const {
  std::int64_t n = 0;
  for (std::uint8_t v : masks[static_cast<std::size_t>(cls)]) n += v;
  return n;
}

ClassMasks rasterize(std::span<const MapElement> elements,
                     const GridSpec& grid) {
  ClassMasks out;
  out.height = grid.height;
  out.width = grid.width;
  for (auto& m : out.masks) {
    m.assign(static_cast<std::size_t>(grid.height * grid.width), 0);
  }
  const double cw = grid.cell_width();
  const double ch = grid.cell_height();
  const double radius = 0.5 * std::hypot(cw, ch);
  for (const MapElement& e : elements) {
    auto& mask = out.masks[static_cast<std::size_t>(e.cls)];
    const std::size_t np = e.points.size();
    if (np == 0) continue;
    const std::size_t nseg = e.closed ? np : np - 1;
    for (std::size_t s = 0; s < std::max<std::size_t>(nseg, 1); ++s) {
      const Point2& a = e.points[s % np];
      const Point2& b = e.points[(s + 1) % np];
      const double xl = std::min(a.x, b.x) - radius;
      const double xh = std::max(a.x, b.x) + radius;
      const double yl = std::min(a.y, b.y) - radius;
      const double yh = std::max(a.y, b.y) + radius;
      const int c0 = std::max(0, static_cast<int>(std::floor((xl - grid.range.x_min) / cw)));
      const int c1 = std::min(grid.width - 1, static_cast<int>(std::floor((xh - grid.range.x_min) / cw)));
      const int r0 = std::max(0, static_cast<int>(std::floor((yl - grid.range.y_min) / ch)));
      const int r1 = std::min(grid.height - 1, static_cast<int>(std::floor((yh - grid.range.y_min) / ch)));
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          if (point_segment_distance(grid.cell_center(r, c), a, b) <= radius) {
            mask[static_cast<std::size_t>(r * grid.width + c)] = 1;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace sgq::map
