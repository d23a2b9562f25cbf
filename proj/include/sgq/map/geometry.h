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

#ifndef SGQ_MAP_GEOMETRY_H_
#define SGQ_MAP_GEOMETRY_H_

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "sgq/map/map_element.h"

namespace sgq::map {

// Resamples a polyline (or polygon when `closed`) to n points with equal
// spacing between consecutive points, the closing edge included for
// polygons. Open inputs keep both endpoints; closed inputs start at the
// first raw point. Because the output's own edges are equal, resampling an
// already-resampled element reproduces it. Inputs that turn by more than
// 90 degrees within one spacing may admit no equal chords in path order;
// their corners are rounded until they do, and hairpins that collapse under
// rounding get plain equal arc-length spacing. Consecutive duplicate points
// are dropped first; zero total length, fewer than 2 points, n < 2 or
// non-finite coordinates throw std::invalid_argument.
std::vector<Point2> resample_polyline(std::span<const Point2> raw, int n,
                                      bool closed);

MapElement resample_element(std::span<const Point2> raw, int n, bool closed,
                            ElementClass cls);

double polyline_length(std::span<const Point2> points, bool closed);

// Clamps every coordinate into the range.
std::vector<Point2> clip_to_range(std::span<const Point2> points,
                                  const BevRange& range);

using Ordering = std::vector<int>;

// Orderings describing the same geometric element: identity and reversal
// for open elements; every cyclic shift in both directions (2n) for closed.
std::vector<Ordering> equivalent_permutations(int n, bool closed);
std::vector<Ordering> equivalent_permutations(const MapElement& element);

std::vector<Point2> apply_ordering(std::span<const Point2> points,
                                   const Ordering& ordering);
Ordering inverse_ordering(const Ordering& ordering);

// Affine map of the range onto [0,1]^2. Out-of-range points throw.
std::vector<Point2> normalize_points(std::span<const Point2> points,
                                     const BevRange& range);
std::vector<Point2> denormalize_points(std::span<const Point2> points,
                                       const BevRange& range);

// Row r covers y from y_min upward, column c covers x from x_min.
struct GridSpec {
  int height = 64;
  int width = 32;
  BevRange range;

  double cell_width() const { return range.width() / width; }
  double cell_height() const { return range.height() / height; }
  Point2 cell_center(int row, int col) const {
    return {range.x_min + (col + 0.5) * cell_width(),
            range.y_min + (row + 0.5) * cell_height()};
  }
};

struct ClassMasks {
  int height = 0;
  int width = 0;
  std::array<std::vector<std::uint8_t>, kNumClasses> masks;

  std::uint8_t at(int cls, int row, int col) const {
    return masks[static_cast<std::size_t>(cls)]
                [static_cast<std::size_t>(row * width + col)];
  }
  std::int64_t count(int cls) const;
  bool operator==(const ClassMasks&) const = default;
};

// A cell is set iff the element's polyline (with the closing edge for
// polygons) passes within half a cell diagonal of the cell center.
ClassMasks rasterize(std::span<const MapElement> elements,
                     const GridSpec& grid);

double point_segment_distance(const Point2& p, const Point2& a,
                              const Point2& b);

}  // namespace sgq::map

#endif  // SGQ_MAP_GEOMETRY_H_
