// Copyright 2026 The tdw Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tdw/error.hpp"
#include "tdw/model.hpp"

namespace tdw {

// Heading of a segment in degrees counterclockwise from +x, normalized to
// [0, 360). A segment with zero spatial displacement has no heading.
inline std::optional<double> motion_angle(const Segment& seg) {
  const double dx = seg.end.x - seg.start.x;
  const double dy = seg.end.y - seg.start.y;
  if (dx == 0.0 && dy == 0.0) return std::nullopt;
  double deg = std::atan2(dy, dx) * (180.0 / std::numbers::pi);
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0) deg = 0.0;  // tiny negative atan2 results round up to 360
  return deg;
}

// Eight-way quantization of a motion angle. Axis angles map to the four
// cardinal directions, open quadrants to the diagonals:
//   0 -> E, (0,90) -> NE, 90 -> N, (90,180) -> NW,
//   180 -> W, (180,270) -> SW, 270 -> S, (270,360) -> SE.
inline Direction classify_direction(double angle_deg) {
  if (!(angle_deg >= 0.0 && angle_deg < 360.0)) {
    throw std::invalid_argument("classify_direction: angle outside [0, 360)");
  }
  if (angle_deg == 0.0) return Direction::E;
  if (angle_deg == 90.0) return Direction::N;
  if (angle_deg == 180.0) return Direction::W;
  if (angle_deg == 270.0) return Direction::S;
  if (angle_deg < 90.0) return Direction::NE;
  if (angle_deg < 180.0) return Direction::NW;
  if (angle_deg < 270.0) return Direction::SW;
  return Direction::SE;
}

inline std::optional<Direction> segment_direction(const Segment& seg) {
  if (!seg.angle_deg) return std::nullopt;
  return classify_direction(*seg.angle_deg);
}

// A sub-segment produced by clipping. It keeps the parent segment's total
// length and duration so that ratios stay relative to the whole segment.
struct ClippedPortion {
  Segment geometry;
  double parent_len = 0.0;
  double parent_duration = 0.0;
};

// Position along a segment at time t, by linear interpolation.
inline SpacetimePoint point_at_time(const Segment& seg, double t) {
  const double f = (t - seg.start.t) / (seg.end.t - seg.start.t);
  return {seg.start.x + f * (seg.end.x - seg.start.x),
          seg.start.y + f * (seg.end.y - seg.start.y), t};
}

// Restricts a segment to the half-open time window [t_lo, t_hi), linearly
// interpolating the cut endpoints. Returns nullopt when the window and the
// segment's time span do not overlap with positive measure.
inline std::optional<ClippedPortion> clip_to_time(const Segment& seg,
                                                  const TimeInterval& window) {
  const double lo = std::max(seg.start.t, window.t_lo);
  const double hi = std::min(seg.end.t, window.t_hi);
  if (!(hi > lo)) return std::nullopt;
  Segment out = seg;
  if (lo != seg.start.t) out.start = point_at_time(seg, lo);
  if (hi != seg.end.t) out.end = point_at_time(seg, hi);
  return ClippedPortion{out, spatial_length(seg), duration(seg)};
}

// Fraction of the parent segment's Euclidean length covered by the portion.
// Under linear motion this equals the portion's fraction of the parent's
// duration. Zero-length parents never reach this operation.
inline double segment_ratio(const ClippedPortion& portion) {
  if (!(portion.parent_len > 0.0)) {
    throw std::invalid_argument("segment_ratio: zero-length parent segment");
  }
  return spatial_length(portion.geometry) / portion.parent_len;
}

namespace detail {

inline std::string describe_point(double x, double y) {
  std::ostringstream os;
  os << "(" << x << ", " << y << ")";
  return os.str();
}

inline void require_in_grid(const Segment& seg, const GridSpec& grid) {
  auto check = [&](const SpacetimePoint& p, const char* which) {
    if (!grid.contains(p.x, p.y)) {
      std::ostringstream os;
      os << "segment " << which << " point " << describe_point(p.x, p.y)
         << " outside grid [" << grid.origin_x << ", " << grid.max_x()
         << "] x [" << grid.origin_y << ", " << grid.max_y() << "]";
      throw BoundsError(os.str());
    }
  };
  check(seg.start, "start");
  check(seg.end, "end");
}

// Cell lookup for points known to be inside the grid up to rounding noise.
inline CellId cell_of_clamped(const GridSpec& grid, double x, double y) {
  x = std::clamp(x, grid.origin_x, grid.max_x());
  y = std::clamp(y, grid.origin_y, grid.max_y());
  return *grid.cell_of(x, y);
}

}  // namespace detail

// Splits a segment into the portions falling in each grid cell it traverses.
// The segment parameter u in [0,1] is cut at every crossing of a cell border;
// each open sub-interval is assigned the cell containing its midpoint, and
// consecutive sub-intervals in the same cell are merged. The returned
// portions are ordered by time and their parameter spans partition [0,1].
// Touch-only contacts (zero parameter span) are dropped.
//
// The segment must lie inside the grid's outer bounds.
inline std::vector<std::pair<CellId, ClippedPortion>> clip_to_cell(
    const Segment& seg, const GridSpec& grid) {
  detail::require_in_grid(seg, grid);

  std::vector<std::pair<CellId, ClippedPortion>> out;
  const double len = spatial_length(seg);
  const double dur = duration(seg);
  const double dx = seg.end.x - seg.start.x;
  const double dy = seg.end.y - seg.start.y;
  const double dt = seg.end.t - seg.start.t;

  if (dx == 0.0 && dy == 0.0) {
    // A stationary object: one portion, in the cell holding the point.
    out.emplace_back(detail::cell_of_clamped(grid, seg.start.x, seg.start.y),
                     ClippedPortion{seg, len, dur});
    return out;
  }

  std::vector<double> cuts{0.0, 1.0};
  auto add_axis_cuts = [&cuts](double p0, double delta, double origin,
                               double width) {
    if (delta == 0.0) return;
    const double lo = std::min(p0, p0 + delta);
    const double hi = std::max(p0, p0 + delta);
    const auto k_lo = static_cast<std::int64_t>(std::ceil((lo - origin) / width));
    const auto k_hi = static_cast<std::int64_t>(std::floor((hi - origin) / width));
    for (auto k = k_lo; k <= k_hi; ++k) {
      const double u = (origin + static_cast<double>(k) * width - p0) / delta;
      if (u > 0.0 && u < 1.0) cuts.push_back(u);
    }
  };
  add_axis_cuts(seg.start.x, dx, grid.origin_x, grid.cell_width);
  add_axis_cuts(seg.start.y, dy, grid.origin_y, grid.cell_height);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto point_at = [&](double u) -> SpacetimePoint {
    if (u == 0.0) return seg.start;
    if (u == 1.0) return seg.end;
    return {seg.start.x + u * dx, seg.start.y + u * dy, seg.start.t + u * dt};
  };

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (!(b > a)) continue;
    const double um = 0.5 * (a + b);
    const SpacetimePoint mid = point_at(um);
    const CellId cell = detail::cell_of_clamped(grid, mid.x, mid.y);
    if (!out.empty() && out.back().first == cell) {
      out.back().second.geometry.end = point_at(b);
    } else {
      Segment piece{point_at(a), point_at(b), seg.trajectory_id, seg.sequence,
                    seg.angle_deg};
      out.emplace_back(cell, ClippedPortion{piece, len, dur});
    }
  }
  return out;
}

}  // namespace tdw
