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

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace tdw {

using TrajectoryId = std::int64_t;
using SegmentId = std::int64_t;

// One raw timestamped position sample of a moving object. Within one
// trajectory, seq values are unique and t is strictly increasing with seq.
struct SamplePoint {
  TrajectoryId trajectory_id = 0;
  std::uint32_t seq = 0;
  double t = 0.0;  // timestamp, real-valued ticks
  double x = 0.0;  // map units
  double y = 0.0;
};

// A position in space-time.
struct SpacetimePoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

// Directed line segment between two consecutive samples of one trajectory.
// The end timestamp is strictly greater than the start timestamp.
// angle_deg is the motion heading in [0, 360) degrees counterclockwise from
// the +x axis, or nullopt when the segment has zero spatial displacement.
struct Segment {
  SpacetimePoint start;
  SpacetimePoint end;
  TrajectoryId trajectory_id = 0;
  std::int32_t sequence = 0;  // order within the trajectory, 0-based
  std::optional<double> angle_deg;
};

inline double spatial_length(const Segment& s) {
  return std::hypot(s.end.x - s.start.x, s.end.y - s.start.y);
}

inline double duration(const Segment& s) { return s.end.t - s.start.t; }

// A continuous chain of segments: the end point of each segment equals the
// start point of the next in all of x, y and t.
struct Trajectory {
  TrajectoryId trajectory_id = 0;
  std::vector<Segment> segments;
};

// The eight-way compass domain. The enumeration order is also the
// deterministic tie-break order for majority decisions.
enum class Direction : std::uint8_t { N = 0, NE, E, SE, S, SW, W, NW };

inline constexpr std::size_t kDirectionCount = 8;

inline constexpr std::array<Direction, kDirectionCount> kDirections = {
    Direction::N, Direction::NE, Direction::E, Direction::SE,
    Direction::S, Direction::SW, Direction::W, Direction::NW};

constexpr std::string_view to_string(Direction d) {
  switch (d) {
    case Direction::N:  return "N";
    case Direction::NE: return "NE";
    case Direction::E:  return "E";
    case Direction::SE: return "SE";
    case Direction::S:  return "S";
    case Direction::SW: return "SW";
    case Direction::W:  return "W";
    case Direction::NW: return "NW";
  }
  return "?";
}

inline std::optional<Direction> direction_from_string(std::string_view s) {
  for (Direction d : kDirections) {
    if (s == to_string(d)) return d;
  }
  return std::nullopt;
}

// Grid cell coordinate: column ix in [0, nx), row iy in [0, ny).
struct CellId {
  std::uint32_t ix = 0;
  std::uint32_t iy = 0;
  friend auto operator<=>(const CellId&, const CellId&) = default;
};

struct CellBounds {
  double x_lo = 0.0, y_lo = 0.0;
  double x_hi = 0.0, y_hi = 0.0;
};

// Uniform rectangular grid over the map. Cell membership is half-open,
// [x_lo, x_hi) x [y_lo, y_hi), except that points on the grid's outer max
// edge belong to the last cell, so every in-bounds point maps to exactly
// one cell.
struct GridSpec {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_width = 1.0;
  double cell_height = 1.0;
  std::uint32_t nx = 1;
  std::uint32_t ny = 1;

  double max_x() const { return origin_x + cell_width * nx; }
  double max_y() const { return origin_y + cell_height * ny; }

  bool valid() const {
    return cell_width > 0.0 && cell_height > 0.0 && nx >= 1 && ny >= 1;
  }

  bool contains(double x, double y) const {
    return x >= origin_x && x <= max_x() && y >= origin_y && y <= max_y();
  }

  std::optional<CellId> cell_of(double x, double y) const {
    if (!contains(x, y)) return std::nullopt;
    auto index = [](double v, double origin, double width, std::uint32_t n) {
      auto i = static_cast<std::int64_t>(std::floor((v - origin) / width));
      if (i < 0) i = 0;
      if (i >= static_cast<std::int64_t>(n)) i = n - 1;  // outer max edge belongs to the last cell
      return static_cast<std::uint32_t>(i);
    };
    return CellId{index(x, origin_x, cell_width, nx),
                  index(y, origin_y, cell_height, ny)};
  }

  CellBounds cell_bounds(CellId c) const {
    return {origin_x + cell_width * c.ix, origin_y + cell_height * c.iy,
            origin_x + cell_width * (c.ix + 1),
            origin_y + cell_height * (c.iy + 1)};
  }
};

// Half-open time span [t_lo, t_hi).
struct TimeInterval {
  double t_lo = 0.0;
  double t_hi = 0.0;

  bool valid() const { return t_lo < t_hi; }
  bool overlaps(double a, double b) const { return a < t_hi && b > t_lo; }
};

// One clipped segment portion at the warehouse grain:
// segment x spatial cell x time bucket.
//
// ratio is the portion's fraction of the whole parent segment; the ratios of
// all rows of one segment sum to 1. Zero-displacement segments emit rows
// with ratio 0 and no direction: they mark presence but contribute nothing
// to direction measures.
struct FactRow {
  CellId cell;
  std::int64_t bucket = 0;
  TrajectoryId trajectory_id = 0;
  SegmentId segment_id = 0;
  std::optional<Direction> direction;
  double ratio = 0.0;
  double clipped_len = 0.0;  // Euclidean length of the portion
};

// Result of validate_trajectory. An issue at index i means segment i starts
// somewhere other than where segment i-1 ended (discontinuity), or segment i
// itself has a non-positive time span.
struct ValidationIssue {
  enum class Kind { discontinuity, non_increasing_time };
  std::size_t index = 0;
  Kind kind = Kind::discontinuity;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

inline ValidationReport validate_trajectory(const Trajectory& traj) {
  ValidationReport report;
  const auto& segs = traj.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (!(segs[i].end.t > segs[i].start.t)) {
      report.issues.push_back({i, ValidationIssue::Kind::non_increasing_time});
    }
    if (i > 0) {
      const auto& prev = segs[i - 1].end;
      const auto& cur = segs[i].start;
      if (prev.x != cur.x || prev.y != cur.y || prev.t != cur.t) {
        report.issues.push_back({i, ValidationIssue::Kind::discontinuity});
      }
    }
  }
  return report;
}

}  // namespace tdw
