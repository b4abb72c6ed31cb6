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
//
// Test-only brute-force reference computations. Everything here re-derives
// measures directly from raw trajectories by intersecting closed parameter
// intervals, deliberately avoiding the clipping and fact-table code paths it
// is used to check.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tdw/model.hpp"

namespace oracle {

struct Box {
  double x_lo = 0.0, x_hi = 0.0;
  double y_lo = 0.0, y_hi = 0.0;
  // The grid's outer max edges are closed; interior cell borders are not.
  bool x_hi_closed = false;
  bool y_hi_closed = false;
};

inline Box cell_box(const tdw::GridSpec& g, tdw::CellId c) {
  const auto b = g.cell_bounds(c);
  return {b.x_lo, b.x_hi, b.y_lo, b.y_hi, c.ix == g.nx - 1, c.iy == g.ny - 1};
}

// Merges the parameter interval where p0 + u * d lies in [lo, hi) (or
// [lo, hi] when hi_closed) into [u0, u1]. Returns false when the constraint
// is unsatisfiable.
inline bool intersect_axis(double p0, double d, double lo, double hi,
                           bool hi_closed, double& u0, double& u1) {
  if (d == 0.0) {
    return p0 >= lo && (hi_closed ? p0 <= hi : p0 < hi);
  }
  double a = (lo - p0) / d;
  double b = (hi - p0) / d;
  if (a > b) std::swap(a, b);
  u0 = std::max(u0, a);
  u1 = std::min(u1, b);
  return true;
}

// Parameter span of the segment inside box x window, or nullopt when the
// intersection has zero measure. The span length is the segment ratio.
inline std::optional<std::pair<double, double>> portion_in(
    const tdw::Segment& seg, const Box& box, const tdw::TimeInterval& win) {
  double u0 = 0.0;
  double u1 = 1.0;
  const double dt = seg.end.t - seg.start.t;
  u0 = std::max(u0, (win.t_lo - seg.start.t) / dt);
  u1 = std::min(u1, (win.t_hi - seg.start.t) / dt);
  if (!intersect_axis(seg.start.x, seg.end.x - seg.start.x, box.x_lo, box.x_hi,
                      box.x_hi_closed, u0, u1)) {
    return std::nullopt;
  }
  if (!intersect_axis(seg.start.y, seg.end.y - seg.start.y, box.y_lo, box.y_hi,
                      box.y_hi_closed, u0, u1)) {
    return std::nullopt;
  }
  if (!(u1 > u0)) return std::nullopt;
  return std::pair{u0, u1};
}

// Independent eight-way classification straight from the displacement.
inline std::optional<tdw::Direction> direction_of(const tdw::Segment& seg) {
  const double dx = seg.end.x - seg.start.x;
  const double dy = seg.end.y - seg.start.y;
  if (dx == 0.0 && dy == 0.0) return std::nullopt;
  double ang = std::atan2(dy, dx) * 57.29577951308232;
  if (ang < 0.0) ang += 360.0;
  if (ang >= 360.0) ang = 0.0;
  using D = tdw::Direction;
  if (ang == 0.0) return D::E;
  if (ang < 90.0) return D::NE;
  if (ang == 90.0) return D::N;
  if (ang < 180.0) return D::NW;
  if (ang == 180.0) return D::W;
  if (ang < 270.0) return D::SW;
  if (ang == 270.0) return D::S;
  return D::SE;
}

struct RegionMeasures {
  std::array<double, 8> contributions{};
  std::array<std::int64_t, 8> segment_counts{};
  std::int64_t undefined_segments = 0;
  std::int64_t undefined_rows = 0;  // degenerate (segment, bucket) incidences
  std::int64_t distinct_segments = 0;
  std::int64_t presence_distinct = 0;
  std::int64_t presence_sum = 0;
  std::optional<tdw::Direction> majority;
};

// Re-derives every measure for an arbitrary rectangular region directly from
// raw trajectories, without touching the warehouse.
inline RegionMeasures measures_for_box(const std::vector<tdw::Trajectory>& trajs,
                                       const Box& box,
                                       const tdw::TimeInterval& win,
                                       double bucket_width) {
  RegionMeasures m;
  std::set<tdw::TrajectoryId> present;
  for (const auto& traj : trajs) {
    for (const auto& seg : traj.segments) {
      const auto span = portion_in(seg, box, win);
      if (!span) continue;
      present.insert(traj.trajectory_id);
      ++m.distinct_segments;
      if (const auto dir = direction_of(seg)) {
        const auto idx = static_cast<std::size_t>(*dir);
        m.contributions[idx] += span->second - span->first;
        m.segment_counts[idx] += 1;
      } else {
        ++m.undefined_segments;
      }
    }
  }
  m.presence_distinct = static_cast<std::int64_t>(present.size());

  const auto b_lo = static_cast<std::int64_t>(std::floor(win.t_lo / bucket_width));
  const auto b_hi =
      static_cast<std::int64_t>(std::ceil(win.t_hi / bucket_width)) - 1;
  for (std::int64_t b = b_lo; b <= b_hi; ++b) {
    const tdw::TimeInterval bucket_win{
        std::max(win.t_lo, static_cast<double>(b) * bucket_width),
        std::min(win.t_hi, static_cast<double>(b + 1) * bucket_width)};
    if (!(bucket_win.t_hi > bucket_win.t_lo)) continue;
    std::set<tdw::TrajectoryId> in_bucket;
    for (const auto& traj : trajs) {
      for (const auto& seg : traj.segments) {
        const auto span = portion_in(seg, box, bucket_win);
        if (!span) continue;
        in_bucket.insert(traj.trajectory_id);
        if (!direction_of(seg)) ++m.undefined_rows;
      }
    }
    m.presence_sum += static_cast<std::int64_t>(in_bucket.size());
  }

  double best = 0.0;
  for (tdw::Direction d : tdw::kDirections) {
    const double v = m.contributions[static_cast<std::size_t>(d)];
    if (v > 0.0 && (!m.majority || v > best)) {
      m.majority = d;
      best = v;
    }
  }
  return m;
}

inline RegionMeasures measures_for_cell(const std::vector<tdw::Trajectory>& trajs,
                                        const tdw::GridSpec& grid,
                                        tdw::CellId cell,
                                        const tdw::TimeInterval& win,
                                        double bucket_width) {
  return measures_for_box(trajs, cell_box(grid, cell), win, bucket_width);
}

// Majority picks computed through two float paths may differ when the top
// contributions tie up to the ratio tolerance; treat that as agreement.
inline bool majority_consistent(std::optional<tdw::Direction> got,
                                std::optional<tdw::Direction> want,
                                const std::array<double, 8>& contributions,
                                double tol = 2e-9) {
  if (got == want) return true;
  if (!got || !want) return false;
  const double a = contributions[static_cast<std::size_t>(*got)];
  const double b = contributions[static_cast<std::size_t>(*want)];
  return std::abs(a - b) <= tol;
}

// Occupancy fraction per cell by midpoint sampling of the segment parameter;
// the reference for clip_to_cell. Cell assignment is written out directly.
inline std::map<std::pair<std::uint32_t, std::uint32_t>, double>
sampled_cell_occupancy(const tdw::Segment& seg, const tdw::GridSpec& grid,
                       int samples = 10000) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> occ;
  const double dx = seg.end.x - seg.start.x;
  const double dy = seg.end.y - seg.start.y;
  auto index = [](double v, double origin, double width, std::uint32_t n) {
    auto i = static_cast<std::int64_t>(std::floor((v - origin) / width));
    if (i < 0) i = 0;
    if (i >= static_cast<std::int64_t>(n)) i = static_cast<std::int64_t>(n) - 1;
    return static_cast<std::uint32_t>(i);
  };
  for (int k = 0; k < samples; ++k) {
    const double u = (k + 0.5) / samples;
    const double x = seg.start.x + u * dx;
    const double y = seg.start.y + u * dy;
    occ[{index(x, grid.origin_x, grid.cell_width, grid.nx),
         index(y, grid.origin_y, grid.cell_height, grid.ny)}] += 1.0 / samples;
  }
  return occ;
}

}  // namespace oracle
