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

#include <utility>
#include <vector>

#include "tdw/tdw.hpp"

namespace fixtures {

inline tdw::Segment make_segment(double x0, double y0, double t0, double x1,
                                 double y1, double t1,
                                 tdw::TrajectoryId id = 0,
                                 std::int32_t sequence = 0) {
  tdw::Segment s;
  s.start = {x0, y0, t0};
  s.end = {x1, y1, t1};
  s.trajectory_id = id;
  s.sequence = sequence;
  s.angle_deg = tdw::motion_angle(s);
  return s;
}

// Four single-segment trajectories in one 5x5 cell: three heading NE, one SW.
inline std::vector<tdw::SamplePoint> example1_points() {
  return {
      {1, 0, 0.0, 1.0, 1.0},  {1, 1, 1.0, 2.0, 2.0},    // NE, 45 deg
      {2, 0, 0.0, 2.0, 1.0},  {2, 1, 1.0, 3.0, 1.5},    // NE
      {3, 0, 0.0, 0.5, 2.0},  {3, 1, 1.0, 1.5, 2.5},    // NE
      {4, 0, 0.0, 4.0, 4.0},  {4, 1, 1.0, 3.0, 3.0},    // SW, 225 deg
  };
}

inline tdw::GridSpec example1_grid() { return {0.0, 0.0, 5.0, 5.0, 1, 1}; }

// One trajectory of three segments; the time coordinate equals x, so the
// window [1.8, 3.8) cuts the first and last segments.
inline std::vector<tdw::SamplePoint> example2_points() {
  return {
      {1, 0, 1.5, 1.5, 1.5},
      {1, 1, 2.0, 2.0, 2.0},
      {1, 2, 3.6, 3.6, 1.5},
      {1, 3, 4.5, 4.5, 2.0},
  };
}

inline tdw::GridSpec example2_grid() { return {0.0, 0.0, 6.0, 6.0, 1, 1}; }

inline tdw::TimeInterval example2_window() { return {1.8, 3.8}; }

struct Dataset {
  std::vector<tdw::SamplePoint> points;
  std::vector<tdw::Trajectory> trajectories;
  tdw::Warehouse warehouse;
};

inline Dataset build_dataset(std::vector<tdw::SamplePoint> points,
                             const tdw::GridSpec& grid, double bucket_width) {
  auto trajs = tdw::reconstruct_trajectories(points);
  auto build = tdw::build_facts(trajs, {grid, bucket_width});
  tdw::Warehouse w(grid, bucket_width, std::move(build.rows),
                   std::move(build.segment_dim));
  return {std::move(points), std::move(trajs), std::move(w)};
}

inline Dataset example1_dataset() {
  return build_dataset(example1_points(), example1_grid(), 1.0);
}

inline Dataset example2_dataset() {
  return build_dataset(example2_points(), example2_grid(), 1.0);
}

// Seeded random-walk dataset over a square grid of unit cells.
inline Dataset seeded_dataset(std::uint64_t seed, std::uint32_t objects,
                              std::uint32_t samples, std::uint32_t grid_n,
                              double bucket_width = 1.0) {
  tdw::GenConfig cfg;
  cfg.seed = seed;
  cfg.n_objects = objects;
  cfg.samples_per_object = samples;
  cfg.x_max = cfg.y_max = static_cast<double>(grid_n);
  tdw::GridSpec grid{0.0, 0.0, 1.0, 1.0, grid_n, grid_n};
  return build_dataset(tdw::generate(cfg), grid, bucket_width);
}

}  // namespace fixtures
