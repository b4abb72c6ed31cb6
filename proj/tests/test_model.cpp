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

#include <map>
#include <set>

#include <catch2/catch.hpp>

#include "fixtures.hpp"
#include "tdw/tdw.hpp"

using namespace tdw;

TEST_CASE("direction domain has exactly eight values in tie-break order",
          "[model]") {
  REQUIRE(kDirections.size() == 8);
  CHECK(to_string(kDirections[0]) == "N");
  CHECK(to_string(kDirections[1]) == "NE");
  CHECK(to_string(kDirections[2]) == "E");
  CHECK(to_string(kDirections[3]) == "SE");
  CHECK(to_string(kDirections[4]) == "S");
  CHECK(to_string(kDirections[5]) == "SW");
  CHECK(to_string(kDirections[6]) == "W");
  CHECK(to_string(kDirections[7]) == "NW");

  std::set<Direction> unique(kDirections.begin(), kDirections.end());
  CHECK(unique.size() == 8);
  for (Direction d : kDirections) {
    CHECK(direction_from_string(to_string(d)) == d);
  }
  CHECK_FALSE(direction_from_string("NNE").has_value());
}

TEST_CASE("validate_trajectory accepts a continuous chain", "[model]") {
  Trajectory traj;
  traj.trajectory_id = 7;
  traj.segments = {fixtures::make_segment(0, 0, 0, 1, 0, 1, 7, 0),
                   fixtures::make_segment(1, 0, 1, 1, 1, 2, 7, 1)};
  CHECK(validate_trajectory(traj).ok());
}

TEST_CASE("validate_trajectory reports every broken junction", "[model]") {
  Trajectory traj;
  traj.trajectory_id = 7;
  traj.segments = {fixtures::make_segment(0, 0, 0, 1, 0, 1, 7, 0),
                   fixtures::make_segment(2, 0, 1, 2, 1, 2, 7, 1)};
  const auto report = validate_trajectory(traj);
  REQUIRE_FALSE(report.ok());
  REQUIRE(report.issues.size() == 1);
  CHECK(report.issues[0].index == 1);
  CHECK(report.issues[0].kind == ValidationIssue::Kind::discontinuity);

  traj.segments.push_back(fixtures::make_segment(5, 5, 9, 6, 5, 3, 7, 2));
  const auto report2 = validate_trajectory(traj);
  REQUIRE(report2.issues.size() == 3);  // junction 1, junction 2, bad time span
}

TEST_CASE("reconstructed random trajectories are always continuous",
          "[model][property]") {
  GenConfig cfg;
  cfg.seed = 7;
  cfg.n_objects = 50;
  cfg.samples_per_object = 20;
  auto trajs = reconstruct_trajectories(generate(cfg));
  REQUIRE(trajs.size() == 50);
  for (const auto& traj : trajs) {
    CHECK(validate_trajectory(traj).ok());
    // Independent junction scan, straight over the fields.
    for (std::size_t i = 1; i < traj.segments.size(); ++i) {
      CHECK(traj.segments[i - 1].end.x == traj.segments[i].start.x);
      CHECK(traj.segments[i - 1].end.y == traj.segments[i].start.y);
      CHECK(traj.segments[i - 1].end.t == traj.segments[i].start.t);
    }
  }
}

TEST_CASE("sample point invariants hold on generated data", "[model][property]") {
  GenConfig cfg;
  cfg.seed = 11;
  cfg.n_objects = 20;
  cfg.samples_per_object = 15;
  std::map<TrajectoryId, std::set<std::uint32_t>> seqs;
  std::map<TrajectoryId, double> last_t;
  for (const SamplePoint& p : generate(cfg)) {
    CHECK(seqs[p.trajectory_id].insert(p.seq).second);
    auto it = last_t.find(p.trajectory_id);
    if (it != last_t.end()) CHECK(p.t > it->second);
    last_t[p.trajectory_id] = p.t;
  }
}

TEST_CASE("segment angle is defined exactly when there is displacement",
          "[model][property]") {
  SplitMix64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.next_unit() * 10;
    const double y = rng.next_unit() * 10;
    auto moving = fixtures::make_segment(x, y, 0, x + rng.next_unit() - 0.5,
                                         y + rng.next_unit() - 0.5, 1);
    const bool displaced =
        moving.start.x != moving.end.x || moving.start.y != moving.end.y;
    CHECK(moving.angle_deg.has_value() == displaced);
    CHECK(duration(moving) > 0);
  }
  auto still = fixtures::make_segment(3, 4, 0, 3, 4, 2);
  CHECK_FALSE(still.angle_deg.has_value());
}

TEST_CASE("every in-bounds point maps to exactly one half-open cell",
          "[model][property]") {
  const GridSpec grid{0.0, 0.0, 0.25, 0.5, 8, 4};
  // Lattice stepping through every cell border and interior.
  for (int i = 0; i <= 8 * 4; ++i) {
    for (int j = 0; j <= 4 * 4; ++j) {
      const double x = i * (0.25 / 4.0);
      const double y = j * (0.5 / 4.0);
      const auto cell = grid.cell_of(x, y);
      REQUIRE(cell.has_value());
      const auto b = grid.cell_bounds(*cell);
      CHECK(x >= b.x_lo);
      CHECK(y >= b.y_lo);
      if (cell->ix < grid.nx - 1) {
        CHECK(x < b.x_hi);
      } else {
        CHECK(x <= b.x_hi);
      }
      if (cell->iy < grid.ny - 1) {
        CHECK(y < b.y_hi);
      } else {
        CHECK(y <= b.y_hi);
      }
    }
  }
  // Border points belong to the cell on their upper side.
  CHECK(grid.cell_of(0.25, 0.0) == CellId{1, 0});
  CHECK(grid.cell_of(2.0, 2.0) == CellId{7, 3});  // outer corner, last cell
  CHECK_FALSE(grid.cell_of(-0.001, 0.0).has_value());
  CHECK_FALSE(grid.cell_of(0.0, 2.001).has_value());
}

TEST_CASE("time intervals are half-open", "[model]") {
  const TimeInterval itv{1.0, 2.0};
  CHECK(itv.valid());
  CHECK(itv.overlaps(1.5, 1.6));
  CHECK(itv.overlaps(0.0, 1.1));
  CHECK_FALSE(itv.overlaps(2.0, 3.0));   // starts at the open end
  CHECK_FALSE(itv.overlaps(0.0, 1.0));   // ends at the closed start
  CHECK_FALSE(TimeInterval{2.0, 2.0}.valid());
}

TEST_CASE("fact rows satisfy their ratio invariants", "[model][property]") {
  auto ds = fixtures::seeded_dataset(21, 20, 12, 8);
  const auto& f = ds.warehouse.facts();
  std::map<SegmentId, double> per_segment;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.ratio[i] >= 0.0);
    CHECK(f.ratio[i] <= 1.0);
    per_segment[f.segment_id[i]] += f.ratio[i];
  }
  for (const auto& [seg_id, total] : per_segment) {
    CHECK(total == Approx(1.0).margin(1e-9));
  }
}
