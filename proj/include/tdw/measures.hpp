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
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "tdw/model.hpp"
#include "tdw/store.hpp"

namespace tdw {

// Per-direction accumulator: eight real-valued slots in the fixed direction
// order plus the number of undefined-direction entries. Count measures fill
// the slots with exact (integer-valued) counts, contribution measures with
// ratio sums.
struct DirectionTally {
  std::array<double, kDirectionCount> slots{};
  std::int64_t undefined = 0;

  double& operator[](Direction d) { return slots[static_cast<std::size_t>(d)]; }
  double operator[](Direction d) const {
    return slots[static_cast<std::size_t>(d)];
  }
};

// Counts whole segments with a portion inside (cell, interval), classified
// by the parent segment's direction. A segment counts at most once per cell
// no matter how many buckets it spans. The undefined slot counts distinct
// zero-displacement segments.
inline DirectionTally compute_direction_count(const Warehouse& w, CellId cell,
                                              const TimeInterval& interval) {
  std::unordered_map<SegmentId, std::int8_t> seen;
  detail::visit_cell_portions(w, cell, interval,
                              [&](const detail::PortionVisit& v) {
                                seen.emplace(v.segment_id, v.direction);
                              });
  DirectionTally tally;
  for (const auto& [seg, dir] : seen) {
    if (dir < 0) {
      ++tally.undefined;
    } else {
      tally.slots[static_cast<std::size_t>(dir)] += 1.0;
    }
  }
  return tally;
}

// Object-level variant: distinct trajectories per direction. A trajectory
// with segments in two directions counts once in each.
inline DirectionTally compute_direction_count_by_object(
    const Warehouse& w, CellId cell, const TimeInterval& interval) {
  std::map<std::pair<std::int8_t, TrajectoryId>, bool> seen;
  detail::visit_cell_portions(w, cell, interval,
                              [&](const detail::PortionVisit& v) {
                                seen.emplace(std::pair{v.direction,
                                                       v.trajectory_id},
                                             true);
                              });
  DirectionTally tally;
  for (const auto& [key, _] : seen) {
    if (key.first < 0) {
      ++tally.undefined;
    } else {
      tally.slots[static_cast<std::size_t>(key.first)] += 1.0;
    }
  }
  return tally;
}

// Single-direction projection of compute_direction_count.
inline std::int64_t heading_count(const Warehouse& w, CellId cell,
                                  const TimeInterval& interval, Direction d) {
  return static_cast<std::int64_t>(compute_direction_count(w, cell, interval)[d]);
}

// Per direction, the sum of segment ratios of the portions inside
// (cell, interval). Intervals off bucket boundaries are resolved by
// re-clipping the affected segments. The undefined slot counts
// zero-displacement rows present in the window.
inline DirectionTally direction_contributions(const Warehouse& w, CellId cell,
                                              const TimeInterval& interval) {
  DirectionTally tally;
  detail::visit_cell_portions(w, cell, interval,
                              [&](const detail::PortionVisit& v) {
                                if (v.direction < 0) {
                                  ++tally.undefined;
                                } else {
                                  tally.slots[static_cast<std::size_t>(
                                      v.direction)] += v.ratio;
                                }
                              });
  return tally;
}

// The direction with the largest summed contribution; ties break toward the
// earlier direction in the fixed enumeration order. None when no portion
// with a defined direction lies in (cell, interval).
inline std::optional<Direction> direction_majority(const Warehouse& w,
                                                   CellId cell,
                                                   const TimeInterval& interval) {
  const DirectionTally tally = direction_contributions(w, cell, interval);
  std::optional<Direction> best;
  double best_value = 0.0;
  for (Direction d : kDirections) {
    const double v = tally[d];
    if (v > 0.0 && (!best || v > best_value)) {
      best = d;
      best_value = v;
    }
  }
  return best;
}

enum class PresenceMode { distinct, sum };

// Number of objects in (cell, interval). `distinct` counts each trajectory
// once; `sum` is the summable approximation: the sum over buckets of the
// per-bucket distinct counts, which can count one object several times.
inline std::int64_t presence(const Warehouse& w, CellId cell,
                             const TimeInterval& interval,
                             PresenceMode mode = PresenceMode::distinct) {
  if (mode == PresenceMode::distinct) {
    std::unordered_set<TrajectoryId> ids;
    detail::visit_cell_portions(
        w, cell, interval,
        [&](const detail::PortionVisit& v) { ids.insert(v.trajectory_id); });
    return static_cast<std::int64_t>(ids.size());
  }
  std::map<std::int64_t, std::unordered_set<TrajectoryId>> per_bucket;
  detail::visit_cell_portions(w, cell, interval,
                              [&](const detail::PortionVisit& v) {
                                per_bucket[v.bucket].insert(v.trajectory_id);
                              });
  std::int64_t total = 0;
  for (const auto& [bucket, ids] : per_bucket) {
    total += static_cast<std::int64_t>(ids.size());
  }
  return total;
}

}  // namespace tdw
