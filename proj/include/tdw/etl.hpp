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
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tdw/error.hpp"
#include "tdw/geometry.hpp"
#include "tdw/model.hpp"

namespace tdw {

enum class RejectPolicy { fail_fast, skip_and_report };

struct EtlConfig {
  GridSpec grid;
  double bucket_width = 1.0;  // ticks per time bucket
  RejectPolicy reject_policy = RejectPolicy::fail_fast;
};

// Counters accumulated across the load pipeline; serialized as the JSON
// load report by the CLI.
struct LoadReport {
  std::uint64_t input_points = 0;
  std::uint64_t rejected_records = 0;      // malformed or duplicate CSV lines
  std::uint64_t dropped_trajectories = 0;  // single-point or bad timestamps
  std::uint64_t out_of_bounds_segments = 0;
  std::uint64_t trajectories = 0;
  std::uint64_t segments = 0;
  std::uint64_t degenerate_segments = 0;  // zero spatial displacement
  std::uint64_t fact_rows = 0;
};

// Time bucket b covers [b * width, (b + 1) * width).
inline std::int64_t bucket_of(double t, double bucket_width) {
  return static_cast<std::int64_t>(std::floor(t / bucket_width));
}

inline TimeInterval bucket_span(std::int64_t bucket, double bucket_width) {
  return {static_cast<double>(bucket) * bucket_width,
          static_cast<double>(bucket + 1) * bucket_width};
}

namespace detail {

inline constexpr std::string_view kCsvHeader = "id,seq,t,x,y";

inline std::string_view trim_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && !field.empty();
}

inline bool split_fields(std::string_view line,
                         std::array<std::string_view, 5>& fields) {
  std::size_t n = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      if (n == 5) return false;
      fields[n++] = line.substr(start, i - start);
      start = i + 1;
    }
  }
  return n == 5;
}

}  // namespace detail

// Parses the documented CSV format: a required "id,seq,t,x,y" header, then
// one "trajectory_id,seq,t,x,y" record per line. Malformed records and
// duplicate (trajectory_id, seq) pairs either abort with a ParseError
// carrying the physical line number (fail_fast) or are dropped and counted
// (skip_and_report).
inline std::vector<SamplePoint> parse_points(std::istream& in,
                                             RejectPolicy policy,
                                             LoadReport* report = nullptr) {
  std::vector<SamplePoint> points;
  std::unordered_map<TrajectoryId, std::unordered_set<std::uint32_t>> seen;
  std::string raw;
  std::size_t line_no = 0;

  auto reject = [&](const std::string& why) {
    if (policy == RejectPolicy::fail_fast) throw ParseError(line_no, why);
    if (report) ++report->rejected_records;
  };

  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim_cr(raw);
    if (!have_header) {
      if (line != detail::kCsvHeader) {
        throw ParseError(line_no, "expected header \"" +
                                      std::string(detail::kCsvHeader) + "\"");
      }
      have_header = true;
      continue;
    }
    if (line.empty()) {
      reject("empty record");
      continue;
    }
    std::array<std::string_view, 5> f;
    if (!detail::split_fields(line, f)) {
      reject("expected 5 comma-separated fields");
      continue;
    }
    SamplePoint p;
    if (!detail::parse_number(f[0], p.trajectory_id)) {
      reject("bad trajectory id \"" + std::string(f[0]) + "\"");
      continue;
    }
    if (!detail::parse_number(f[1], p.seq)) {
      reject("bad sequence number \"" + std::string(f[1]) + "\"");
      continue;
    }
    if (!detail::parse_number(f[2], p.t) || !detail::parse_number(f[3], p.x) ||
        !detail::parse_number(f[4], p.y)) {
      reject("non-numeric field");
      continue;
    }
    if (!seen[p.trajectory_id].insert(p.seq).second) {
      reject("duplicate (trajectory_id, seq) = (" +
             std::to_string(p.trajectory_id) + ", " + std::to_string(p.seq) +
             ")");
      continue;
    }
    points.push_back(p);
  }
  if (!have_header) {
    throw ParseError(1, "expected header \"" + std::string(detail::kCsvHeader) +
                            "\"");
  }
  if (report) report->input_points = points.size();
  return points;
}

// Writes sample points in the exact CSV format parse_points reads. Doubles
// are emitted as their shortest round-trip representation.
inline void write_csv(std::ostream& out, std::span<const SamplePoint> points) {
  out << detail::kCsvHeader << '\n';
  char buf[64];
  auto fmt = [&buf](double v) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string_view(buf, static_cast<std::size_t>(ptr - buf));
  };
  for (const SamplePoint& p : points) {
    out << p.trajectory_id << ',' << p.seq << ',' << fmt(p.t);
    out << ',' << fmt(p.x);
    out << ',' << fmt(p.y) << '\n';
  }
}

// Rebuilds trajectories from sample points: per trajectory, points are
// ordered by seq and every consecutive pair becomes one segment with its
// motion angle filled in. Trajectories are returned ordered by id.
// Single-point trajectories cannot form a segment and are dropped with a
// report entry. Non-increasing timestamps abort (fail_fast) or drop the
// whole trajectory (skip_and_report).
inline std::vector<Trajectory> reconstruct_trajectories(
    std::vector<SamplePoint> points, RejectPolicy policy = RejectPolicy::fail_fast,
    LoadReport* report = nullptr) {
  std::map<TrajectoryId, std::vector<SamplePoint>> groups;
  for (SamplePoint& p : points) groups[p.trajectory_id].push_back(p);

  std::vector<Trajectory> out;
  for (auto& [id, pts] : groups) {
    std::sort(pts.begin(), pts.end(),
              [](const SamplePoint& a, const SamplePoint& b) {
                return a.seq < b.seq;
              });
    if (pts.size() < 2) {
      if (report) ++report->dropped_trajectories;
      continue;
    }
    bool bad_time = false;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      if (!(pts[i + 1].t > pts[i].t)) {
        if (policy == RejectPolicy::fail_fast) {
          throw Error("trajectory " + std::to_string(id) +
                      ": non-increasing timestamp at seq " +
                      std::to_string(pts[i + 1].seq));
        }
        bad_time = true;
        break;
      }
    }
    if (bad_time) {
      if (report) ++report->dropped_trajectories;
      continue;
    }

    Trajectory traj;
    traj.trajectory_id = id;
    traj.segments.reserve(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      Segment seg;
      seg.start = {pts[i].x, pts[i].y, pts[i].t};
      seg.end = {pts[i + 1].x, pts[i + 1].y, pts[i + 1].t};
      seg.trajectory_id = id;
      seg.sequence = static_cast<std::int32_t>(i);
      seg.angle_deg = motion_angle(seg);
      traj.segments.push_back(seg);
    }
    out.push_back(std::move(traj));
  }
  if (report) report->trajectories = out.size();
  return out;
}

// The fact rows plus the segment dimension they reference. Segment ids are
// assigned sequentially in emission order (trajectories by id, segments by
// sequence), so identical input yields identical ids.
struct FactBuild {
  std::vector<FactRow> rows;
  std::vector<Segment> segment_dim;  // indexed by SegmentId
};

// Clips every segment to time buckets, then to grid cells, and emits one
// FactRow per (segment, cell, bucket) portion. Ratios are relative to the
// whole parent segment, so each in-bounds segment's rows sum to 1.
// Zero-displacement segments emit presence-only rows with ratio 0.
inline FactBuild build_facts(const std::vector<Trajectory>& trajs,
                             const EtlConfig& cfg,
                             LoadReport* report = nullptr) {
  if (!cfg.grid.valid()) throw std::invalid_argument("invalid grid spec");
  if (!(cfg.bucket_width > 0.0)) {
    throw std::invalid_argument("bucket_width must be > 0");
  }

  std::vector<const Trajectory*> ordered;
  ordered.reserve(trajs.size());
  for (const Trajectory& t : trajs) ordered.push_back(&t);
  std::sort(ordered.begin(), ordered.end(),
            [](const Trajectory* a, const Trajectory* b) {
              return a->trajectory_id < b->trajectory_id;
            });

  FactBuild fb;
  const double w = cfg.bucket_width;
  for (const Trajectory* traj : ordered) {
    for (const Segment& seg : traj->segments) {
      const auto seg_id = static_cast<SegmentId>(fb.segment_dim.size());
      fb.segment_dim.push_back(seg);
      if (report) ++report->segments;

      if (!cfg.grid.contains(seg.start.x, seg.start.y) ||
          !cfg.grid.contains(seg.end.x, seg.end.y)) {
        if (cfg.reject_policy == RejectPolicy::fail_fast) {
          detail::require_in_grid(seg, cfg.grid);  // throws BoundsError
        }
        if (report) ++report->out_of_bounds_segments;
        continue;
      }

      const bool degenerate = !seg.angle_deg.has_value();
      if (degenerate && report) ++report->degenerate_segments;
      const double seg_len = spatial_length(seg);
      const std::optional<Direction> dir = segment_direction(seg);

      for (std::int64_t b = bucket_of(seg.start.t, w);
           static_cast<double>(b) * w < seg.end.t; ++b) {
        const auto portion = clip_to_time(seg, bucket_span(b, w));
        if (!portion) continue;
        if (degenerate) {
          fb.rows.push_back({*cfg.grid.cell_of(seg.start.x, seg.start.y), b,
                             seg.trajectory_id, seg_id, std::nullopt, 0.0,
                             0.0});
          continue;
        }
        for (const auto& [cell, piece] : clip_to_cell(portion->geometry, cfg.grid)) {
          const double piece_len = spatial_length(piece.geometry);
          fb.rows.push_back({cell, b, seg.trajectory_id, seg_id, dir,
                             piece_len / seg_len, piece_len});
        }
      }
    }
  }
  if (report) report->fact_rows = fb.rows.size();
  return fb;
}

// Convenience driver: parse, reconstruct, build.
inline FactBuild run_etl(std::istream& csv, const EtlConfig& cfg,
                         LoadReport* report = nullptr) {
  auto points = parse_points(csv, cfg.reject_policy, report);
  auto trajs =
      reconstruct_trajectories(std::move(points), cfg.reject_policy, report);
  return build_facts(trajs, cfg, report);
}

}  // namespace tdw
