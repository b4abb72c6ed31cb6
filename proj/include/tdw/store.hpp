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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string_view>
#include <tuple>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tdw/error.hpp"
#include "tdw/etl.hpp"
#include "tdw/geometry.hpp"
#include "tdw/model.hpp"

namespace tdw {

// CRC-32C (Castagnoli), reflected polynomial 0x82F63B78. Used as the
// warehouse file trailer checksum.
inline std::uint32_t crc32c(const std::uint8_t* data, std::size_t n,
                            std::uint32_t crc = 0) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) {
        c = (c & 1) ? (0x82F63B78u ^ (c >> 1)) : (c >> 1);
      }
      t[i] = c;
    }
    return t;
  }();
  crc = ~crc;
  for (std::size_t i = 0; i < n; ++i) {
    crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  }
  return ~crc;
}

// FNV-1a over raw bytes; records load provenance in the warehouse header.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

struct WarehouseMeta {
  std::uint64_t source_hash = 0;  // FNV-1a of the input CSV bytes
  std::uint64_t input_points = 0;
  std::uint64_t trajectories = 0;
  std::uint64_t rejected_records = 0;
};

// Column-oriented fact storage; one entry per FactRow, all vectors the same
// length, sorted by (cell ix, cell iy, bucket, segment id).
struct FactColumns {
  std::vector<std::uint32_t> cell_ix;
  std::vector<std::uint32_t> cell_iy;
  std::vector<std::int64_t> bucket;
  std::vector<TrajectoryId> trajectory_id;
  std::vector<SegmentId> segment_id;
  std::vector<std::int8_t> direction;  // Direction index, -1 = undefined
  std::vector<double> ratio;
  std::vector<double> clipped_len;

  std::size_t size() const { return bucket.size(); }
};

inline std::int8_t direction_code(std::optional<Direction> d) {
  return d ? static_cast<std::int8_t>(*d) : std::int8_t{-1};
}

inline std::optional<Direction> direction_from_code(std::int8_t code) {
  if (code < 0) return std::nullopt;
  return static_cast<Direction>(code);
}

// The star-schema store: the fact columns plus the segment dimension,
// immutable after construction. Any number of readers may scan concurrently.
class Warehouse {
 public:
  Warehouse(GridSpec grid, double bucket_width, std::vector<FactRow> rows,
            std::vector<Segment> segment_dim, WarehouseMeta meta = {})
      : grid_(grid),
        bucket_width_(bucket_width),
        segment_dim_(std::move(segment_dim)),
        meta_(meta) {
    if (!grid_.valid()) throw IntegrityError("invalid grid spec");
    if (!(bucket_width_ > 0.0)) throw IntegrityError("invalid bucket width");

    std::sort(rows.begin(), rows.end(), [](const FactRow& a, const FactRow& b) {
      return std::tie(a.cell.ix, a.cell.iy, a.bucket, a.segment_id) <
             std::tie(b.cell.ix, b.cell.iy, b.bucket, b.segment_id);
    });

    facts_.cell_ix.reserve(rows.size());
    facts_.cell_iy.reserve(rows.size());
    facts_.bucket.reserve(rows.size());
    facts_.trajectory_id.reserve(rows.size());
    facts_.segment_id.reserve(rows.size());
    facts_.direction.reserve(rows.size());
    facts_.ratio.reserve(rows.size());
    facts_.clipped_len.reserve(rows.size());
    for (const FactRow& r : rows) {
      if (r.cell.ix >= grid_.nx || r.cell.iy >= grid_.ny) {
        throw IntegrityError("fact row cell outside grid");
      }
      if (r.segment_id < 0 ||
          static_cast<std::size_t>(r.segment_id) >= segment_dim_.size()) {
        throw IntegrityError("fact row references unknown segment");
      }
      facts_.cell_ix.push_back(r.cell.ix);
      facts_.cell_iy.push_back(r.cell.iy);
      facts_.bucket.push_back(r.bucket);
      facts_.trajectory_id.push_back(r.trajectory_id);
      facts_.segment_id.push_back(r.segment_id);
      facts_.direction.push_back(direction_code(r.direction));
      facts_.ratio.push_back(r.ratio);
      facts_.clipped_len.push_back(r.clipped_len);
    }
    build_index();
  }

  const GridSpec& grid() const { return grid_; }
  double bucket_width() const { return bucket_width_; }
  const FactColumns& facts() const { return facts_; }
  const std::vector<Segment>& segment_dim() const { return segment_dim_; }
  const WarehouseMeta& meta() const { return meta_; }
  std::size_t row_count() const { return facts_.size(); }

  // Row range [first, last) of one cell; empty when the cell has no facts.
  std::pair<std::size_t, std::size_t> cell_span(CellId cell) const {
    auto it = index_.find(cell);
    if (it == index_.end()) return {0, 0};
    return it->second;
  }

  // Loaded time extent [min bucket start, max bucket end); nullopt if empty.
  std::optional<TimeInterval> time_range() const {
    if (facts_.size() == 0) return std::nullopt;
    const auto [lo, hi] =
        std::minmax_element(facts_.bucket.begin(), facts_.bucket.end());
    return TimeInterval{static_cast<double>(*lo) * bucket_width_,
                        static_cast<double>(*hi + 1) * bucket_width_};
  }

 private:
  void build_index() {
    for (std::size_t i = 0; i < facts_.size();) {
      const CellId cell{facts_.cell_ix[i], facts_.cell_iy[i]};
      std::size_t j = i;
      while (j < facts_.size() && facts_.cell_ix[j] == cell.ix &&
             facts_.cell_iy[j] == cell.iy) {
        ++j;
      }
      index_.emplace(cell, std::make_pair(i, j));
      i = j;
    }
  }

  GridSpec grid_;
  double bucket_width_ = 1.0;
  FactColumns facts_;
  std::vector<Segment> segment_dim_;
  WarehouseMeta meta_;
  std::map<CellId, std::pair<std::size_t, std::size_t>> index_;
};

namespace detail {

inline bool near_integer(double q) {
  return std::abs(q - std::round(q)) <= 1e-9;
}

// First and last bucket intersecting [t_lo, t_hi), snapping endpoints that
// sit within 1e-9 bucket units of a boundary.
inline std::pair<std::int64_t, std::int64_t> bucket_cover(
    const TimeInterval& itv, double bucket_width) {
  const double q_lo = itv.t_lo / bucket_width;
  const double q_hi = itv.t_hi / bucket_width;
  const auto b_lo = static_cast<std::int64_t>(
      near_integer(q_lo) ? std::round(q_lo) : std::floor(q_lo));
  const auto b_hi = static_cast<std::int64_t>(
      (near_integer(q_hi) ? std::round(q_hi) : std::ceil(q_hi)) - 1);
  return {b_lo, b_hi};
}

// One effective fact-row portion inside a query window.
struct PortionVisit {
  std::int64_t bucket = 0;
  SegmentId segment_id = 0;
  TrajectoryId trajectory_id = 0;
  std::int8_t direction = -1;
  double ratio = 0.0;
  double clipped_len = 0.0;
};

// Visits every fact row of `cell` intersecting the interval. Rows in fully
// covered buckets are reported as stored; rows in partially covered buckets
// are re-clipped through the geometry operations and reported with their
// ratio inside the window, or skipped when nothing of them remains.
template <typename Fn>
void visit_cell_portions(const Warehouse& w, CellId cell,
                         const TimeInterval& itv, Fn&& fn) {
  if (!(itv.t_hi > itv.t_lo)) return;
  const double bw = w.bucket_width();
  const auto [b_lo, b_hi] = bucket_cover(itv, bw);
  if (b_hi < b_lo) return;

  const auto [first, last] = w.cell_span(cell);
  const auto& f = w.facts();
  const auto begin = f.bucket.begin() + static_cast<std::ptrdiff_t>(first);
  const auto end = f.bucket.begin() + static_cast<std::ptrdiff_t>(last);
  const auto row_lo = std::lower_bound(begin, end, b_lo) - f.bucket.begin();
  const auto row_hi = std::upper_bound(begin, end, b_hi) - f.bucket.begin();

  const double q_lo = itv.t_lo / bw;
  const double q_hi = itv.t_hi / bw;
  for (auto i = static_cast<std::size_t>(row_lo);
       i < static_cast<std::size_t>(row_hi); ++i) {
    const std::int64_t b = f.bucket[i];
    const bool full = static_cast<double>(b) >= q_lo - 1e-9 &&
                      static_cast<double>(b + 1) <= q_hi + 1e-9;
    if (full) {
      fn(PortionVisit{b, f.segment_id[i], f.trajectory_id[i], f.direction[i],
                      f.ratio[i], f.clipped_len[i]});
      continue;
    }
    const TimeInterval window{
        std::max(itv.t_lo, static_cast<double>(b) * bw),
        std::min(itv.t_hi, static_cast<double>(b + 1) * bw)};
    const Segment& seg =
        w.segment_dim()[static_cast<std::size_t>(f.segment_id[i])];
    const auto clipped = clip_to_time(seg, window);
    if (!clipped) continue;
    if (!seg.angle_deg) {
      // Stationary segment: presence only.
      fn(PortionVisit{b, f.segment_id[i], f.trajectory_id[i], -1, 0.0, 0.0});
      continue;
    }
    const double seg_len = spatial_length(seg);
    for (const auto& [piece_cell, piece] :
         clip_to_cell(clipped->geometry, w.grid())) {
      if (piece_cell != cell) continue;
      const double len = spatial_length(piece.geometry);
      // The ratio stays relative to the whole parent segment, not to the
      // time-clipped piece handed to the cell clipper.
      fn(PortionVisit{b, f.segment_id[i], f.trajectory_id[i], f.direction[i],
                      len / seg_len, len});
      break;
    }
  }
}

}  // namespace detail

// Which key fields scan groups on. Ungrouped fields are aggregated over.
struct GroupBy {
  bool cell = false;
  bool bucket = false;
  bool direction = false;
};

struct QuerySpec {
  CellId cell_min;
  CellId cell_max;  // inclusive rectangle
  TimeInterval interval;
  // When false, the interval must align to bucket boundaries. When true,
  // partially covered buckets are resolved by re-clipping the affected
  // segments at query time.
  bool exact = false;
  GroupBy group_by;
};

struct GroupKey {
  std::optional<CellId> cell;
  std::optional<std::int64_t> bucket;
  std::optional<std::int8_t> direction;  // Direction index, -1 = undefined
};

struct GroupResult {
  GroupKey key;
  std::array<double, kDirectionCount> ratio_by_direction{};
  std::int64_t distinct_trajectories = 0;
  std::int64_t row_count = 0;
};

inline bool interval_aligned(const TimeInterval& itv, double bucket_width) {
  return detail::near_integer(itv.t_lo / bucket_width) &&
         detail::near_integer(itv.t_hi / bucket_width);
}

// Grouped aggregation over a cell rectangle and time interval: per group,
// the summed ratio per direction, the distinct trajectory count, and the
// number of contributing fact rows. Results are ordered by group key.
inline std::vector<GroupResult> scan(const Warehouse& w, const QuerySpec& q) {
  if (q.cell_min.ix > q.cell_max.ix || q.cell_min.iy > q.cell_max.iy) {
    throw std::invalid_argument("scan: empty cell rectangle");
  }
  if (q.cell_max.ix >= w.grid().nx || q.cell_max.iy >= w.grid().ny) {
    throw std::invalid_argument("scan: cell rectangle outside grid");
  }
  if (!q.exact && !interval_aligned(q.interval, w.bucket_width())) {
    throw AlignmentError(
        "query interval does not align to bucket boundaries; use an exact "
        "query to re-clip");
  }

  struct Agg {
    std::array<double, kDirectionCount> ratio{};
    std::unordered_set<TrajectoryId> trajectories;
    std::int64_t rows = 0;
  };
  using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, int>;
  std::map<Key, Agg> groups;

  for (std::uint32_t iy = q.cell_min.iy; iy <= q.cell_max.iy; ++iy) {
    for (std::uint32_t ix = q.cell_min.ix; ix <= q.cell_max.ix; ++ix) {
      const CellId cell{ix, iy};
      detail::visit_cell_portions(
          w, cell, q.interval, [&](const detail::PortionVisit& v) {
            Key key{q.group_by.cell ? static_cast<std::int64_t>(ix) : -1,
                    q.group_by.cell ? static_cast<std::int64_t>(iy) : -1,
                    q.group_by.bucket ? v.bucket
                                      : std::numeric_limits<std::int64_t>::min(),
                    q.group_by.direction ? v.direction : -2};
            Agg& agg = groups[key];
            if (v.direction >= 0) {
              agg.ratio[static_cast<std::size_t>(v.direction)] += v.ratio;
            }
            agg.trajectories.insert(v.trajectory_id);
            ++agg.rows;
          });
    }
  }

  std::vector<GroupResult> out;
  out.reserve(groups.size());
  for (const auto& [key, agg] : groups) {
    GroupResult r;
    if (q.group_by.cell) {
      r.key.cell = CellId{static_cast<std::uint32_t>(std::get<0>(key)),
                          static_cast<std::uint32_t>(std::get<1>(key))};
    }
    if (q.group_by.bucket) r.key.bucket = std::get<2>(key);
    if (q.group_by.direction) {
      r.key.direction = static_cast<std::int8_t>(std::get<3>(key));
    }
    r.ratio_by_direction = agg.ratio;
    r.distinct_trajectories = static_cast<std::int64_t>(agg.trajectories.size());
    r.row_count = agg.rows;
    out.push_back(std::move(r));
  }
  return out;
}

namespace detail {

// Merges rows sharing (segment_id, cell, bucket) by summing ratio and
// clipped length; all other fields are per-segment constants.
inline std::vector<FactRow> merge_rows(std::vector<FactRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const FactRow& a, const FactRow& b) {
    return std::tie(a.cell.ix, a.cell.iy, a.bucket, a.segment_id) <
           std::tie(b.cell.ix, b.cell.iy, b.bucket, b.segment_id);
  });
  std::vector<FactRow> out;
  out.reserve(rows.size());
  for (const FactRow& r : rows) {
    if (!out.empty()) {
      FactRow& prev = out.back();
      if (prev.cell == r.cell && prev.bucket == r.bucket &&
          prev.segment_id == r.segment_id) {
        prev.ratio += r.ratio;
        prev.clipped_len += r.clipped_len;
        continue;
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace detail

// Coarsens the grid by an integer factor that divides both nx and ny. Rows
// falling in the same parent cell merge; ratio and clipped length add up, so
// distributive measures on the coarse store equal sums over the fine cells.
inline Warehouse rollup_spatial(const Warehouse& w, std::uint32_t factor) {
  const GridSpec& g = w.grid();
  if (factor == 0 || g.nx % factor != 0 || g.ny % factor != 0) {
    throw Error("spatial rollup: factor " + std::to_string(factor) +
                " does not divide grid " + std::to_string(g.nx) + "x" +
                std::to_string(g.ny));
  }
  GridSpec coarse = g;
  coarse.nx = g.nx / factor;
  coarse.ny = g.ny / factor;
  coarse.cell_width = g.cell_width * factor;
  coarse.cell_height = g.cell_height * factor;

  const FactColumns& f = w.facts();
  std::vector<FactRow> rows;
  rows.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    rows.push_back({CellId{f.cell_ix[i] / factor, f.cell_iy[i] / factor},
                    f.bucket[i], f.trajectory_id[i], f.segment_id[i],
                    direction_from_code(f.direction[i]), f.ratio[i],
                    f.clipped_len[i]});
  }
  return Warehouse(coarse, w.bucket_width(), detail::merge_rows(std::move(rows)),
                   w.segment_dim(), w.meta());
}

// Widens time buckets by an integer multiplier, merging rows analogously.
inline Warehouse rollup_time(const Warehouse& w, std::uint32_t multiplier) {
  if (multiplier == 0) {
    throw Error("time rollup: multiplier must be >= 1");
  }
  const auto m = static_cast<std::int64_t>(multiplier);
  const FactColumns& f = w.facts();
  std::vector<FactRow> rows;
  rows.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::int64_t b = f.bucket[i];
    // Floor division keeps negative buckets on the correct side.
    std::int64_t coarse = b >= 0 ? b / m : -((-b + m - 1) / m);
    rows.push_back({CellId{f.cell_ix[i], f.cell_iy[i]}, coarse,
                    f.trajectory_id[i], f.segment_id[i],
                    direction_from_code(f.direction[i]), f.ratio[i],
                    f.clipped_len[i]});
  }
  return Warehouse(w.grid(), w.bucket_width() * multiplier,
                   detail::merge_rows(std::move(rows)), w.segment_dim(),
                   w.meta());
}

// ---------------------------------------------------------------------------
// Persistence. Little-endian binary, layout:
//
//   offset  size  field
//   0       4     magic "TJMW"
//   4       2     format version (u16) = 1
//   6       2     reserved = 0
//   8       8     grid origin_x (f64)
//   16      8     grid origin_y (f64)
//   24      8     grid cell_width (f64)
//   32      8     grid cell_height (f64)
//   40      4     grid nx (u32)
//   44      4     grid ny (u32)
//   48      8     bucket_width (f64)
//   56      8     fact row count R (u64)
//   64      8     segment count S (u64)
//   72      8     meta source_hash (u64)
//   80      8     meta input_points (u64)
//   88      8     meta trajectories (u64)
//   96      8     meta rejected_records (u64)
//   104     -     fact columns, each a packed array of R values, in order:
//                 cell_ix u32, cell_iy u32, bucket i64, trajectory_id i64,
//                 segment_id i64, direction i8, ratio f64, clipped_len f64
//   ...     -     segment dimension columns, each S values, in order:
//                 trajectory_id i64, sequence i32, x_start f64, y_start f64,
//                 t_start f64, x_end f64, y_end f64, t_end f64,
//                 angle_deg f64 (NaN = undefined)
//   end-4   4     CRC-32C (u32) of all preceding bytes
// ---------------------------------------------------------------------------

inline constexpr std::array<std::uint8_t, 4> kWarehouseMagic = {'T', 'J', 'M',
                                                                'W'};
inline constexpr std::uint16_t kWarehouseFormatVersion = 1;

namespace detail {

struct ByteWriter {
  std::vector<std::uint8_t> buf;

  void u8(std::uint8_t v) { buf.push_back(v); }
  void i8(std::int8_t v) { buf.push_back(static_cast<std::uint8_t>(v)); }
  void u16(std::uint16_t v) {
    for (int i = 0; i < 2; ++i) buf.push_back((v >> (8 * i)) & 0xFF);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back((v >> (8 * i)) & 0xFF);
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf.push_back((v >> (8 * i)) & 0xFF);
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    u64(bits);
  }
};

struct ByteReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > size) throw IntegrityError("warehouse file truncated");
  }
  std::uint8_t u8() {
    need(1);
    return data[pos++];
  }
  std::int8_t i8() { return static_cast<std::int8_t>(u8()); }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= std::uint16_t(data[pos + i]) << (8 * i);
    pos += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(data[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(data[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() {
    const std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
};

// Canonical quiet NaN so re-saving an opened file stays byte-identical.
inline double undefined_angle_sentinel() {
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

inline void save(const Warehouse& w, const std::filesystem::path& path) {
  detail::ByteWriter out;
  for (std::uint8_t m : kWarehouseMagic) out.u8(m);
  out.u16(kWarehouseFormatVersion);
  out.u16(0);
  const GridSpec& g = w.grid();
  out.f64(g.origin_x);
  out.f64(g.origin_y);
  out.f64(g.cell_width);
  out.f64(g.cell_height);
  out.u32(g.nx);
  out.u32(g.ny);
  out.f64(w.bucket_width());
  out.u64(w.row_count());
  out.u64(w.segment_dim().size());
  out.u64(w.meta().source_hash);
  out.u64(w.meta().input_points);
  out.u64(w.meta().trajectories);
  out.u64(w.meta().rejected_records);

  const FactColumns& f = w.facts();
  for (auto v : f.cell_ix) out.u32(v);
  for (auto v : f.cell_iy) out.u32(v);
  for (auto v : f.bucket) out.i64(v);
  for (auto v : f.trajectory_id) out.i64(v);
  for (auto v : f.segment_id) out.i64(v);
  for (auto v : f.direction) out.i8(v);
  for (auto v : f.ratio) out.f64(v);
  for (auto v : f.clipped_len) out.f64(v);

  const auto& dim = w.segment_dim();
  for (const Segment& s : dim) out.i64(s.trajectory_id);
  for (const Segment& s : dim) out.i32(s.sequence);
  for (const Segment& s : dim) out.f64(s.start.x);
  for (const Segment& s : dim) out.f64(s.start.y);
  for (const Segment& s : dim) out.f64(s.start.t);
  for (const Segment& s : dim) out.f64(s.end.x);
  for (const Segment& s : dim) out.f64(s.end.y);
  for (const Segment& s : dim) out.f64(s.end.t);
  for (const Segment& s : dim) {
    out.f64(s.angle_deg ? *s.angle_deg : detail::undefined_angle_sentinel());
  }

  out.u32(crc32c(out.buf.data(), out.buf.size()));

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(reinterpret_cast<const char*>(out.buf.data()),
             static_cast<std::streamsize>(out.buf.size()));
  if (!file) throw IoError("write failed for " + path.string());
}

inline Warehouse open(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                  std::istreambuf_iterator<char>());
  if (file.bad()) throw IoError("read failed for " + path.string());

  if (bytes.size() < kWarehouseMagic.size() + 2 + 4) {
    throw IntegrityError("warehouse file truncated");
  }
  detail::ByteReader in{bytes.data(), bytes.size()};
  for (std::uint8_t m : kWarehouseMagic) {
    if (in.u8() != m) throw IntegrityError("not a warehouse file (bad magic)");
  }
  const std::uint16_t version = in.u16();
  if (version != kWarehouseFormatVersion) {
    throw VersionError("unsupported warehouse format version " +
                       std::to_string(version));
  }
  const std::uint32_t expect = crc32c(bytes.data(), bytes.size() - 4);
  std::uint32_t trailer = 0;
  for (int i = 0; i < 4; ++i) {
    trailer |= std::uint32_t(bytes[bytes.size() - 4 + static_cast<std::size_t>(i)])
               << (8 * i);
  }
  if (trailer != expect) {
    throw IntegrityError("warehouse file checksum mismatch");
  }

  in.u16();  // reserved
  GridSpec grid;
  grid.origin_x = in.f64();
  grid.origin_y = in.f64();
  grid.cell_width = in.f64();
  grid.cell_height = in.f64();
  grid.nx = in.u32();
  grid.ny = in.u32();
  const double bucket_width = in.f64();
  const std::uint64_t n_rows = in.u64();
  const std::uint64_t n_segs = in.u64();
  WarehouseMeta meta;
  meta.source_hash = in.u64();
  meta.input_points = in.u64();
  meta.trajectories = in.u64();
  meta.rejected_records = in.u64();

  constexpr std::size_t kRowBytes = 4 + 4 + 8 + 8 + 8 + 1 + 8 + 8;
  constexpr std::size_t kSegBytes = 8 + 4 + 8 * 7;
  const std::size_t expected =
      in.pos + n_rows * kRowBytes + n_segs * kSegBytes + 4;
  if (expected != bytes.size()) {
    throw IntegrityError("warehouse file size does not match header counts");
  }

  std::vector<FactRow> rows(n_rows);
  for (auto& r : rows) r.cell.ix = in.u32();
  for (auto& r : rows) r.cell.iy = in.u32();
  for (auto& r : rows) r.bucket = in.i64();
  for (auto& r : rows) r.trajectory_id = in.i64();
  for (auto& r : rows) r.segment_id = in.i64();
  for (auto& r : rows) r.direction = direction_from_code(in.i8());
  for (auto& r : rows) r.ratio = in.f64();
  for (auto& r : rows) r.clipped_len = in.f64();

  std::vector<Segment> dim(n_segs);
  for (auto& s : dim) s.trajectory_id = in.i64();
  for (auto& s : dim) s.sequence = in.i32();
  for (auto& s : dim) s.start.x = in.f64();
  for (auto& s : dim) s.start.y = in.f64();
  for (auto& s : dim) s.start.t = in.f64();
  for (auto& s : dim) s.end.x = in.f64();
  for (auto& s : dim) s.end.y = in.f64();
  for (auto& s : dim) s.end.t = in.f64();
  for (auto& s : dim) {
    const double a = in.f64();
    s.angle_deg = std::isnan(a) ? std::nullopt : std::optional<double>(a);
  }

  return Warehouse(grid, bucket_width, std::move(rows), std::move(dim), meta);
}

}  // namespace tdw
