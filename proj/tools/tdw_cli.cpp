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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdw/tdw.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitIo = 3;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string fmt_g9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_count(double v) {
  return std::to_string(static_cast<long long>(std::llround(v)));
}

std::string read_input(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin),
                       std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tdw::IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) throw tdw::IoError("read failed for " + path);
  return bytes;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  tdw::GenConfig cfg;
  std::vector<double> bounds{0.0, 0.0, 16.0, 16.0};
  std::vector<double> speed{0.05, 0.30};
  std::string out;
};

void run_generate(const GenerateArgs& args) {
  tdw::GenConfig cfg = args.cfg;
  cfg.x_min = args.bounds[0];
  cfg.y_min = args.bounds[1];
  cfg.x_max = args.bounds[2];
  cfg.y_max = args.bounds[3];
  cfg.speed_min = args.speed[0];
  cfg.speed_max = args.speed[1];

  const auto points = tdw::generate(cfg);
  if (args.out.empty()) {
    tdw::write_csv(std::cout, points);
  } else {
    std::ofstream out(args.out, std::ios::binary | std::ios::trunc);
    if (!out) throw tdw::IoError("cannot open " + args.out + " for writing");
    tdw::write_csv(out, points);
    if (!out) throw tdw::IoError("write failed for " + args.out);
  }
}

// ---------------------------------------------------------------------------
// load

struct LoadArgs {
  std::string in;
  std::string out;
  std::string report_path;
  std::vector<std::uint32_t> grid{0, 0};
  std::vector<double> origin{0.0, 0.0};
  double cell_w = 1.0;
  double cell_h = 1.0;
  double bucket_width = 1.0;
  std::string on_error = "fail";
};

nlohmann::ordered_json report_json(const tdw::LoadReport& rep) {
  return nlohmann::ordered_json{
      {"input_points", rep.input_points},
      {"rejected_records", rep.rejected_records},
      {"dropped_trajectories", rep.dropped_trajectories},
      {"out_of_bounds_segments", rep.out_of_bounds_segments},
      {"trajectories", rep.trajectories},
      {"segments", rep.segments},
      {"degenerate_segments", rep.degenerate_segments},
      {"fact_rows", rep.fact_rows},
  };
}

void run_load(const LoadArgs& args) {
  tdw::EtlConfig cfg;
  cfg.grid = tdw::GridSpec{args.origin[0], args.origin[1], args.cell_w,
                           args.cell_h,   args.grid[0],   args.grid[1]};
  if (!cfg.grid.valid()) throw UsageError("invalid grid dimensions");
  cfg.bucket_width = args.bucket_width;
  if (!(cfg.bucket_width > 0.0)) throw UsageError("bucket width must be > 0");
  cfg.reject_policy = args.on_error == "skip"
                          ? tdw::RejectPolicy::skip_and_report
                          : tdw::RejectPolicy::fail_fast;

  const std::string bytes = read_input(args.in);
  std::istringstream in(bytes);
  tdw::LoadReport rep;
  auto build = tdw::run_etl(in, cfg, &rep);
  tdw::WarehouseMeta meta{tdw::fnv1a64(bytes), rep.input_points,
                          rep.trajectories, rep.rejected_records};
  tdw::Warehouse w(cfg.grid, cfg.bucket_width, std::move(build.rows),
                   std::move(build.segment_dim), meta);
  tdw::save(w, args.out);

  const std::string report = report_json(rep).dump();
  if (args.report_path.empty()) {
    std::cerr << report << '\n';
  } else {
    std::ofstream out(args.report_path, std::ios::trunc);
    if (!out) {
      throw tdw::IoError("cannot open " + args.report_path + " for writing");
    }
    out << report << '\n';
  }
}

// ---------------------------------------------------------------------------
// query

struct QueryArgs {
  std::string db;
  std::string measure;
  std::vector<std::uint32_t> cell;
  std::vector<std::uint32_t> cell_range;
  double from = 0.0;
  double to = 0.0;
  std::string direction;
  std::string presence_mode = "distinct";
  bool per_object = false;
  std::string format = "table";
};

struct OutputTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Column kinds drive JSON typing: s = string, i = integer, f = float.
  std::string kinds;
};

void print_table(const OutputTable& t) {
  std::vector<std::size_t> width(t.header.size());
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    width[c] = t.header[c].size();
    for (const auto& row : t.rows) width[c] = std::max(width[c], row[c].size());
  }
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) std::cout << "  ";
      std::cout << row[c];
      if (c + 1 < row.size()) {
        std::cout << std::string(width[c] - row[c].size(), ' ');
      }
    }
    std::cout << '\n';
  };
  emit(t.header);
  for (const auto& row : t.rows) emit(row);
}

void print_csv(const OutputTable& t) {
  auto emit = [](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) std::cout << ',';
      std::cout << row[c];
    }
    std::cout << '\n';
  };
  emit(t.header);
  for (const auto& row : t.rows) emit(row);
}

void print_json(const OutputTable& t) {
  std::cout << "[";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::cout << (r ? ",\n " : "\n ") << "{";
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (c) std::cout << ", ";
      std::cout << '"' << t.header[c] << "\": ";
      const std::string& v = t.rows[r][c];
      if (t.kinds[c] == 's') {
        if (v == "none") {
          std::cout << "null";
        } else {
          std::cout << '"' << v << '"';
        }
      } else {
        std::cout << v;
      }
    }
    std::cout << "}";
  }
  std::cout << (t.rows.empty() ? "]\n" : "\n]\n");
}

void run_query(const QueryArgs& args) {
  if (args.cell.empty() == args.cell_range.empty()) {
    throw UsageError("exactly one of --cell or --cell-range is required");
  }
  if (!(args.to > args.from)) throw UsageError("--to must be greater than --from");
  if (!args.direction.empty() && args.measure != "heading") {
    throw UsageError("--direction only applies to --measure heading");
  }
  if (args.per_object && args.measure != "heading") {
    throw UsageError("--per-object only applies to --measure heading");
  }

  const tdw::Warehouse w = tdw::open(args.db);
  tdw::CellId lo, hi;
  if (!args.cell.empty()) {
    lo = hi = tdw::CellId{args.cell[0], args.cell[1]};
  } else {
    lo = tdw::CellId{args.cell_range[0], args.cell_range[1]};
    hi = tdw::CellId{args.cell_range[2], args.cell_range[3]};
  }
  if (lo.ix > hi.ix || lo.iy > hi.iy) throw UsageError("empty cell range");
  if (hi.ix >= w.grid().nx || hi.iy >= w.grid().ny) {
    throw UsageError("cell range outside the warehouse grid");
  }

  const tdw::TimeInterval itv{args.from, args.to};
  if (const auto range = w.time_range()) {
    if (itv.t_lo >= range->t_hi || itv.t_hi <= range->t_lo) {
      throw tdw::RangeError("interval [" + fmt_g9(itv.t_lo) + ", " +
                            fmt_g9(itv.t_hi) +
                            ") is outside the loaded time range [" +
                            fmt_g9(range->t_lo) + ", " + fmt_g9(range->t_hi) +
                            ")");
    }
  }

  std::optional<tdw::Direction> dir;
  if (!args.direction.empty()) {
    dir = tdw::direction_from_string(args.direction);
    if (!dir) throw UsageError("unknown direction " + args.direction);
  }

  OutputTable table;
  const std::string from_s = fmt_g9(args.from);
  const std::string to_s = fmt_g9(args.to);
  auto key_cols = [&](tdw::CellId c) {
    return std::vector<std::string>{std::to_string(c.ix), std::to_string(c.iy),
                                    from_s, to_s};
  };
  const std::vector<std::string> key_header{"ix", "iy", "from", "to"};
  const std::string key_kinds = "iiff";

  auto wide_header = [&](const char* undef_name) {
    table.header = key_header;
    for (tdw::Direction d : tdw::kDirections) {
      table.header.emplace_back(tdw::to_string(d));
    }
    table.header.emplace_back(undef_name);
  };

  for (std::uint32_t ix = lo.ix; ix <= hi.ix; ++ix) {
    for (std::uint32_t iy = lo.iy; iy <= hi.iy; ++iy) {
      const tdw::CellId cell{ix, iy};
      std::vector<std::string> row = key_cols(cell);
      if (args.measure == "presence") {
        const auto mode = args.presence_mode == "sum"
                              ? tdw::PresenceMode::sum
                              : tdw::PresenceMode::distinct;
        row.push_back(std::to_string(tdw::presence(w, cell, itv, mode)));
      } else if (args.measure == "heading") {
        const tdw::DirectionTally tally =
            args.per_object
                ? tdw::compute_direction_count_by_object(w, cell, itv)
                : tdw::compute_direction_count(w, cell, itv);
        if (dir) {
          row.push_back(args.direction);
          row.push_back(fmt_count(tally[*dir]));
        } else {
          for (tdw::Direction d : tdw::kDirections) {
            row.push_back(fmt_count(tally[d]));
          }
          row.push_back(std::to_string(tally.undefined));
        }
      } else if (args.measure == "contributions") {
        const auto tally = tdw::direction_contributions(w, cell, itv);
        for (tdw::Direction d : tdw::kDirections) {
          row.push_back(fmt_g9(tally[d]));
        }
        row.push_back(std::to_string(tally.undefined));
      } else {  // majority
        const auto m = tdw::direction_majority(w, cell, itv);
        row.push_back(m ? std::string(tdw::to_string(*m)) : "none");
      }
      table.rows.push_back(std::move(row));
    }
  }

  if (args.measure == "presence") {
    table.header = key_header;
    table.header.emplace_back("presence");
    table.kinds = key_kinds + "i";
  } else if (args.measure == "heading" && dir) {
    table.header = key_header;
    table.header.emplace_back("direction");
    table.header.emplace_back("count");
    table.kinds = key_kinds + "si";
  } else if (args.measure == "heading") {
    wide_header("undefined");
    table.kinds = key_kinds + std::string(8, 'i') + "i";
  } else if (args.measure == "contributions") {
    wide_header("undefined_rows");
    table.kinds = key_kinds + std::string(8, 'f') + "i";
  } else {
    table.header = key_header;
    table.header.emplace_back("majority");
    table.kinds = key_kinds + "s";
  }

  if (args.format == "csv") {
    print_csv(table);
  } else if (args.format == "json") {
    print_json(table);
  } else {
    print_table(table);
  }
}

// ---------------------------------------------------------------------------
// rollup

struct RollupArgs {
  std::string in;
  std::string out;
  std::uint32_t spatial_factor = 1;
  std::uint32_t time_multiplier = 1;
};

void run_rollup(const RollupArgs& args) {
  if (args.spatial_factor == 0) throw UsageError("--spatial-factor must be >= 1");
  if (args.time_multiplier == 0) throw UsageError("--time-multiplier must be >= 1");
  tdw::Warehouse w = tdw::open(args.in);
  w = tdw::rollup_spatial(w, args.spatial_factor);
  w = tdw::rollup_time(w, args.time_multiplier);
  tdw::save(w, args.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tdw - trajectory data warehouse"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand(
      "generate", "Emit a seeded synthetic moving-object CSV");
  cmd_gen->add_option("--seed", gen.cfg.seed, "PRNG seed")->capture_default_str();
  cmd_gen->add_option("--objects", gen.cfg.n_objects, "number of objects")
      ->check(CLI::Range(std::uint32_t{1}, std::numeric_limits<std::uint32_t>::max()))
      ->capture_default_str();
  cmd_gen->add_option("--samples", gen.cfg.samples_per_object,
                      "samples per object")
      ->check(CLI::Range(std::uint32_t{2}, std::numeric_limits<std::uint32_t>::max()))
      ->capture_default_str();
  cmd_gen->add_option("--bounds", gen.bounds, "map bounds: XMIN YMIN XMAX YMAX")
      ->expected(4);
  cmd_gen->add_option("--speed", gen.speed, "speed range: MIN MAX")->expected(2);
  cmd_gen->add_option("--turn-stddev", gen.cfg.turn_stddev_deg,
                      "heading perturbation stddev, degrees")
      ->capture_default_str();
  cmd_gen->add_option("--out", gen.out, "output file (default: stdout)");
  cmd_gen->callback([&] { run_generate(gen); });

  LoadArgs load;
  auto* cmd_load = app.add_subcommand(
      "load", "Run the ETL pipeline and write a warehouse file");
  cmd_load->add_option("--in", load.in, "input CSV ('-' for stdin)")->required();
  cmd_load->add_option("--grid", load.grid, "grid cell counts: NX NY")
      ->expected(2)
      ->required();
  cmd_load->add_option("--origin", load.origin, "grid origin: X Y")->expected(2);
  cmd_load->add_option("--cell-w", load.cell_w, "cell width")->capture_default_str();
  cmd_load->add_option("--cell-h", load.cell_h, "cell height")->capture_default_str();
  cmd_load->add_option("--bucket-width", load.bucket_width,
                       "time bucket width in ticks")
      ->capture_default_str();
  cmd_load->add_option("--out", load.out, "output warehouse file")->required();
  cmd_load->add_option("--on-error", load.on_error, "bad-record policy")
      ->check(CLI::IsMember({"fail", "skip"}))
      ->capture_default_str();
  cmd_load->add_option("--report", load.report_path,
                       "write the JSON load report here instead of stderr");
  cmd_load->callback([&] { run_load(load); });

  QueryArgs query;
  auto* cmd_query = app.add_subcommand("query", "Evaluate a measure");
  cmd_query->add_option("--db", query.db, "warehouse file")->required();
  cmd_query
      ->add_option("--measure", query.measure,
                   "one of presence, heading, contributions, majority")
      ->check(CLI::IsMember({"presence", "heading", "contributions", "majority"}))
      ->required();
  auto* cell_opt =
      cmd_query->add_option("--cell", query.cell, "single cell: IX IY")
          ->expected(2);
  cmd_query
      ->add_option("--cell-range", query.cell_range,
                   "inclusive cell rectangle: IX0 IY0 IX1 IY1")
      ->expected(4)
      ->excludes(cell_opt);
  cmd_query->add_option("--from", query.from, "interval start (inclusive)")
      ->required();
  cmd_query->add_option("--to", query.to, "interval end (exclusive)")->required();
  cmd_query->add_option("--direction", query.direction,
                        "restrict heading counts to one direction")
      ->check(CLI::IsMember({"N", "NE", "E", "SE", "S", "SW", "W", "NW"}));
  cmd_query->add_option("--presence-mode", query.presence_mode,
                        "distinct objects or per-bucket sum")
      ->check(CLI::IsMember({"distinct", "sum"}))
      ->capture_default_str();
  cmd_query->add_flag("--per-object", query.per_object,
                      "count distinct objects per direction instead of segments");
  cmd_query->add_option("--format", query.format, "output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  cmd_query->callback([&] { run_query(query); });

  RollupArgs rollup;
  auto* cmd_rollup = app.add_subcommand(
      "rollup", "Aggregate a warehouse to a coarser grid and/or wider buckets");
  cmd_rollup->add_option("--in", rollup.in, "input warehouse file")->required();
  cmd_rollup->add_option("--out", rollup.out, "output warehouse file")->required();
  cmd_rollup->add_option("--spatial-factor", rollup.spatial_factor,
                         "cells merged per axis")
      ->capture_default_str();
  cmd_rollup->add_option("--time-multiplier", rollup.time_multiplier,
                         "bucket width multiplier")
      ->capture_default_str();
  cmd_rollup->callback([&] { run_rollup(rollup); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const tdw::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const tdw::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
