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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tdw/model.hpp"

namespace tdw {

// Deterministic pseudo-random stream (SplitMix64). The whole generator is
// pinned to this algorithm so that a given seed reproduces the same sample
// bytes anywhere: uniforms take the high 53 bits, normals use Box-Muller.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller.
  double next_normal() {
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
};

// Configuration of the seeded moving-object generator. Objects perform a
// correlated random walk: the heading is perturbed by a normal turn each
// step and reflected at the bounds; timestamps are the sample indices.
struct GenConfig {
  std::uint64_t seed = 0;
  std::uint32_t n_objects = 1000;
  std::uint32_t samples_per_object = 50;
  double x_min = 0.0, y_min = 0.0;
  double x_max = 16.0, y_max = 16.0;
  double speed_min = 0.05;  // map units per tick
  double speed_max = 0.30;
  double turn_stddev_deg = 25.0;
};

inline void validate(const GenConfig& cfg) {
  if (cfg.n_objects < 1) throw std::invalid_argument("n_objects must be >= 1");
  if (cfg.samples_per_object < 2) {
    throw std::invalid_argument("samples_per_object must be >= 2");
  }
  if (!(cfg.speed_min > 0.0) || !(cfg.speed_max >= cfg.speed_min)) {
    throw std::invalid_argument("speed range must satisfy 0 < min <= max");
  }
  if (!(cfg.x_max > cfg.x_min) || !(cfg.y_max > cfg.y_min)) {
    throw std::invalid_argument("bounds must be non-degenerate");
  }
  if (cfg.turn_stddev_deg < 0.0) {
    throw std::invalid_argument("turn_stddev must be >= 0");
  }
}

namespace detail {

inline double reflect_into(double v, double lo, double hi) {
  while (v < lo || v > hi) {
    if (v < lo) v = 2.0 * lo - v;
    if (v > hi) v = 2.0 * hi - v;
  }
  return v;
}

}  // namespace detail

// Generates n_objects * samples_per_object points, fully determined by the
// seed. Object i draws from its own SplitMix64 stream whose seed is the i-th
// output of a master SplitMix64 stream, so per-object generation is
// order-independent.
inline std::vector<SamplePoint> generate(const GenConfig& cfg) {
  validate(cfg);
  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(cfg.n_objects) * cfg.samples_per_object);

  SplitMix64 seeder(cfg.seed);
  for (std::uint32_t obj = 0; obj < cfg.n_objects; ++obj) {
    SplitMix64 rng(seeder.next());
    double x = cfg.x_min + rng.next_unit() * (cfg.x_max - cfg.x_min);
    double y = cfg.y_min + rng.next_unit() * (cfg.y_max - cfg.y_min);
    double heading = rng.next_unit() * 360.0;
    out.push_back({static_cast<TrajectoryId>(obj), 0, 0.0, x, y});

    for (std::uint32_t k = 1; k < cfg.samples_per_object; ++k) {
      const double speed =
          cfg.speed_min + rng.next_unit() * (cfg.speed_max - cfg.speed_min);
      heading += rng.next_normal() * cfg.turn_stddev_deg;
      heading = std::fmod(heading, 360.0);
      if (heading < 0.0) heading += 360.0;
      const double rad = heading * (std::numbers::pi / 180.0);
      double nx = detail::reflect_into(x + speed * std::cos(rad), cfg.x_min,
                                       cfg.x_max);
      double ny = detail::reflect_into(y + speed * std::sin(rad), cfg.y_min,
                                       cfg.y_max);
      // Keep the walk correlated with the motion actually taken after
      // reflection.
      if (nx != x || ny != y) {
        heading = std::atan2(ny - y, nx - x) * (180.0 / std::numbers::pi);
        if (heading < 0.0) heading += 360.0;
      }
      x = nx;
      y = ny;
      out.push_back({static_cast<TrajectoryId>(obj), k,
                     static_cast<double>(k), x, y});
    }
  }
  return out;
}

}  // namespace tdw
