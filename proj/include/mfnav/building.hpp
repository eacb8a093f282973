/*
 * Copyright 2026 The mfnav Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MFNAV_BUILDING_HPP_
#define MFNAV_BUILDING_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mfnav/se3.hpp"
#include "mfnav/voxel_map.hpp"

namespace mfnav {

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  double width() const { return std::min(x1 - x0, y1 - y0); }
  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
  Rect inset(double margin) const {
    return {x0 + margin, y0 + margin, x1 - margin, y1 - margin};
  }
};

/// Straight flight ascending in +x inside the footprint; one flight per
/// story, stacked. The corridor-facing side (lower y edge) stays open.
struct StairSpec {
  Rect footprint;
  double step_rise = 0.28;
  double step_run = 0.28;
};

struct ElevatorSpec {
  std::string id = "e0";
  Rect footprint;  // shaft cross-section, door on the lower y edge
  int lowest_floor = 0;
  int highest_floor = 1;
  int initial_floor = 0;
};

struct BuildingSpec {
  int floors = 2;
  double floor_height = 3.64;
  double wall_height = 2.4;
  std::vector<std::vector<Rect>> corridors;  // one rect list per floor
  std::optional<StairSpec> stairwell;
  std::vector<ElevatorSpec> elevators;

  double floor_z(int floor) const { return floor * floor_height; }

  /// Same corridor footprint on every floor.
  static std::vector<std::vector<Rect>> uniform_corridors(int floors,
                                                          const std::vector<Rect>& rects);
};

/// Solid axis-aligned box; the ray caster's only primitive.
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();
};

/// First hit of a ray against a box set, in (0, max_range]. Returns false on
/// a miss.
bool raycast(const std::vector<Box>& boxes, const Vec3& origin, const Vec3& dir,
             double max_range, double& t_hit);

struct BuildingGeometry {
  BuildingSpec spec;
  std::vector<Box> boxes;  // walls, slabs, steps, shaft walls
  VoxelMap truth;          // the voxel set the surfaces imply
};

/// Validates the spec and emits wall/floor/stair/shaft surfaces plus the
/// exact traversable voxel map they imply. Throws ValidationError listing
/// every violated constraint.
BuildingGeometry generate_building(const BuildingSpec& spec,
                                   const VoxelizeConfig& voxel_cfg = {});

/// True when a ground-level position sits inside the cab of some elevator
/// (footprint inset enough that doorway poses do not count).
const ElevatorSpec* elevator_cab_at(const BuildingSpec& spec, double x, double y);

}  // namespace mfnav

#endif  // MFNAV_BUILDING_HPP_
