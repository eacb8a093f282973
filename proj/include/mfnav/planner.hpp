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

#ifndef MFNAV_PLANNER_HPP_
#define MFNAV_PLANNER_HPP_

#include <map>
#include <string>
#include <vector>

#include "mfnav/voxel_map.hpp"

namespace mfnav {

struct PlanConfig {
  double v_rbt = 1.0;  // m/s
  double v_elv = 1.0;  // m/s
  // Cab position overrides by elevator id; wins over map metadata.
  std::map<std::string, double> elevator_z;
};

/// Search node: a voxel plus whether the robot is riding a cab. Riding states
/// exist only on elevator voxels; the flag records that the boarding wait has
/// already been paid.
struct SearchState {
  VoxelIndex idx;
  int riding = -1;  // index into VoxelMap::elevators(), -1 when walking

  bool operator==(const SearchState&) const = default;
  auto operator<=>(const SearchState&) const = default;
};

enum class MoveMode { kWalk, kStair, kWait, kElev };

const char* move_mode_name(MoveMode mode);
MoveMode move_mode_from_name(const std::string& name);

struct Waypoint {
  Vec3 position = Vec3::Zero();  // voxel center
  double t = 0.0;                // cumulative seconds
  MoveMode mode = MoveMode::kWalk;
};

struct Trajectory {
  std::vector<Waypoint> waypoints;
  double total_time = 0.0;
  // Inclusive waypoint index ranges, one per planned destination.
  std::vector<std::pair<std::size_t, std::size_t>> legs;
};

/// Move feasibility between two Chebyshev-adjacent voxels:
///  - both endpoints must be in the traversable set;
///  - horizontal diagonals must not cut corners (both orthogonal
///    intermediates present);
///  - vertical moves only between elevator voxels of one column;
///  - diagonal moves with a vertical component need a stair endpoint and a
///    single horizontal axis.
bool accessible(const VoxelMap& map, const VoxelIndex& from, const VoxelIndex& to);

/// Estimated remaining seconds from a state to the goal: cab wait plus ride
/// time when standing on an elevator voxel (wait already paid when riding),
/// straight-line travel time otherwise.
double heuristic(const SearchState& state, const VoxelIndex& goal,
                 const VoxelMap& map, const PlanConfig& cfg);

/// Deterministic best-first search over (voxel, riding) states. Edge costs
/// are travel times; boarding a cab charges the waiting time once. Ties on f
/// break by smaller h, then by state order.
Trajectory astar(const VoxelMap& map, const VoxelIndex& start,
                 const VoxelIndex& goal, const PlanConfig& cfg);

/// Chains astar legs through the waypoint list in order (appending a final
/// leg back to the first entry when return_to_start is set). A leg that rides
/// an elevator leaves its cab at the alighting height for later legs.
Trajectory plan_multi(const VoxelMap& map, const std::vector<VoxelIndex>& waypoints,
                      bool return_to_start, const PlanConfig& cfg);

/// Exhaustive destination ordering (at most 8) by total chained travel time,
/// elevator state propagated; ties resolve to the lexicographically smallest
/// permutation.
std::vector<VoxelIndex> order_destinations(const VoxelMap& map,
                                           const VoxelIndex& start,
                                           const std::vector<VoxelIndex>& destinations,
                                           const PlanConfig& cfg);

void save_trajectory_csv(const std::string& path, const Trajectory& trajectory);
Trajectory load_trajectory_csv(const std::string& path);

}  // namespace mfnav

#endif  // MFNAV_PLANNER_HPP_
