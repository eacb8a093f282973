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

#ifndef MFNAV_PIPELINE_HPP_
#define MFNAV_PIPELINE_HPP_

#include <string>
#include <vector>

#include "mfnav/baro.hpp"
#include "mfnav/pose_graph.hpp"
#include "mfnav/scan.hpp"
#include "mfnav/scan_context.hpp"
#include "mfnav/session.hpp"
#include "mfnav/voxel_map.hpp"

namespace mfnav {

struct MappingOptions {
  BaroConfig baro;  // p_cri is taken from the session manifest
  ElevatorDetectConfig elevator;
  LoopDbConfig loop;
  OptimizeParams optimize;

  bool use_floor_labels = true;         // off reproduces the unlabeled baseline
  bool use_elevation_constraints = true;

  double sigma_z = 0.3;                // elevation constraint strength
  double odom_sigma_xy = 0.02;
  double odom_sigma_z = 0.02;
  double odom_sigma_rot = 0.01;
  double elevator_odom_sigma_z = 10.0;  // cab rides carry no usable z odometry
  double loop_sigma_xy = 0.05;
  double loop_sigma_yaw = 0.02;
  double prior_sigma = 1e-3;
  int max_ground_channel = 4;           // cloud classification bound
};

struct MapCloudPoint {
  Vec3 p = Vec3::Zero();
  PointClass cls = PointClass::kOther;
};

struct MappingResult {
  PoseGraph graph;
  PoseMap poses;  // optimized
  std::vector<double> delta_z;      // per pose, from the pressure stream
  std::vector<int> floor_labels;    // per pose
  std::vector<bool> in_elevator;    // per pose scan
  std::vector<LoopCandidate> loops_accepted;
  int loops_rejected = 0;
  double final_cost = 0.0;
  int iterations = 0;
  std::vector<MapCloudPoint> cloud;  // corrected world-frame map
};

/// The full mapping stage: altitude estimation and floor tracking from
/// pressure, elevator detection, floor-labeled loop closure, batch
/// optimization, and assembly of the corrected classified map cloud with
/// hollow-cuboid shells standing in for elevator rides.
MappingResult run_mapping(const SessionData& session, const MappingOptions& opts);

void save_map_cloud(const std::string& path, const std::vector<MapCloudPoint>& cloud);
std::vector<MapCloudPoint> load_map_cloud(const std::string& path);

std::vector<ClassifiedPoint> to_classified(const std::vector<MapCloudPoint>& cloud);

}  // namespace mfnav

#endif  // MFNAV_PIPELINE_HPP_
