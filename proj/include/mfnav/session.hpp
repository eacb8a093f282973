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

#ifndef MFNAV_SESSION_HPP_
#define MFNAV_SESSION_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mfnav/baro.hpp"
#include "mfnav/building.hpp"
#include "mfnav/scan.hpp"
#include "mfnav/se3.hpp"
#include "mfnav/voxel_map.hpp"

namespace mfnav {

struct NoiseSpec {
  double odom_sigma_xy = 0.0;   // m per meter traveled
  double odom_sigma_z = 0.0;    // m per meter traveled
  double odom_sigma_yaw = 0.0;  // rad per meter traveled
  double pressure_sigma = 0.0;  // Pa
  double range_sigma = 0.0;     // m
};

struct SessionConfig {
  double p_cri = 101325.0;     // reference pressure at the start pose
  int window = 100;            // pressure samples emitted per pose
  double pose_spacing = 1.0;   // m between interpolated poses
  double pose_dt = 1.0;        // s between poses
  double sensor_height = 0.5;  // sensor above the walking surface
  int azimuth_steps = 360;
  double max_range = 40.0;
  double floor_threshold = 2.5;  // for ground-truth floor labels
};

struct OdometryDelta {
  int i = 0, j = 0;
  Pose3 rel;
};

struct SessionManifest {
  double p_cri = 101325.0;
  int window = 100;
  std::uint64_t seed = 0;
  int n_poses = 0;
  int n_elevators = 0;
  double pose_dt = 1.0;
};

/// The sensor streams the mapping pipeline consumes.
struct SessionData {
  SessionManifest manifest;
  std::vector<PressureSample> pressure;
  std::vector<OdometryDelta> odometry;
  std::vector<Scan> scans;  // scan n belongs to pose node n
};

/// A full generated session: streams plus ground truth.
struct Session {
  SessionData data;
  std::vector<Pose3> truth_poses;
  std::vector<int> truth_floors;
  VoxelMap truth_voxels;
};

/// Poses along the anchor polyline: one pose per anchor plus marching steps
/// of pose_spacing within each segment.
std::vector<Vec3> interpolate_route(const std::vector<Vec3>& anchors,
                                    double spacing);

/// Simulates a full sensor session along the route: ray-cast scans (replaced
/// by a cab-interior cloud inside elevators), window-oversampled pressure,
/// odometry deltas (frozen to identity inside cabs) and ground truth.
/// Deterministic per seed.
Session generate_session(const BuildingSpec& spec, const std::vector<Vec3>& route,
                         const NoiseSpec& noise, std::uint64_t seed,
                         const SessionConfig& cfg = {});

void write_session(const std::string& dir, const Session& session);
SessionData load_session_data(const std::string& dir);
Session load_session(const std::string& dir);

/// Text description of a building, a route and noise levels, the cmd-line
/// generator input. Unknown keys are rejected.
struct GenerateSpec {
  BuildingSpec building;
  std::vector<Vec3> route;
  NoiseSpec noise;
  SessionConfig session;
};

GenerateSpec parse_generate_spec(const std::string& path);

}  // namespace mfnav

#endif  // MFNAV_SESSION_HPP_
