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

#ifndef MFNAV_SCAN_HPP_
#define MFNAV_SCAN_HPP_

#include <string>
#include <vector>

#include "mfnav/se3.hpp"

namespace mfnav {

constexpr int kNumChannels = 16;

struct ScanPoint {
  Vec3 p = Vec3::Zero();  // sensor frame, meters
  int channel = 0;        // ring index, 0 (lowest elevation) .. 15
};

/// One LiDAR sweep in the sensor frame.
struct Scan {
  std::vector<ScanPoint> points;
  int node_id = 0;
  double t = 0.0;
};

struct ElevatorDetectConfig {
  double range_sq_threshold = 9.0;  // m^2, mean squared range below => in cab
  double footprint_a = 1.0;         // half extent of the synthesized shell, x
  double footprint_b = 1.0;         // half extent of the synthesized shell, y
  double shell_spacing = 0.1;       // m between synthesized shell points
};

/// Mean of squared point distances from the sensor origin.
double mean_squared_range(const Scan& scan);

/// True when the scan's range distribution says the robot is boxed into an
/// elevator cab (strictly below the threshold).
bool detect_elevator_interior(const Scan& scan, const ElevatorDetectConfig& cfg);

/// Builds the hollow-cuboid shell that stands in for an elevator ride on the
/// map: points on the four vertical faces of a 2a x 2b cuboid, centered on the
/// robot's x,y, spanning z in [min(0, delta_z), max(0, delta_z)] offset by
/// base_pose_z. The interior of the cross-section stays empty.
Scan synthesize_elevator_cloud(const ElevatorDetectConfig& cfg, double delta_z,
                               double base_pose_z);

Scan load_scan_csv(const std::string& path, int node_id, double t);
void save_scan_csv(const std::string& path, const Scan& scan);

}  // namespace mfnav

#endif  // MFNAV_SCAN_HPP_
