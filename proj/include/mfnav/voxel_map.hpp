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

#ifndef MFNAV_VOXEL_MAP_HPP_
#define MFNAV_VOXEL_MAP_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mfnav/scan.hpp"
#include "mfnav/se3.hpp"

namespace mfnav {

enum class VoxelClass : std::uint8_t { kCorridor, kStair, kElevator };

char voxel_class_char(VoxelClass c);
VoxelClass voxel_class_from_char(char c);

struct VoxelIndex {
  int i = 0, j = 0, k = 0;
  bool operator==(const VoxelIndex&) const = default;
  auto operator<=>(const VoxelIndex&) const = default;
};

struct VoxelIndexHash {
  std::size_t operator()(const VoxelIndex& v) const {
    std::size_t h = std::hash<int>()(v.i);
    h ^= std::hash<int>()(v.j) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<int>()(v.k) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

struct ElevatorInfo {
  std::string id;
  int column_i = 0, column_j = 0;
  int k_min = 0, k_max = 0;  // inclusive vertical extent, k_min < k_max
  double initial_z = 0.0;    // cab position fed to the planner
};

/// Source class of a map-cloud point, decided upstream of voxelization.
enum class PointClass : std::uint8_t { kGround, kElevatorSynth, kOther };

struct ClassifiedPoint {
  Vec3 p = Vec3::Zero();
  PointClass cls = PointClass::kOther;
};

struct VoxelizeConfig {
  int max_ground_channel = 4;  // inclusive ring bound for ground returns
  int n_z = 5;                 // voxels kept per non-ground column
  double resolution = 0.3;     // meters per voxel
};

/// The traversable voxel set: corridor bottoms, stair diagonals and elevator
/// stacks, plus elevator metadata. Immutable once built; planner queries are
/// lock-free reads.
class VoxelMap {
 public:
  VoxelMap() = default;
  VoxelMap(double resolution, const Vec3& origin)
      : resolution_(resolution), origin_(origin) {}

  double resolution() const { return resolution_; }
  const Vec3& origin() const { return origin_; }

  void insert(const VoxelIndex& idx, VoxelClass cls);
  bool contains(const VoxelIndex& idx) const { return occupied_.count(idx) > 0; }
  const VoxelClass* find(const VoxelIndex& idx) const;
  std::size_t size() const { return occupied_.size(); }

  VoxelIndex world_to_index(const Vec3& p) const;
  Vec3 center(const VoxelIndex& idx) const;

  const std::unordered_map<VoxelIndex, VoxelClass, VoxelIndexHash>& occupied() const {
    return occupied_;
  }

  std::vector<ElevatorInfo>& elevators() { return elevators_; }
  const std::vector<ElevatorInfo>& elevators() const { return elevators_; }
  const ElevatorInfo* elevator_at(const VoxelIndex& idx) const;

  /// Nearest occupied voxel to a world point, or nullptr-like false pair when
  /// the map is empty. Linear scan; desk-scale maps.
  bool snap(const Vec3& p, double max_distance, VoxelIndex& out) const;

 private:
  double resolution_ = 0.3;
  Vec3 origin_ = Vec3::Zero();
  std::unordered_map<VoxelIndex, VoxelClass, VoxelIndexHash> occupied_;
  std::vector<ElevatorInfo> elevators_;
};

/// Points of a scan with channel at or below the bound; assumes the sensor is
/// mounted parallel to the ground so low rings return floor hits.
std::vector<ScanPoint> extract_ground(const Scan& scan, int max_ground_channel);

/// Builds the traversable set from a classified world-frame cloud:
///  - ground points keep one corridor voxel per column, at the lowest hit;
///  - elevator-shell points collapse to one vertical stack per shaft;
///  - remaining points keep the n_z best-populated voxels per column (stairs).
/// Class precedence on collisions: elevator, then corridor, then stair.
VoxelMap voxelize(const std::vector<ClassifiedPoint>& points,
                  const VoxelizeConfig& cfg);

VoxelMap load_voxel_map(const std::string& path);
void save_voxel_map(const std::string& path, const VoxelMap& map);

}  // namespace mfnav

#endif  // MFNAV_VOXEL_MAP_HPP_
