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

#include "mfnav/voxel_map.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"

namespace mfnav {

char voxel_class_char(VoxelClass c) {
  switch (c) {
    case VoxelClass::kCorridor: return 'C';
    case VoxelClass::kStair: return 'S';
    case VoxelClass::kElevator: return 'E';
  }
  return '?';
}

VoxelClass voxel_class_from_char(char c) {
  switch (c) {
    case 'C': return VoxelClass::kCorridor;
    case 'S': return VoxelClass::kStair;
    case 'E': return VoxelClass::kElevator;
    default: throw ValidationError(std::string("unknown voxel class '") + c + "'");
  }
}

namespace {
int class_rank(VoxelClass c) {
  // Higher wins when several sources claim one voxel.
  switch (c) {
    case VoxelClass::kElevator: return 2;
    case VoxelClass::kCorridor: return 1;
    case VoxelClass::kStair: return 0;
  }
  return -1;
}
}  // namespace

void VoxelMap::insert(const VoxelIndex& idx, VoxelClass cls) {
  auto [it, inserted] = occupied_.try_emplace(idx, cls);
  if (!inserted && class_rank(cls) > class_rank(it->second)) {
    it->second = cls;
  }
}

const VoxelClass* VoxelMap::find(const VoxelIndex& idx) const {
  auto it = occupied_.find(idx);
  return it == occupied_.end() ? nullptr : &it->second;
}

VoxelIndex VoxelMap::world_to_index(const Vec3& p) const {
  const Vec3 rel = (p - origin_) / resolution_;
  return {static_cast<int>(std::floor(rel.x())),
          static_cast<int>(std::floor(rel.y())),
          static_cast<int>(std::floor(rel.z()))};
}

Vec3 VoxelMap::center(const VoxelIndex& idx) const {
  return origin_ + resolution_ * Vec3(idx.i + 0.5, idx.j + 0.5, idx.k + 0.5);
}

const ElevatorInfo* VoxelMap::elevator_at(const VoxelIndex& idx) const {
  for (const auto& e : elevators_) {
    if (e.column_i == idx.i && e.column_j == idx.j && idx.k >= e.k_min &&
        idx.k <= e.k_max) {
      return &e;
    }
  }
  return nullptr;
}

bool VoxelMap::snap(const Vec3& p, double max_distance, VoxelIndex& out) const {
  bool found = false;
  double best_d2 = max_distance * max_distance;
  VoxelIndex best{};
  for (const auto& [idx, cls] : occupied_) {
    (void)cls;
    const double d2 = (center(idx) - p).squaredNorm();
    if (d2 < best_d2 || (d2 == best_d2 && found && idx < best)) {
      best_d2 = d2;
      best = idx;
      found = true;
    }
  }
  if (found) out = best;
  return found;
}

std::vector<ScanPoint> extract_ground(const Scan& scan, int max_ground_channel) {
  if (scan.points.empty()) {
    throw std::invalid_argument("extract_ground: empty scan");
  }
  std::vector<ScanPoint> out;
  for (const auto& pt : scan.points) {
    if (pt.channel <= max_ground_channel) out.push_back(pt);
  }
  return out;
}

namespace {

struct Column {
  int i, j;
  bool operator<(const Column& o) const { return std::tie(i, j) < std::tie(o.i, o.j); }
};

// Connected components of the occupied (i, j) footprint, 8-connected. Returns
// one sorted cell list per component, components ordered by smallest cell.
std::vector<std::vector<Column>> footprint_components(const std::set<Column>& cells) {
  std::vector<std::vector<Column>> comps;
  std::set<Column> open(cells);
  while (!open.empty()) {
    std::vector<Column> comp;
    std::deque<Column> queue{*open.begin()};
    open.erase(open.begin());
    while (!queue.empty()) {
      const Column c = queue.front();
      queue.pop_front();
      comp.push_back(c);
      for (int di = -1; di <= 1; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const Column n{c.i + di, c.j + dj};
          auto it = open.find(n);
          if (it != open.end()) {
            open.erase(it);
            queue.push_back(n);
          }
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  std::sort(comps.begin(), comps.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return comps;
}

}  // namespace

VoxelMap voxelize(const std::vector<ClassifiedPoint>& points,
                  const VoxelizeConfig& cfg) {
  if (points.empty()) {
    throw std::invalid_argument("voxelize: empty point set");
  }
  Vec3 min_p = points.front().p;
  for (const auto& cp : points) min_p = min_p.cwiseMin(cp.p);
  // Snap the origin to the resolution grid so equal inputs land on equal
  // indices across runs.
  const Vec3 origin(std::floor(min_p.x() / cfg.resolution) * cfg.resolution,
                    std::floor(min_p.y() / cfg.resolution) * cfg.resolution,
                    std::floor(min_p.z() / cfg.resolution) * cfg.resolution);
  VoxelMap map(cfg.resolution, origin);

  // Ground: lowest occupied voxel per column becomes the corridor bottom.
  std::map<Column, int> lowest_ground;
  // Other: per-column per-level point counts for the stair filter.
  std::map<Column, std::map<int, int>> other_counts;
  // Elevator shells: occupied voxels plus point accumulators per footprint.
  std::set<Column> elev_footprint;
  std::map<Column, std::pair<double, double>> elev_z_range;
  std::map<Column, std::pair<Vec3, int>> elev_centroid;

  for (const auto& cp : points) {
    const VoxelIndex idx = map.world_to_index(cp.p);
    const Column col{idx.i, idx.j};
    switch (cp.cls) {
      case PointClass::kGround: {
        auto [it, inserted] = lowest_ground.try_emplace(col, idx.k);
        if (!inserted) it->second = std::min(it->second, idx.k);
        break;
      }
      case PointClass::kOther:
        other_counts[col][idx.k] += 1;
        break;
      case PointClass::kElevatorSynth: {
        elev_footprint.insert(col);
        auto [zit, zin] = elev_z_range.try_emplace(col, cp.p.z(), cp.p.z());
        if (!zin) {
          zit->second.first = std::min(zit->second.first, cp.p.z());
          zit->second.second = std::max(zit->second.second, cp.p.z());
        }
        auto [cit, cin] = elev_centroid.try_emplace(col, cp.p, 1);
        if (!cin) {
          cit->second.first += cp.p;
          cit->second.second += 1;
        }
        break;
      }
    }
  }

  // Elevator shells collapse to one vertical stack per shaft; a robot cannot
  // move sideways inside a cab, so the stack is the whole representation.
  const auto shafts = footprint_components(elev_footprint);
  int elevator_seq = 0;
  for (const auto& shaft : shafts) {
    Vec3 sum = Vec3::Zero();
    int n = 0;
    double z_min = 0.0, z_max = 0.0;
    bool first = true;
    for (const Column& c : shaft) {
      const auto& acc = elev_centroid.at(c);
      sum += acc.first;
      n += acc.second;
      const auto& zr = elev_z_range.at(c);
      z_min = first ? zr.first : std::min(z_min, zr.first);
      z_max = first ? zr.second : std::max(z_max, zr.second);
      first = false;
    }
    const Vec3 centroid = sum / static_cast<double>(n);
    const VoxelIndex col_idx = map.world_to_index(Vec3(centroid.x(), centroid.y(), z_min));
    ElevatorInfo info;
    info.id = "e" + std::to_string(elevator_seq++);
    info.column_i = col_idx.i;
    info.column_j = col_idx.j;
    info.k_min = col_idx.k;
    info.k_max = map.world_to_index(Vec3(centroid.x(), centroid.y(), z_max)).k;
    info.initial_z = map.center({info.column_i, info.column_j, info.k_min}).z();
    for (int k = info.k_min; k <= info.k_max; ++k) {
      map.insert({info.column_i, info.column_j, k}, VoxelClass::kElevator);
    }
    map.elevators().push_back(info);
  }

  for (const auto& [col, k] : lowest_ground) {
    map.insert({col.i, col.j, k}, VoxelClass::kCorridor);
  }

  // Stairs: keep the n_z best-populated levels of each remaining column.
  for (const auto& [col, counts] : other_counts) {
    std::vector<std::pair<int, int>> ranked;  // (count, k)
    ranked.reserve(counts.size());
    for (const auto& [k, count] : counts) ranked.emplace_back(count, k);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    const std::size_t keep = std::min<std::size_t>(ranked.size(), cfg.n_z);
    for (std::size_t r = 0; r < keep; ++r) {
      map.insert({col.i, col.j, ranked[r].second}, VoxelClass::kStair);
    }
  }

  return map;
}

VoxelMap load_voxel_map(const std::string& path) {
  const auto lines = read_lines(path);
  double resolution = 0.0;
  Vec3 origin = Vec3::Zero();
  std::vector<ElevatorInfo> elevators;
  std::vector<std::pair<VoxelIndex, VoxelClass>> voxels;
  for (const auto& line : lines) {
    if (line.empty()) continue;
    const auto tok = split_ws(line);
    if (tok[0] == "resolution") {
      if (tok.size() != 2) throw ValidationError(path + ": bad resolution line");
      resolution = parse_double(tok[1], path);
    } else if (tok[0] == "origin") {
      if (tok.size() != 4) throw ValidationError(path + ": bad origin line");
      origin = Vec3(parse_double(tok[1], path), parse_double(tok[2], path),
                    parse_double(tok[3], path));
    } else if (tok[0] == "elevator") {
      if (tok.size() != 7) throw ValidationError(path + ": bad elevator line");
      ElevatorInfo e;
      e.id = tok[1];
      e.column_i = static_cast<int>(parse_long(tok[2], path));
      e.column_j = static_cast<int>(parse_long(tok[3], path));
      e.k_min = static_cast<int>(parse_long(tok[4], path));
      e.k_max = static_cast<int>(parse_long(tok[5], path));
      e.initial_z = parse_double(tok[6], path);
      elevators.push_back(e);
    } else {
      if (tok.size() != 4 || tok[3].size() != 1) {
        throw ValidationError(path + ": bad voxel line '" + line + "'");
      }
      VoxelIndex idx{static_cast<int>(parse_long(tok[0], path)),
                     static_cast<int>(parse_long(tok[1], path)),
                     static_cast<int>(parse_long(tok[2], path))};
      voxels.emplace_back(idx, voxel_class_from_char(tok[3][0]));
    }
  }
  if (resolution <= 0.0) throw ValidationError(path + ": missing resolution");
  VoxelMap map(resolution, origin);
  map.elevators() = elevators;
  for (const auto& [idx, cls] : voxels) map.insert(idx, cls);
  return map;
}

void save_voxel_map(const std::string& path, const VoxelMap& map) {
  std::ostringstream os;
  os << "resolution " << format_double(map.resolution()) << '\n';
  os << "origin " << format_double(map.origin().x()) << ' '
     << format_double(map.origin().y()) << ' ' << format_double(map.origin().z())
     << '\n';
  auto elevators = map.elevators();
  std::sort(elevators.begin(), elevators.end(),
            [](const ElevatorInfo& a, const ElevatorInfo& b) { return a.id < b.id; });
  for (const auto& e : elevators) {
    os << "elevator " << e.id << ' ' << e.column_i << ' ' << e.column_j << ' '
       << e.k_min << ' ' << e.k_max << ' ' << format_double(e.initial_z) << '\n';
  }
  std::vector<std::pair<VoxelIndex, VoxelClass>> voxels(map.occupied().begin(),
                                                        map.occupied().end());
  std::sort(voxels.begin(), voxels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [idx, cls] : voxels) {
    os << idx.i << ' ' << idx.j << ' ' << idx.k << ' ' << voxel_class_char(cls)
       << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace mfnav
