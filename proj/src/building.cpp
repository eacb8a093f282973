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

#include "mfnav/building.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfnav/errors.hpp"

namespace mfnav {

namespace {

constexpr double kWallThickness = 0.1;
constexpr double kSlabThickness = 0.1;
constexpr double kStepThickness = 0.25;
constexpr double kDoorWidth = 1.0;
constexpr double kDoorHeight = 2.1;
constexpr double kCabInset = 0.3;
constexpr double kEps = 1e-9;

struct Interval {
  double a, b;
};

// Subtracts the open segments from [a, b]; returns the remaining pieces.
std::vector<Interval> subtract(Interval base, std::vector<Interval> holes) {
  std::sort(holes.begin(), holes.end(),
            [](const Interval& u, const Interval& v) { return u.a < v.a; });
  std::vector<Interval> out;
  double cursor = base.a;
  for (const auto& h : holes) {
    const double lo = std::max(h.a, base.a);
    const double hi = std::min(h.b, base.b);
    if (hi <= cursor + kEps) continue;
    if (lo > cursor + kEps) out.push_back({cursor, lo});
    cursor = std::max(cursor, hi);
  }
  if (base.b > cursor + kEps) out.push_back({cursor, base.b});
  return out;
}

int step_count(const BuildingSpec& spec) {
  if (!spec.stairwell) return 0;
  return static_cast<int>(std::lround(spec.floor_height / spec.stairwell->step_rise));
}

}  // namespace

std::vector<std::vector<Rect>> BuildingSpec::uniform_corridors(
    int floors, const std::vector<Rect>& rects) {
  return std::vector<std::vector<Rect>>(floors, rects);
}

bool raycast(const std::vector<Box>& boxes, const Vec3& origin, const Vec3& dir,
             double max_range, double& t_hit) {
  // Slab method per box; nearest positive entry wins.
  double best = max_range;
  bool hit = false;
  for (const auto& box : boxes) {
    double t_near = 0.0;
    double t_far = best;
    bool miss = false;
    for (int axis = 0; axis < 3 && !miss; ++axis) {
      const double o = origin[axis];
      const double d = dir[axis];
      if (std::abs(d) < 1e-15) {
        if (o < box.lo[axis] || o > box.hi[axis]) miss = true;
        continue;
      }
      double t0 = (box.lo[axis] - o) / d;
      double t1 = (box.hi[axis] - o) / d;
      if (t0 > t1) std::swap(t0, t1);
      t_near = std::max(t_near, t0);
      t_far = std::min(t_far, t1);
      if (t_near > t_far) miss = true;
    }
    if (!miss && t_near > 1e-6 && t_near < best) {
      best = t_near;
      hit = true;
    }
  }
  t_hit = best;
  return hit;
}

const ElevatorSpec* elevator_cab_at(const BuildingSpec& spec, double x, double y) {
  for (const auto& e : spec.elevators) {
    if (e.footprint.inset(kCabInset).contains(x, y)) return &e;
  }
  return nullptr;
}

BuildingGeometry generate_building(const BuildingSpec& spec,
                                   const VoxelizeConfig& voxel_cfg) {
  std::vector<std::string> violations;
  if (spec.floors < 1) violations.push_back("floors must be >= 1");
  if (spec.floor_height <= 0) violations.push_back("floor_height must be positive");
  if (static_cast<int>(spec.corridors.size()) != spec.floors) {
    violations.push_back("corridors must list one rect set per floor");
  }
  for (const auto& floor_rects : spec.corridors) {
    for (const auto& r : floor_rects) {
      if (r.x1 <= r.x0 || r.y1 <= r.y0) violations.push_back("degenerate corridor rect");
      else if (r.width() < 1.8 - kEps) {
        std::ostringstream os;
        os << "corridor width " << r.width() << " below 1.8 m";
        violations.push_back(os.str());
      }
    }
  }
  if (spec.stairwell) {
    const auto& st = *spec.stairwell;
    const int n = step_count(spec);
    if (n < 1 || std::abs(n * st.step_rise - spec.floor_height) > 1e-6) {
      violations.push_back("stair rise times step count must equal floor_height");
    }
    if (n * st.step_run > (st.footprint.x1 - st.footprint.x0) + kEps) {
      violations.push_back("stair flight does not fit its footprint");
    }
  }
  for (const auto& e : spec.elevators) {
    if (e.footprint.x1 - e.footprint.x0 < 1.5 - kEps ||
        e.footprint.y1 - e.footprint.y0 < 1.5 - kEps) {
      violations.push_back("elevator footprint " + e.id + " below 1.5 x 1.5 m");
    }
    if (e.lowest_floor < 0 || e.highest_floor >= spec.floors ||
        e.lowest_floor >= e.highest_floor) {
      violations.push_back("elevator " + e.id + " serves an invalid floor range");
    }
    if (e.initial_floor < e.lowest_floor || e.initial_floor > e.highest_floor) {
      violations.push_back("elevator " + e.id + " starts outside its served range");
    }
  }
  if (!violations.empty()) {
    std::string all = "building spec invalid:";
    for (const auto& v : violations) all += "\n  - " + v;
    throw ValidationError(all);
  }

  BuildingGeometry geom;
  geom.spec = spec;

  const double res = voxel_cfg.resolution;
  // Origin z pinned to the ground floor surface so story heights index
  // consistently; x,y snapped to the grid below the building bounds.
  double min_x = 1e30, min_y = 1e30;
  auto track = [&](const Rect& r) {
    min_x = std::min(min_x, r.x0);
    min_y = std::min(min_y, r.y0);
  };
  for (const auto& floor_rects : spec.corridors)
    for (const auto& r : floor_rects) track(r);
  if (spec.stairwell) track(spec.stairwell->footprint);
  for (const auto& e : spec.elevators) track(e.footprint);
  const Vec3 origin(std::floor((min_x - 1.0) / res) * res,
                    std::floor((min_y - 1.0) / res) * res, 0.0);
  geom.truth = VoxelMap(res, origin);

  auto emit_columns = [&](const Rect& r, double z, VoxelClass cls) {
    const VoxelIndex lo = geom.truth.world_to_index(Vec3(r.x0, r.y0, z));
    const VoxelIndex hi = geom.truth.world_to_index(Vec3(r.x1, r.y1, z));
    for (int i = lo.i; i <= hi.i; ++i) {
      for (int j = lo.j; j <= hi.j; ++j) {
        const Vec3 c = geom.truth.center({i, j, lo.k});
        if (r.contains(c.x(), c.y())) geom.truth.insert({i, j, lo.k}, cls);
      }
    }
  };

  // Floor slabs and their walls, per floor.
  for (int f = 0; f < spec.floors; ++f) {
    const double zf = spec.floor_z(f);
    const auto& rects = spec.corridors[f];
    for (const auto& r : rects) {
      geom.boxes.push_back({Vec3(r.x0, r.y0, zf - kSlabThickness), Vec3(r.x1, r.y1, zf)});
      emit_columns(r, zf, VoxelClass::kCorridor);
    }

    // Walls per rect edge, minus abutting rects / the stairwell opening /
    // elevator doorways.
    for (std::size_t a = 0; a < rects.size(); ++a) {
      const Rect& r = rects[a];
      // Sides: 0 -y, 1 +y, 2 -x, 3 +x.
      for (int side = 0; side < 4; ++side) {
        const bool along_x = side < 2;
        const Interval base = along_x ? Interval{r.x0, r.x1} : Interval{r.y0, r.y1};
        const double edge_coord = side == 0 ? r.y0 : side == 1 ? r.y1
                                  : side == 2 ? r.x0 : r.x1;
        std::vector<Interval> holes;
        auto maybe_hole = [&](double other_lo_edge, double other_hi_edge,
                              Interval other_span) {
          // An abutting rect (shared edge line, overlapping span) opens the wall.
          const bool touches = std::abs(other_lo_edge - edge_coord) < 1e-6 ||
                               std::abs(other_hi_edge - edge_coord) < 1e-6;
          if (!touches) return;
          const double lo = std::max(base.a, other_span.a);
          const double hi = std::min(base.b, other_span.b);
          if (hi - lo > 1e-6) holes.push_back({lo, hi});
        };
        for (std::size_t b = 0; b < rects.size(); ++b) {
          if (a == b) continue;
          const Rect& o = rects[b];
          if (along_x) maybe_hole(o.y0, o.y1, {o.x0, o.x1});
          else maybe_hole(o.x0, o.x1, {o.y0, o.y1});
        }
        if (spec.stairwell) {
          const Rect& o = spec.stairwell->footprint;
          if (along_x) maybe_hole(o.y0, o.y1, {o.x0, o.x1});
          else maybe_hole(o.x0, o.x1, {o.y0, o.y1});
        }
        for (const auto& e : spec.elevators) {
          // Doorway only; the shaft erects its own walls.
          const Rect& o = e.footprint;
          if (f < e.lowest_floor || f > e.highest_floor) continue;
          const double door_mid = 0.5 * (o.x0 + o.x1);
          if (along_x) {
            maybe_hole(o.y0, o.y1,
                       {door_mid - 0.5 * kDoorWidth, door_mid + 0.5 * kDoorWidth});
          }
        }
        for (const auto& piece : subtract(base, holes)) {
          Box wall;
          if (along_x) {
            wall.lo = Vec3(piece.a, edge_coord - (side == 0 ? kWallThickness : 0),
                           zf);
            wall.hi = Vec3(piece.b, edge_coord + (side == 1 ? kWallThickness : 0),
                           zf + spec.wall_height);
          } else {
            wall.lo = Vec3(edge_coord - (side == 2 ? kWallThickness : 0), piece.a,
                           zf);
            wall.hi = Vec3(edge_coord + (side == 3 ? kWallThickness : 0), piece.b,
                           zf + spec.wall_height);
          }
          geom.boxes.push_back(wall);
        }
      }
    }
  }

  // Stairwell: enclosing walls on three sides (lower y edge open to the
  // corridor), one floating flight per story, truth voxels on step tops.
  if (spec.stairwell) {
    const auto& st = *spec.stairwell;
    const Rect& fp = st.footprint;
    const int n = step_count(spec);
    const double top_z = spec.floor_z(spec.floors - 1) + spec.wall_height;
    geom.boxes.push_back({Vec3(fp.x0 - kWallThickness, fp.y0, 0), Vec3(fp.x0, fp.y1, top_z)});
    geom.boxes.push_back({Vec3(fp.x1, fp.y0, 0), Vec3(fp.x1 + kWallThickness, fp.y1, top_z)});
    geom.boxes.push_back({Vec3(fp.x0 - kWallThickness, fp.y1, 0),
                          Vec3(fp.x1 + kWallThickness, fp.y1 + kWallThickness, top_z)});
    for (int story = 0; story + 1 < spec.floors; ++story) {
      const double base_z = spec.floor_z(story);
      for (int s = 1; s <= n; ++s) {
        const double step_top = base_z + s * st.step_rise;
        const Rect step{fp.x0 + (s - 1) * st.step_run, fp.y0,
                        fp.x0 + s * st.step_run, fp.y1};
        geom.boxes.push_back({Vec3(step.x0, step.y0, step_top - kStepThickness),
                              Vec3(step.x1, step.y1, step_top)});
        emit_columns(step, step_top, VoxelClass::kStair);
      }
    }
  }

  // Elevator shafts: full-height walls with doorways, one truth column per
  // shaft at the cab centerline.
  for (const auto& e : spec.elevators) {
    const Rect& fp = e.footprint;
    const double z_lo = spec.floor_z(e.lowest_floor) - kSlabThickness;
    const double z_hi = spec.floor_z(e.highest_floor) + spec.wall_height;
    geom.boxes.push_back({Vec3(fp.x0 - kWallThickness, fp.y0 - kWallThickness, z_lo),
                          Vec3(fp.x0, fp.y1 + kWallThickness, z_hi)});
    geom.boxes.push_back({Vec3(fp.x1, fp.y0 - kWallThickness, z_lo),
                          Vec3(fp.x1 + kWallThickness, fp.y1 + kWallThickness, z_hi)});
    geom.boxes.push_back({Vec3(fp.x0, fp.y1, z_lo),
                          Vec3(fp.x1, fp.y1 + kWallThickness, z_hi)});
    // Front wall (lower y edge): segments beside the door, lintel above it.
    const double door_mid = 0.5 * (fp.x0 + fp.x1);
    const double dx0 = door_mid - 0.5 * kDoorWidth;
    const double dx1 = door_mid + 0.5 * kDoorWidth;
    geom.boxes.push_back({Vec3(fp.x0, fp.y0 - kWallThickness, z_lo),
                          Vec3(dx0, fp.y0, z_hi)});
    geom.boxes.push_back({Vec3(dx1, fp.y0 - kWallThickness, z_lo),
                          Vec3(fp.x1, fp.y0, z_hi)});
    for (int f = e.lowest_floor; f <= e.highest_floor; ++f) {
      const double lintel_lo = spec.floor_z(f) + kDoorHeight;
      const double lintel_hi =
          f == e.highest_floor ? z_hi : spec.floor_z(f + 1);
      geom.boxes.push_back({Vec3(dx0, fp.y0 - kWallThickness, lintel_lo),
                            Vec3(dx1, fp.y0, lintel_hi)});
    }

    const double cx = 0.5 * (fp.x0 + fp.x1);
    const double cy = 0.5 * (fp.y0 + fp.y1);
    const VoxelIndex bottom =
        geom.truth.world_to_index(Vec3(cx, cy, spec.floor_z(e.lowest_floor)));
    const VoxelIndex top =
        geom.truth.world_to_index(Vec3(cx, cy, spec.floor_z(e.highest_floor)));
    ElevatorInfo info;
    info.id = e.id;
    info.column_i = bottom.i;
    info.column_j = bottom.j;
    info.k_min = bottom.k;
    info.k_max = top.k;
    info.initial_z = spec.floor_z(e.initial_floor);
    for (int k = info.k_min; k <= info.k_max; ++k) {
      geom.truth.insert({info.column_i, info.column_j, k}, VoxelClass::kElevator);
    }
    geom.truth.elevators().push_back(info);
  }

  return geom;
}

}  // namespace mfnav
