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

#include "mfnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"

namespace mfnav {

const char* move_mode_name(MoveMode mode) {
  switch (mode) {
    case MoveMode::kWalk: return "WALK";
    case MoveMode::kStair: return "STAIR";
    case MoveMode::kWait: return "WAIT";
    case MoveMode::kElev: return "ELEV";
  }
  return "?";
}

MoveMode move_mode_from_name(const std::string& name) {
  if (name == "WALK") return MoveMode::kWalk;
  if (name == "STAIR") return MoveMode::kStair;
  if (name == "WAIT") return MoveMode::kWait;
  if (name == "ELEV") return MoveMode::kElev;
  throw ValidationError("unknown trajectory mode '" + name + "'");
}

bool accessible(const VoxelMap& map, const VoxelIndex& from, const VoxelIndex& to) {
  const VoxelClass* from_cls = map.find(from);
  if (from_cls == nullptr) {
    throw std::invalid_argument("accessible: source voxel not in the map");
  }
  const int di = to.i - from.i;
  const int dj = to.j - from.j;
  const int dk = to.k - from.k;
  const int cheb = std::max({std::abs(di), std::abs(dj), std::abs(dk)});
  if (cheb != 1) return false;

  const VoxelClass* to_cls = map.find(to);
  if (to_cls == nullptr) return false;

  if (di == 0 && dj == 0) {
    // Pure vertical: only inside an elevator stack.
    return *from_cls == VoxelClass::kElevator && *to_cls == VoxelClass::kElevator;
  }
  if (dk == 0) {
    if (di != 0 && dj != 0) {
      // No corner cutting past missing orthogonal neighbours.
      return map.contains({from.i + di, from.j, from.k}) &&
             map.contains({from.i, from.j + dj, from.k});
    }
    return true;
  }
  // Climbing move: one horizontal axis plus one level, through a stair voxel.
  if (di != 0 && dj != 0) return false;
  return *from_cls == VoxelClass::kStair || *to_cls == VoxelClass::kStair;
}

namespace {

struct StateHash {
  std::size_t operator()(const SearchState& s) const {
    std::size_t h = VoxelIndexHash()(s.idx);
    h ^= std::hash<int>()(s.riding) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

// Cab heights per map elevator, map metadata overridden by config.
std::vector<double> effective_elevator_z(const VoxelMap& map, const PlanConfig& cfg) {
  std::vector<double> out;
  out.reserve(map.elevators().size());
  for (const auto& e : map.elevators()) {
    auto it = cfg.elevator_z.find(e.id);
    out.push_back(it != cfg.elevator_z.end() ? it->second : e.initial_z);
  }
  return out;
}

int elevator_index_at(const VoxelMap& map, const VoxelIndex& idx) {
  const auto& elevators = map.elevators();
  for (std::size_t n = 0; n < elevators.size(); ++n) {
    const auto& e = elevators[n];
    if (e.column_i == idx.i && e.column_j == idx.j && idx.k >= e.k_min &&
        idx.k <= e.k_max) {
      return static_cast<int>(n);
    }
  }
  return -1;
}

double heuristic_impl(const SearchState& state, const VoxelIndex& goal,
                      const VoxelMap& map, const PlanConfig& cfg,
                      const std::vector<double>& elevator_z) {
  const VoxelClass* cls = map.find(state.idx);
  const Vec3 here = map.center(state.idx);
  const Vec3 there = map.center(goal);
  if (cls != nullptr && *cls == VoxelClass::kElevator) {
    const int e = elevator_index_at(map, state.idx);
    double waiting = 0.0;
    if (state.riding < 0 && e >= 0) {
      waiting = std::abs(elevator_z[e] - here.z()) / cfg.v_elv;
    }
    const double operating = std::abs(there.z() - here.z()) / cfg.v_elv;
    return waiting + operating;
  }
  return (there - here).norm() / cfg.v_rbt;
}

struct QueueEntry {
  double f;
  double h;
  SearchState state;
};

struct QueueOrder {
  bool operator()(const QueueEntry& a, const QueueEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    if (a.h != b.h) return a.h > b.h;
    return b.state < a.state;
  }
};

struct Transition {
  SearchState state;
  double cost;
  MoveMode mode;
};

// Fixed-order neighbour expansion; determinism depends on it.
void expand(const VoxelMap& map, const PlanConfig& cfg,
            const std::vector<double>& elevator_z, const SearchState& s,
            std::vector<Transition>& out) {
  out.clear();
  const Vec3 here = map.center(s.idx);
  if (s.riding < 0) {
    static constexpr int kHorizontal[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                              {0, 1},   {1, -1}, {1, 0},  {1, 1}};
    for (const auto& d : kHorizontal) {
      const VoxelIndex to{s.idx.i + d[0], s.idx.j + d[1], s.idx.k};
      if (!accessible(map, s.idx, to)) continue;
      out.push_back({{to, -1}, (map.center(to) - here).norm() / cfg.v_rbt,
                     MoveMode::kWalk});
    }
    static constexpr int kClimb[8][3] = {{-1, 0, -1}, {-1, 0, 1}, {0, -1, -1},
                                         {0, -1, 1},  {0, 1, -1}, {0, 1, 1},
                                         {1, 0, -1},  {1, 0, 1}};
    for (const auto& d : kClimb) {
      const VoxelIndex to{s.idx.i + d[0], s.idx.j + d[1], s.idx.k + d[2]};
      if (!accessible(map, s.idx, to)) continue;
      out.push_back({{to, -1}, (map.center(to) - here).norm() / cfg.v_rbt,
                     MoveMode::kStair});
    }
    const int e = elevator_index_at(map, s.idx);
    if (e >= 0) {
      // Boarding pays the cab's travel to this floor once.
      const double waiting = std::abs(elevator_z[e] - here.z()) / cfg.v_elv;
      out.push_back({{s.idx, e}, waiting, MoveMode::kWait});
    }
  } else {
    for (int dk : {-1, 1}) {
      const VoxelIndex to{s.idx.i, s.idx.j, s.idx.k + dk};
      if (!accessible(map, s.idx, to)) continue;
      out.push_back({{to, s.riding},
                     std::abs(map.center(to).z() - here.z()) / cfg.v_elv,
                     MoveMode::kElev});
    }
    out.push_back({{s.idx, -1}, 0.0, MoveMode::kWalk});  // alighting is free
  }
}

struct SearchOutput {
  Trajectory trajectory;
  // Last elevator voxel ridden per elevator index, for cab-state propagation.
  std::map<int, double> alight_z;
};

SearchOutput astar_impl(const VoxelMap& map, const VoxelIndex& start,
                        const VoxelIndex& goal, const PlanConfig& cfg,
                        const std::vector<double>& elevator_z) {
  if (!map.contains(start) || !map.contains(goal)) {
    throw std::invalid_argument("astar: start or goal voxel not in the map");
  }

  std::unordered_map<SearchState, double, StateHash> g;
  std::unordered_map<SearchState, std::pair<SearchState, MoveMode>, StateHash> parent;
  std::unordered_set<SearchState, StateHash> closed;
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, QueueOrder> open;

  const SearchState start_state{start, -1};
  g[start_state] = 0.0;
  open.push({heuristic_impl(start_state, goal, map, cfg, elevator_z),
             heuristic_impl(start_state, goal, map, cfg, elevator_z), start_state});

  std::vector<Transition> transitions;
  bool found = false;
  SearchState goal_state;
  while (!open.empty()) {
    const QueueEntry top = open.top();
    open.pop();
    if (closed.count(top.state) > 0) continue;
    closed.insert(top.state);
    if (top.state.idx == goal) {
      found = true;
      goal_state = top.state;
      break;
    }
    const double g_here = g.at(top.state);
    expand(map, cfg, elevator_z, top.state, transitions);
    for (const auto& tr : transitions) {
      if (closed.count(tr.state) > 0) continue;
      const double tentative = g_here + tr.cost;
      auto it = g.find(tr.state);
      if (it != g.end() && it->second <= tentative) continue;
      g[tr.state] = tentative;
      parent[tr.state] = {top.state, tr.mode};
      const double h = heuristic_impl(tr.state, goal, map, cfg, elevator_z);
      open.push({tentative + h, h, tr.state});
    }
  }

  if (!found) {
    std::ostringstream os;
    os << "astar: no route from (" << start.i << ' ' << start.j << ' ' << start.k
       << ") to (" << goal.i << ' ' << goal.j << ' ' << goal.k << "); explored "
       << closed.size() << " states";
    throw UnreachableError(os.str());
  }

  // Reconstruct; same-voxel zero-duration transitions (free alights, boarding
  // with the cab already present) collapse away.
  std::vector<std::tuple<SearchState, double, MoveMode>> chain;
  SearchState cur = goal_state;
  while (true) {
    auto it = parent.find(cur);
    chain.emplace_back(cur, g.at(cur), it == parent.end() ? MoveMode::kWalk
                                                          : it->second.second);
    if (it == parent.end()) break;
    cur = it->second.first;
  }
  std::reverse(chain.begin(), chain.end());

  SearchOutput out;
  for (const auto& [state, time, mode] : chain) {
    if (state.riding >= 0 && map.find(state.idx) != nullptr) {
      out.alight_z[state.riding] = map.center(state.idx).z();
    }
    Waypoint wp{map.center(state.idx), time, mode};
    if (!out.trajectory.waypoints.empty()) {
      const Waypoint& last = out.trajectory.waypoints.back();
      if (last.t == wp.t && last.position == wp.position) continue;
    }
    out.trajectory.waypoints.push_back(wp);
  }
  out.trajectory.total_time = g.at(goal_state);
  out.trajectory.legs = {{0, out.trajectory.waypoints.size() - 1}};
  return out;
}

}  // namespace

double heuristic(const SearchState& state, const VoxelIndex& goal,
                 const VoxelMap& map, const PlanConfig& cfg) {
  return heuristic_impl(state, goal, map, cfg, effective_elevator_z(map, cfg));
}

Trajectory astar(const VoxelMap& map, const VoxelIndex& start,
                 const VoxelIndex& goal, const PlanConfig& cfg) {
  return astar_impl(map, start, goal, cfg, effective_elevator_z(map, cfg)).trajectory;
}

Trajectory plan_multi(const VoxelMap& map, const std::vector<VoxelIndex>& waypoints,
                      bool return_to_start, const PlanConfig& cfg) {
  if (waypoints.size() < 2) {
    throw std::invalid_argument("plan_multi: need at least two waypoints");
  }
  std::vector<VoxelIndex> stops = waypoints;
  if (return_to_start) stops.push_back(waypoints.front());

  std::vector<double> elevator_z = effective_elevator_z(map, cfg);
  Trajectory merged;
  double offset = 0.0;
  for (std::size_t leg = 0; leg + 1 < stops.size(); ++leg) {
    SearchOutput out;
    try {
      out = astar_impl(map, stops[leg], stops[leg + 1], cfg, elevator_z);
    } catch (const UnreachableError& e) {
      throw UnreachableError("plan_multi: leg " + std::to_string(leg) + ": " +
                             e.what());
    }
    for (const auto& [e, z] : out.alight_z) elevator_z[e] = z;

    const std::size_t first = merged.waypoints.empty() ? 0 : merged.waypoints.size();
    for (std::size_t n = 0; n < out.trajectory.waypoints.size(); ++n) {
      if (n == 0 && !merged.waypoints.empty()) continue;  // joins previous leg end
      Waypoint wp = out.trajectory.waypoints[n];
      wp.t += offset;
      merged.waypoints.push_back(wp);
    }
    offset += out.trajectory.total_time;
    merged.legs.emplace_back(first == 0 ? 0 : first - 1,
                             merged.waypoints.size() - 1);
  }
  merged.total_time = offset;
  return merged;
}

std::vector<VoxelIndex> order_destinations(const VoxelMap& map,
                                           const VoxelIndex& start,
                                           const std::vector<VoxelIndex>& destinations,
                                           const PlanConfig& cfg) {
  if (destinations.empty()) return {};
  if (destinations.size() > 8) {
    throw std::invalid_argument(
        "order_destinations: exhaustive search limited to 8 destinations");
  }

  std::vector<VoxelIndex> order(destinations);
  std::sort(order.begin(), order.end());

  // Legs repeat across permutations; memoize on endpoints plus cab state.
  using LegKey = std::tuple<VoxelIndex, VoxelIndex, std::vector<double>>;
  std::map<LegKey, std::pair<double, std::map<int, double>>> memo;
  auto leg_cost = [&](const VoxelIndex& from, const VoxelIndex& to,
                      std::vector<double>& elevator_z) {
    const LegKey key{from, to, elevator_z};
    auto it = memo.find(key);
    if (it == memo.end()) {
      const SearchOutput out = astar_impl(map, from, to, cfg, elevator_z);
      it = memo.emplace(key, std::make_pair(out.trajectory.total_time,
                                            out.alight_z)).first;
    }
    for (const auto& [e, z] : it->second.second) elevator_z[e] = z;
    return it->second.first;
  };

  std::vector<VoxelIndex> best_order;
  double best_time = std::numeric_limits<double>::infinity();
  do {
    std::vector<double> elevator_z = effective_elevator_z(map, cfg);
    double time = 0.0;
    VoxelIndex from = start;
    for (const auto& dest : order) {
      time += leg_cost(from, dest, elevator_z);
      if (time >= best_time) break;
      from = dest;
    }
    if (time < best_time) {
      best_time = time;
      best_order = order;
    }
  } while (std::next_permutation(order.begin(), order.end()));

  return best_order;
}

void save_trajectory_csv(const std::string& path, const Trajectory& trajectory) {
  std::ostringstream os;
  os << "t_s,x,y,z,mode,leg\n";
  for (std::size_t n = 0; n < trajectory.waypoints.size(); ++n) {
    const auto& wp = trajectory.waypoints[n];
    std::size_t leg = 0;
    for (std::size_t l = 0; l < trajectory.legs.size(); ++l) {
      if (n >= trajectory.legs[l].first && n <= trajectory.legs[l].second) {
        leg = l;
        break;
      }
    }
    os << format_double(wp.t) << ',' << format_double(wp.position.x()) << ','
       << format_double(wp.position.y()) << ',' << format_double(wp.position.z())
       << ',' << move_mode_name(wp.mode) << ',' << leg << '\n';
  }
  write_text_file(path, os.str());
}

Trajectory load_trajectory_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "t_s,x,y,z,mode,leg") {
    throw ValidationError(path + ": expected header t_s,x,y,z,mode,leg");
  }
  Trajectory out;
  long current_leg = -1;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto cols = split(lines[n], ',');
    if (cols.size() != 6) throw ValidationError(path + ": bad row " + lines[n]);
    Waypoint wp;
    wp.t = parse_double(cols[0], path);
    wp.position = Vec3(parse_double(cols[1], path), parse_double(cols[2], path),
                       parse_double(cols[3], path));
    wp.mode = move_mode_from_name(cols[4]);
    const long leg = parse_long(cols[5], path);
    if (leg != current_leg) {
      if (!out.legs.empty()) out.legs.back().second = out.waypoints.size() - 1;
      out.legs.emplace_back(out.waypoints.empty() ? 0 : out.waypoints.size() - 1,
                            out.waypoints.size());
      current_leg = leg;
    }
    out.waypoints.push_back(wp);
  }
  if (!out.legs.empty()) out.legs.back().second = out.waypoints.size() - 1;
  if (!out.waypoints.empty()) out.total_time = out.waypoints.back().t;
  return out;
}

}  // namespace mfnav
