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

#include "mfnav/session.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"

namespace mfnav {

namespace {

constexpr double kCabCeiling = 2.2;
constexpr double kCabWall = 0.05;

double normal_draw(std::mt19937_64& rng, double sigma) {
  if (sigma <= 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

bool pose_in_geometry(const BuildingSpec& spec, const Vec3& p) {
  for (const auto& floor_rects : spec.corridors) {
    for (const auto& r : floor_rects) {
      if (r.contains(p.x(), p.y())) return true;
    }
  }
  if (spec.stairwell && spec.stairwell->footprint.contains(p.x(), p.y())) return true;
  for (const auto& e : spec.elevators) {
    if (e.footprint.contains(p.x(), p.y())) return true;
  }
  return false;
}

// The cab interior seen from inside: four wall shells, a floor at the
// robot's feet and a low ceiling.
std::vector<Box> cab_boxes(const ElevatorSpec& elevator, double z) {
  const Rect in = elevator.footprint.inset(0.1);
  std::vector<Box> boxes;
  boxes.push_back({Vec3(in.x0 - kCabWall, in.y0 - kCabWall, z - 0.2),
                   Vec3(in.x0, in.y1 + kCabWall, z + kCabCeiling)});
  boxes.push_back({Vec3(in.x1, in.y0 - kCabWall, z - 0.2),
                   Vec3(in.x1 + kCabWall, in.y1 + kCabWall, z + kCabCeiling)});
  boxes.push_back({Vec3(in.x0, in.y0 - kCabWall, z - 0.2),
                   Vec3(in.x1, in.y0, z + kCabCeiling)});
  boxes.push_back({Vec3(in.x0, in.y1, z - 0.2),
                   Vec3(in.x1, in.y1 + kCabWall, z + kCabCeiling)});
  boxes.push_back({Vec3(in.x0, in.y0, z - 0.1), Vec3(in.x1, in.y1, z)});
  boxes.push_back({Vec3(in.x0, in.y0, z + kCabCeiling),
                   Vec3(in.x1, in.y1, z + kCabCeiling + 0.1)});
  return boxes;
}

Scan raycast_scan(const std::vector<Box>& boxes, const Pose3& pose,
                  const SessionConfig& cfg, const NoiseSpec& noise,
                  std::mt19937_64& rng, int node_id, double t) {
  Scan scan;
  scan.node_id = node_id;
  scan.t = t;
  const Vec3 sensor = pose.t + Vec3(0, 0, cfg.sensor_height);
  const Quat to_sensor = pose.q.conjugate();
  for (int ch = 0; ch < kNumChannels; ++ch) {
    const double elevation = (-15.0 + 2.0 * ch) * std::numbers::pi / 180.0;
    const double ce = std::cos(elevation), se = std::sin(elevation);
    for (int a = 0; a < cfg.azimuth_steps; ++a) {
      const double azimuth =
          2.0 * std::numbers::pi * a / cfg.azimuth_steps + pose.yaw();
      const Vec3 dir(ce * std::cos(azimuth), ce * std::sin(azimuth), se);
      double range = 0.0;
      if (!raycast(boxes, sensor, dir, cfg.max_range, range)) continue;
      range += normal_draw(rng, noise.range_sigma);
      if (range <= 0.0) continue;
      const Vec3 hit = sensor + range * dir;
      scan.points.push_back({to_sensor * (hit - sensor), ch});
    }
  }
  return scan;
}

}  // namespace

std::vector<Vec3> interpolate_route(const std::vector<Vec3>& anchors,
                                    double spacing) {
  std::vector<Vec3> poses;
  if (anchors.empty()) return poses;
  poses.push_back(anchors.front());
  for (std::size_t s = 0; s + 1 < anchors.size(); ++s) {
    const Vec3& a = anchors[s];
    const Vec3& b = anchors[s + 1];
    const double len = (b - a).norm();
    if (len < 1e-9) continue;
    const Vec3 dir = (b - a) / len;
    for (double d = spacing; d < len - 1e-9; d += spacing) {
      poses.push_back(a + d * dir);
    }
    poses.push_back(b);
  }
  return poses;
}

Session generate_session(const BuildingSpec& spec, const std::vector<Vec3>& route,
                         const NoiseSpec& noise, std::uint64_t seed,
                         const SessionConfig& cfg) {
  if (route.size() < 2) {
    throw ValidationError("generate_session: route needs at least two anchors");
  }
  const BuildingGeometry geom = generate_building(spec);
  const std::vector<Vec3> positions = interpolate_route(route, cfg.pose_spacing);

  Session session;
  session.truth_voxels = geom.truth;

  // Truth poses: yaw follows the direction of travel.
  double yaw = 0.0;
  for (std::size_t n = 0; n < positions.size(); ++n) {
    if (!pose_in_geometry(spec, positions[n])) {
      std::ostringstream os;
      os << "generate_session: route exits geometry at (" << positions[n].x()
         << ", " << positions[n].y() << ", " << positions[n].z() << ")";
      throw ValidationError(os.str());
    }
    if (n + 1 < positions.size()) {
      const Vec3 d = positions[n + 1] - positions[n];
      if (std::hypot(d.x(), d.y()) > 1e-9) yaw = std::atan2(d.y(), d.x());
    }
    session.truth_poses.push_back(
        Pose3::from_xyz_yaw(positions[n].x(), positions[n].y(), positions[n].z(), yaw));
  }

  // Ground-truth floor labels from thresholded true altitude changes.
  FloorTracker tracker;
  BaroConfig floor_cfg;
  floor_cfg.floor_threshold = cfg.floor_threshold;
  floor_cfg.nominal_floor_height = spec.floor_height;
  const double z0 = positions.front().z();
  for (const auto& p : positions) {
    session.truth_floors.push_back(update_floor(tracker, p.z() - z0, floor_cfg));
  }

  std::mt19937_64 rng(seed);

  // Odometry: exact relative poses plus distance-scaled noise; frozen to
  // identity inside a cab where planar matching sees no motion.
  for (std::size_t n = 0; n + 1 < session.truth_poses.size(); ++n) {
    OdometryDelta d;
    d.i = static_cast<int>(n);
    d.j = static_cast<int>(n + 1);
    const bool cab_i = elevator_cab_at(spec, positions[n].x(), positions[n].y()) != nullptr;
    const bool cab_j =
        elevator_cab_at(spec, positions[n + 1].x(), positions[n + 1].y()) != nullptr;
    if (cab_i || cab_j) {
      d.rel = Pose3();
    } else {
      d.rel = session.truth_poses[n].inverse() * session.truth_poses[n + 1];
      const double dist = d.rel.t.norm();
      d.rel.t.x() += normal_draw(rng, noise.odom_sigma_xy * dist);
      d.rel.t.y() += normal_draw(rng, noise.odom_sigma_xy * dist);
      d.rel.t.z() += normal_draw(rng, noise.odom_sigma_z * dist);
      d.rel.q = (d.rel.q * quat_exp(Vec3(0, 0, normal_draw(rng, noise.odom_sigma_yaw * dist))))
                    .normalized();
    }
    session.data.odometry.push_back(d);
  }

  // Pressure: `window` samples per pose, all at the pose's altitude, last one
  // exactly at the pose time.
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const double base_t = n * cfg.pose_dt;
    const double p_true = pressure_for_altitude(positions[n].z() - z0, cfg.p_cri);
    for (int s = 1; s <= cfg.window; ++s) {
      PressureSample sample;
      sample.t = base_t + cfg.pose_dt * s / cfg.window;
      sample.p = p_true + normal_draw(rng, noise.pressure_sigma);
      session.data.pressure.push_back(sample);
    }
  }

  // Scans: cab interiors replace the building when riding.
  for (std::size_t n = 0; n < positions.size(); ++n) {
    const double t = (n + 1) * cfg.pose_dt;
    const ElevatorSpec* cab =
        elevator_cab_at(spec, positions[n].x(), positions[n].y());
    const int id = static_cast<int>(n);
    if (cab != nullptr) {
      const auto boxes = cab_boxes(*cab, positions[n].z());
      session.data.scans.push_back(
          raycast_scan(boxes, session.truth_poses[n], cfg, noise, rng, id, t));
    } else {
      session.data.scans.push_back(
          raycast_scan(geom.boxes, session.truth_poses[n], cfg, noise, rng, id, t));
    }
  }

  session.data.manifest.p_cri = cfg.p_cri;
  session.data.manifest.window = cfg.window;
  session.data.manifest.seed = seed;
  session.data.manifest.n_poses = static_cast<int>(positions.size());
  session.data.manifest.n_elevators = static_cast<int>(spec.elevators.size());
  session.data.manifest.pose_dt = cfg.pose_dt;
  return session;
}

void write_session(const std::string& dir, const Session& session) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create directory " + dir);

  const auto& m = session.data.manifest;
  std::ostringstream os;
  os << "p_cri = " << format_double(m.p_cri) << '\n';
  os << "window = " << m.window << '\n';
  os << "seed = " << m.seed << '\n';
  os << "n_poses = " << m.n_poses << '\n';
  os << "n_elevators = " << m.n_elevators << '\n';
  os << "pose_dt = " << format_double(m.pose_dt) << '\n';
  write_text_file(dir + "/manifest.txt", os.str());

  save_pressure_csv(dir + "/pressure.csv", session.data.pressure);

  std::ostringstream odo;
  odo << "i,j,dx,dy,dz,dqx,dqy,dqz,dqw\n";
  for (const auto& d : session.data.odometry) {
    odo << d.i << ',' << d.j << ',' << format_double(d.rel.t.x()) << ','
        << format_double(d.rel.t.y()) << ',' << format_double(d.rel.t.z()) << ','
        << format_double(d.rel.q.x()) << ',' << format_double(d.rel.q.y()) << ','
        << format_double(d.rel.q.z()) << ',' << format_double(d.rel.q.w()) << '\n';
  }
  write_text_file(dir + "/odometry.csv", odo.str());

  for (const auto& scan : session.data.scans) {
    save_scan_csv(dir + "/scan_" + std::to_string(scan.node_id) + ".csv", scan);
  }

  std::ostringstream gt;
  gt << "id,x,y,z,qx,qy,qz,qw,floor\n";
  for (std::size_t n = 0; n < session.truth_poses.size(); ++n) {
    const auto& p = session.truth_poses[n];
    gt << n << ',' << format_double(p.t.x()) << ',' << format_double(p.t.y())
       << ',' << format_double(p.t.z()) << ',' << format_double(p.q.x()) << ','
       << format_double(p.q.y()) << ',' << format_double(p.q.z()) << ','
       << format_double(p.q.w()) << ',' << session.truth_floors[n] << '\n';
  }
  write_text_file(dir + "/ground_truth.csv", gt.str());

  save_voxel_map(dir + "/truth_voxels.txt", session.truth_voxels);
}

namespace {

SessionManifest load_manifest(const std::string& path) {
  SessionManifest m;
  for (const auto& line : read_lines(path)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(path + ": bad line " + line);
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.pop_back();
    };
    trim(key);
    trim(value);
    if (key == "p_cri") m.p_cri = parse_double(value, path);
    else if (key == "window") m.window = static_cast<int>(parse_long(value, path));
    else if (key == "seed") m.seed = static_cast<std::uint64_t>(parse_long(value, path));
    else if (key == "n_poses") m.n_poses = static_cast<int>(parse_long(value, path));
    else if (key == "n_elevators") m.n_elevators = static_cast<int>(parse_long(value, path));
    else if (key == "pose_dt") m.pose_dt = parse_double(value, path);
    else throw ValidationError(path + ": unknown manifest key " + key);
  }
  if (m.n_poses <= 0) throw ValidationError(path + ": missing n_poses");
  return m;
}

}  // namespace

SessionData load_session_data(const std::string& dir) {
  SessionData data;
  data.manifest = load_manifest(dir + "/manifest.txt");
  data.pressure = load_pressure_csv(dir + "/pressure.csv");

  const std::string odo_path = dir + "/odometry.csv";
  const auto lines = read_lines(odo_path);
  if (lines.empty() || lines[0] != "i,j,dx,dy,dz,dqx,dqy,dqz,dqw") {
    throw ValidationError(odo_path + ": expected odometry header");
  }
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto cols = split(lines[n], ',');
    if (cols.size() != 9) throw ValidationError(odo_path + ": bad row " + lines[n]);
    OdometryDelta d;
    d.i = static_cast<int>(parse_long(cols[0], odo_path));
    d.j = static_cast<int>(parse_long(cols[1], odo_path));
    d.rel.t = Vec3(parse_double(cols[2], odo_path), parse_double(cols[3], odo_path),
                   parse_double(cols[4], odo_path));
    d.rel.q = Quat(parse_double(cols[8], odo_path), parse_double(cols[5], odo_path),
                   parse_double(cols[6], odo_path), parse_double(cols[7], odo_path));
    data.odometry.push_back(d);
  }

  for (int id = 0; id < data.manifest.n_poses; ++id) {
    const std::string path = dir + "/scan_" + std::to_string(id) + ".csv";
    data.scans.push_back(load_scan_csv(path, id, (id + 1) * data.manifest.pose_dt));
  }
  return data;
}

Session load_session(const std::string& dir) {
  Session session;
  session.data = load_session_data(dir);

  const std::string gt_path = dir + "/ground_truth.csv";
  const auto lines = read_lines(gt_path);
  if (lines.empty() || lines[0] != "id,x,y,z,qx,qy,qz,qw,floor") {
    throw ValidationError(gt_path + ": expected ground-truth header");
  }
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto cols = split(lines[n], ',');
    if (cols.size() != 9) throw ValidationError(gt_path + ": bad row " + lines[n]);
    Pose3 p;
    p.t = Vec3(parse_double(cols[1], gt_path), parse_double(cols[2], gt_path),
               parse_double(cols[3], gt_path));
    p.q = Quat(parse_double(cols[7], gt_path), parse_double(cols[4], gt_path),
               parse_double(cols[5], gt_path), parse_double(cols[6], gt_path));
    session.truth_poses.push_back(p);
    session.truth_floors.push_back(static_cast<int>(parse_long(cols[8], gt_path)));
  }
  session.truth_voxels = load_voxel_map(dir + "/truth_voxels.txt");
  return session;
}

GenerateSpec parse_generate_spec(const std::string& path) {
  GenerateSpec out;
  out.building.corridors.clear();
  std::vector<std::pair<int, Rect>> corridors;  // floor index or -1 for all
  bool have_floors = false;

  for (const auto& raw : read_lines(path)) {
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (split_ws(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(path + ": expected key = value: " + line);
    const auto key_tokens = split_ws(line.substr(0, eq));
    if (key_tokens.size() != 1) throw ValidationError(path + ": bad key in " + line);
    const std::string key = key_tokens[0];
    const auto values = split_ws(line.substr(eq + 1));
    auto need = [&](std::size_t n) {
      if (values.size() != n) {
        throw ValidationError(path + ": key " + key + " expects " +
                              std::to_string(n) + " values");
      }
    };
    if (key == "floors") {
      need(1);
      out.building.floors = static_cast<int>(parse_long(values[0], path));
      have_floors = true;
    } else if (key == "floor_height") {
      need(1);
      out.building.floor_height = parse_double(values[0], path);
    } else if (key == "wall_height") {
      need(1);
      out.building.wall_height = parse_double(values[0], path);
    } else if (key == "corridor") {
      need(5);
      corridors.emplace_back(static_cast<int>(parse_long(values[0], path)),
                             Rect{parse_double(values[1], path), parse_double(values[2], path),
                                  parse_double(values[3], path), parse_double(values[4], path)});
    } else if (key == "stairwell") {
      need(6);
      StairSpec st;
      st.footprint = Rect{parse_double(values[0], path), parse_double(values[1], path),
                          parse_double(values[2], path), parse_double(values[3], path)};
      st.step_rise = parse_double(values[4], path);
      st.step_run = parse_double(values[5], path);
      out.building.stairwell = st;
    } else if (key == "elevator") {
      need(8);
      ElevatorSpec e;
      e.id = values[0];
      e.footprint = Rect{parse_double(values[1], path), parse_double(values[2], path),
                         parse_double(values[3], path), parse_double(values[4], path)};
      e.lowest_floor = static_cast<int>(parse_long(values[5], path));
      e.highest_floor = static_cast<int>(parse_long(values[6], path));
      e.initial_floor = static_cast<int>(parse_long(values[7], path));
      out.building.elevators.push_back(e);
    } else if (key == "route") {
      need(3);
      out.route.emplace_back(parse_double(values[0], path), parse_double(values[1], path),
                             parse_double(values[2], path));
    } else if (key == "noise.odom_sigma_xy") {
      need(1);
      out.noise.odom_sigma_xy = parse_double(values[0], path);
    } else if (key == "noise.odom_sigma_z") {
      need(1);
      out.noise.odom_sigma_z = parse_double(values[0], path);
    } else if (key == "noise.odom_sigma_yaw") {
      need(1);
      out.noise.odom_sigma_yaw = parse_double(values[0], path);
    } else if (key == "noise.pressure_sigma") {
      need(1);
      out.noise.pressure_sigma = parse_double(values[0], path);
    } else if (key == "noise.range_sigma") {
      need(1);
      out.noise.range_sigma = parse_double(values[0], path);
    } else if (key == "session.p_cri") {
      need(1);
      out.session.p_cri = parse_double(values[0], path);
    } else if (key == "session.window") {
      need(1);
      out.session.window = static_cast<int>(parse_long(values[0], path));
    } else {
      throw ValidationError(path + ": unknown key " + key);
    }
  }
  if (!have_floors) throw ValidationError(path + ": missing floors");
  if (out.route.size() < 2) throw ValidationError(path + ": route needs two points");

  out.building.corridors.assign(out.building.floors, {});
  for (const auto& [floor, rect] : corridors) {
    if (floor == -1) {
      for (auto& per_floor : out.building.corridors) per_floor.push_back(rect);
    } else if (floor >= 0 && floor < out.building.floors) {
      out.building.corridors[floor].push_back(rect);
    } else {
      throw ValidationError(path + ": corridor floor out of range");
    }
  }
  return out;
}

}  // namespace mfnav
