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

#include "mfnav/pipeline.hpp"

#include <sstream>

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"
#include "mfnav/planar_icp.hpp"

namespace mfnav {

namespace {

const char* point_class_name(PointClass cls) {
  switch (cls) {
    case PointClass::kGround: return "ground";
    case PointClass::kElevatorSynth: return "elevator";
    case PointClass::kOther: return "other";
  }
  return "?";
}

PointClass point_class_from_name(const std::string& name) {
  if (name == "ground") return PointClass::kGround;
  if (name == "elevator") return PointClass::kElevatorSynth;
  if (name == "other") return PointClass::kOther;
  throw ValidationError("unknown point class '" + name + "'");
}

}  // namespace

MappingResult run_mapping(const SessionData& session, const MappingOptions& opts) {
  const int n_poses = session.manifest.n_poses;
  if (static_cast<int>(session.scans.size()) != n_poses) {
    throw ValidationError("run_mapping: scan count does not match manifest");
  }
  if (static_cast<int>(session.odometry.size()) != n_poses - 1) {
    throw ValidationError("run_mapping: odometry count does not match manifest");
  }

  MappingResult result;

  // Altitude change per pose: trailing window over the pressure stream,
  // evaluated at each pose time.
  BaroConfig baro = opts.baro;
  baro.p_cri = session.manifest.p_cri;
  DeltaZEstimator estimator(baro);
  std::size_t cursor = 0;
  FloorTracker tracker;
  for (int i = 0; i < n_poses; ++i) {
    const double t_i = (i + 1) * session.manifest.pose_dt;
    while (cursor < session.pressure.size() &&
           session.pressure[cursor].t <= t_i + 1e-9) {
      estimator.push(session.pressure[cursor]);
      ++cursor;
    }
    if (estimator.empty()) {
      throw ValidationError("run_mapping: no pressure samples before pose " +
                            std::to_string(i));
    }
    const double dz = estimator.delta_z();
    result.delta_z.push_back(dz);
    result.floor_labels.push_back(update_floor(tracker, dz, baro));
  }

  for (const auto& scan : session.scans) {
    result.in_elevator.push_back(detect_elevator_interior(scan, opts.elevator));
  }

  // Graph: dead-reckoned initial estimates, odometry chain, elevation
  // constraints, then floor-labeled loop closures.
  PoseGraph& graph = result.graph;
  graph.add_node(0, Pose3());
  graph.set_prior(0, Pose3(), diagonal_information(opts.prior_sigma, opts.prior_sigma));

  Pose3 dead_reckoned;
  for (const auto& odo : session.odometry) {
    dead_reckoned = dead_reckoned * odo.rel;
    graph.add_node(odo.j, dead_reckoned);
    const bool through_cab = result.in_elevator[odo.i] || result.in_elevator[odo.j];
    const double sigma_z = through_cab ? opts.elevator_odom_sigma_z : opts.odom_sigma_z;
    graph.add_odometry(odo.i, odo.j, odo.rel,
                       diagonal_information(
                           Vec3(opts.odom_sigma_xy, opts.odom_sigma_xy, sigma_z),
                           Vec3::Constant(opts.odom_sigma_rot)));
  }

  if (opts.use_elevation_constraints) {
    for (int i = 0; i < n_poses; ++i) {
      graph.add_elevation_constraint(i, result.delta_z[i], opts.sigma_z);
    }
  }

  // Loop detection; descriptors for cab interiors are never indexed.
  LoopDatabase db(opts.loop);
  for (int i = 0; i < n_poses; ++i) {
    if (result.in_elevator[i]) continue;
    const ScanContext descriptor =
        make_descriptor(session.scans[i], opts.loop, result.floor_labels[i]);
    const auto candidate =
        opts.use_floor_labels ? db.query(descriptor) : db.query_all_floors(descriptor);
    if (candidate.has_value()) {
      try {
        const auto estimate = estimate_relative_pose(
            session.scans[i], session.scans[candidate->match_id], candidate->shift,
            opts.loop);
        graph.add_loop(*candidate, estimate.transform, opts.loop_sigma_xy,
                       opts.loop_sigma_yaw);
        result.loops_accepted.push_back(*candidate);
      } catch (const RejectedLoopError&) {
        ++result.loops_rejected;
      } catch (const std::invalid_argument&) {
        // Cross-floor candidate in unlabeled mode; the graph refuses it.
        ++result.loops_rejected;
      }
    }
    db.insert(i, result.floor_labels[i], descriptor);
  }

  OptimizeResult opt = optimize(graph, opts.optimize);
  result.poses = std::move(opt.poses);
  result.final_cost = opt.final_cost;
  result.iterations = opt.iterations;

  // Corrected map cloud. Cab scans are replaced by one hollow-cuboid shell
  // per ride, spanning the ride's estimated altitude change.
  for (int i = 0; i < n_poses; ++i) {
    if (result.in_elevator[i]) continue;
    const Pose3& pose = result.poses.at(i);
    for (const auto& pt : session.scans[i].points) {
      MapCloudPoint cp;
      cp.p = pose * pt.p;
      cp.cls = pt.channel <= opts.max_ground_channel ? PointClass::kGround
                                                     : PointClass::kOther;
      result.cloud.push_back(cp);
    }
  }
  for (int i = 0; i < n_poses; ++i) {
    if (!result.in_elevator[i]) continue;
    int end = i;
    while (end + 1 < n_poses && result.in_elevator[end + 1]) ++end;
    const double ride_delta = result.delta_z[end] - result.delta_z[i];
    if (std::abs(ride_delta) > 1e-9) {
      const Pose3& base = result.poses.at(i);
      const Scan shell =
          synthesize_elevator_cloud(opts.elevator, ride_delta, base.t.z());
      for (const auto& pt : shell.points) {
        MapCloudPoint cp;
        cp.p = Vec3(base.t.x() + pt.p.x(), base.t.y() + pt.p.y(), pt.p.z());
        cp.cls = PointClass::kElevatorSynth;
        result.cloud.push_back(cp);
      }
    }
    i = end;
  }

  return result;
}

void save_map_cloud(const std::string& path, const std::vector<MapCloudPoint>& cloud) {
  std::ostringstream os;
  os << "x,y,z,class\n";
  for (const auto& cp : cloud) {
    os << format_double(cp.p.x()) << ',' << format_double(cp.p.y()) << ','
       << format_double(cp.p.z()) << ',' << point_class_name(cp.cls) << '\n';
  }
  write_text_file(path, os.str());
}

std::vector<MapCloudPoint> load_map_cloud(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "x,y,z,class") {
    throw ValidationError(path + ": expected header x,y,z,class");
  }
  std::vector<MapCloudPoint> cloud;
  cloud.reserve(lines.size() - 1);
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (lines[n].empty()) continue;
    const auto cols = split(lines[n], ',');
    if (cols.size() != 4) throw ValidationError(path + ": bad row " + lines[n]);
    MapCloudPoint cp;
    cp.p = Vec3(parse_double(cols[0], path), parse_double(cols[1], path),
                parse_double(cols[2], path));
    cp.cls = point_class_from_name(cols[3]);
    cloud.push_back(cp);
  }
  return cloud;
}

std::vector<ClassifiedPoint> to_classified(const std::vector<MapCloudPoint>& cloud) {
  std::vector<ClassifiedPoint> out;
  out.reserve(cloud.size());
  for (const auto& cp : cloud) out.push_back({cp.p, cp.cls});
  return out;
}

}  // namespace mfnav
