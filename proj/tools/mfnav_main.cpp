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

#include <cstdint>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfnav/config.hpp"
#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"
#include "mfnav/pipeline.hpp"
#include "mfnav/planner.hpp"
#include "mfnav/pose_graph.hpp"
#include "mfnav/session.hpp"
#include "mfnav/voxel_map.hpp"

namespace {

// Exit codes are a stable scripting contract:
// 0 success, 2 input/validation, 3 optimization failure, 4 unreachable.
constexpr int kOk = 0;
constexpr int kInputError = 2;
constexpr int kOptimizationError = 3;
constexpr int kUnreachable = 4;

mfnav::RunConfig build_config(const std::string& config_path,
                              const std::vector<std::string>& overrides) {
  mfnav::RunConfig cfg;
  if (!config_path.empty()) cfg.load_file(config_path);
  for (const auto& o : overrides) cfg.apply_override(o);
  return cfg;
}

int cmd_generate(const std::string& spec_path, const std::string& out_dir,
                 std::uint64_t seed) {
  const mfnav::GenerateSpec spec = mfnav::parse_generate_spec(spec_path);
  const mfnav::Session session =
      mfnav::generate_session(spec.building, spec.route, spec.noise, seed, spec.session);
  mfnav::write_session(out_dir, session);
  std::cout << "generated " << session.data.manifest.n_poses << " poses, "
            << session.data.pressure.size() << " pressure samples, "
            << session.data.manifest.n_elevators << " elevators -> " << out_dir
            << "\n";
  return kOk;
}

int cmd_map(const std::string& session_dir, const std::string& graph_out,
            const std::string& cloud_out, bool no_floor_labels,
            bool no_elevation_constraints, const mfnav::RunConfig& cfg) {
  mfnav::MappingOptions opts = cfg.mapping_options();
  opts.use_floor_labels = !no_floor_labels;
  opts.use_elevation_constraints = !no_elevation_constraints;
  const mfnav::SessionData session = mfnav::load_session_data(session_dir);
  const mfnav::MappingResult result = mfnav::run_mapping(session, opts);

  // Export the optimized poses, not the dead-reckoned initials.
  mfnav::PoseGraph graph;
  for (const auto& [id, pose] : result.poses) graph.add_node(id, pose);
  graph.set_prior(0, result.poses.at(0),
                  mfnav::diagonal_information(opts.prior_sigma, opts.prior_sigma));
  for (const auto& edge : result.graph.edges()) {
    graph.add_se3_edge(edge.i, edge.j, edge.rel, edge.info);
  }
  for (const auto& c : result.graph.elevation_constraints()) {
    graph.add_elevation_constraint(c.id, c.z_target - result.poses.at(0).t.z(),
                                   c.sigma);
  }
  graph.save(graph_out);
  if (!cloud_out.empty()) mfnav::save_map_cloud(cloud_out, result.cloud);

  std::cout << "mapped " << result.poses.size() << " poses, "
            << result.loops_accepted.size() << " loops ("
            << result.loops_rejected << " rejected), cost "
            << result.final_cost << " after " << result.iterations
            << " iterations -> " << graph_out << "\n";
  return kOk;
}

int cmd_voxelize(const std::string& cloud_path, const std::string& out_path,
                 const mfnav::RunConfig& cfg) {
  const auto cloud = mfnav::load_map_cloud(cloud_path);
  const mfnav::VoxelMap map =
      mfnav::voxelize(mfnav::to_classified(cloud), cfg.voxelize_config());
  mfnav::save_voxel_map(out_path, map);
  std::size_t corridor = 0, stair = 0, elevator = 0;
  for (const auto& [idx, cls] : map.occupied()) {
    (void)idx;
    if (cls == mfnav::VoxelClass::kCorridor) ++corridor;
    else if (cls == mfnav::VoxelClass::kStair) ++stair;
    else ++elevator;
  }
  std::cout << "voxelized " << cloud.size() << " points -> " << map.size()
            << " voxels (corridor " << corridor << ", stair " << stair
            << ", elevator " << elevator << ", " << map.elevators().size()
            << " elevator columns) -> " << out_path << "\n";
  return kOk;
}

std::vector<mfnav::Vec3> parse_waypoints(const std::string& text) {
  std::vector<mfnav::Vec3> out;
  for (const auto& group : mfnav::split(text, ';')) {
    if (group.empty()) continue;
    const auto parts = mfnav::split(group, ',');
    if (parts.size() != 3) {
      throw mfnav::ValidationError("waypoint '" + group + "' is not x,y,z");
    }
    out.emplace_back(mfnav::parse_double(parts[0], "waypoints"),
                     mfnav::parse_double(parts[1], "waypoints"),
                     mfnav::parse_double(parts[2], "waypoints"));
  }
  if (out.size() < 2) {
    throw mfnav::ValidationError("need at least two waypoints");
  }
  return out;
}

int cmd_plan(const std::string& voxels_path, const std::string& waypoints_text,
             bool return_to_start, bool optimize_order,
             const std::vector<std::string>& elevator_z_args,
             const std::string& out_path, const mfnav::RunConfig& cfg) {
  const mfnav::VoxelMap map = mfnav::load_voxel_map(voxels_path);
  mfnav::PlanConfig plan_cfg = cfg.plan_config();
  for (const auto& arg : elevator_z_args) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos) {
      throw mfnav::ValidationError("--elevator-z expects id=z, got '" + arg + "'");
    }
    plan_cfg.elevator_z[arg.substr(0, eq)] =
        mfnav::parse_double(arg.substr(eq + 1), "--elevator-z");
  }

  constexpr double kSnapRadius = 1.0;
  std::vector<mfnav::VoxelIndex> indices;
  for (const auto& wp : parse_waypoints(waypoints_text)) {
    mfnav::VoxelIndex idx;
    if (!map.snap(wp, kSnapRadius, idx)) {
      std::ostringstream os;
      os << "waypoint (" << wp.x() << ", " << wp.y() << ", " << wp.z()
         << ") is more than " << kSnapRadius << " m from any traversable voxel";
      throw mfnav::ValidationError(os.str());
    }
    const mfnav::Vec3 snapped = map.center(idx);
    if ((snapped - wp).norm() > 1e-6) {
      std::cerr << "snapped (" << wp.x() << ", " << wp.y() << ", " << wp.z()
                << ") to voxel center (" << snapped.x() << ", " << snapped.y()
                << ", " << snapped.z() << ")\n";
    }
    indices.push_back(idx);
  }

  if (optimize_order) {
    const std::vector<mfnav::VoxelIndex> destinations(indices.begin() + 1,
                                                      indices.end());
    const auto ordered =
        mfnav::order_destinations(map, indices.front(), destinations, plan_cfg);
    indices.assign(1, indices.front());
    indices.insert(indices.end(), ordered.begin(), ordered.end());
  }

  const mfnav::Trajectory trajectory =
      mfnav::plan_multi(map, indices, return_to_start, plan_cfg);
  mfnav::save_trajectory_csv(out_path, trajectory);

  std::cout << "planned " << trajectory.legs.size() << " legs, total "
            << trajectory.total_time << " s:";
  for (std::size_t l = 0; l < trajectory.legs.size(); ++l) {
    std::set<std::string> modes;
    for (std::size_t n = trajectory.legs[l].first + 1;
         n <= trajectory.legs[l].second; ++n) {
      modes.insert(mfnav::move_mode_name(trajectory.waypoints[n].mode));
    }
    std::cout << " leg" << l << "[";
    bool first = true;
    for (const auto& m : modes) {
      std::cout << (first ? "" : "+") << m;
      first = false;
    }
    std::cout << "]";
  }
  std::cout << " -> " << out_path << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multifloor mapping and trajectory planning toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "configuration file (section.key = value)");
  app.add_option("--set", overrides, "override one configuration key (section.key=value)");

  auto* generate = app.add_subcommand("generate", "synthesize a sensor session");
  std::string gen_spec, gen_out;
  std::uint64_t gen_seed = 0;
  generate->add_option("--spec", gen_spec, "building/route spec file")->required();
  generate->add_option("--out", gen_out, "output session directory")->required();
  generate->add_option("--seed", gen_seed, "random seed");

  auto* map_cmd = app.add_subcommand("map", "build and optimize the multifloor map");
  std::string map_session, map_out, map_cloud;
  bool no_floor_labels = false, no_elevation = false;
  map_cmd->add_option("--session", map_session, "session directory")->required();
  map_cmd->add_option("--out", map_out, "pose-graph output file")->required();
  map_cmd->add_option("--map-cloud", map_cloud, "classified map cloud output");
  map_cmd->add_flag("--no-floor-labels", no_floor_labels,
                    "query loops without floor labels");
  map_cmd->add_flag("--no-elevation-constraints", no_elevation,
                    "drop barometric elevation constraints");

  auto* voxelize = app.add_subcommand("voxelize", "reduce a map cloud to traversable voxels");
  std::string vox_cloud, vox_out;
  voxelize->add_option("--cloud", vox_cloud, "classified map cloud")->required();
  voxelize->add_option("--out", vox_out, "voxel map output file")->required();

  auto* plan = app.add_subcommand("plan", "plan a multifloor trajectory");
  std::string plan_voxels, plan_waypoints, plan_out;
  bool plan_return = false, plan_order = false;
  std::vector<std::string> plan_elevator_z;
  plan->add_option("--voxels", plan_voxels, "voxel map file")->required();
  plan->add_option("--waypoints", plan_waypoints, "x,y,z;x,y,z;... in meters")->required();
  plan->add_flag("--return", plan_return, "append a leg back to the start");
  plan->add_flag("--optimize-order", plan_order, "reorder destinations for minimum time");
  plan->add_option("--elevator-z", plan_elevator_z, "initial cab height override, id=z");
  plan->add_option("--out", plan_out, "trajectory CSV output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInputError;
  }

  try {
    const mfnav::RunConfig cfg = build_config(config_path, overrides);
    if (generate->parsed()) return cmd_generate(gen_spec, gen_out, gen_seed);
    if (map_cmd->parsed()) {
      return cmd_map(map_session, map_out, map_cloud, no_floor_labels,
                     no_elevation, cfg);
    }
    if (voxelize->parsed()) return cmd_voxelize(vox_cloud, vox_out, cfg);
    if (plan->parsed()) {
      return cmd_plan(plan_voxels, plan_waypoints, plan_return, plan_order,
                      plan_elevator_z, plan_out, cfg);
    }
  } catch (const mfnav::UnreachableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnreachable;
  } catch (const mfnav::OptimizationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOptimizationError;
  } catch (const mfnav::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
