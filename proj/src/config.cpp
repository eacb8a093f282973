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

#include "mfnav/config.hpp"

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"

namespace mfnav {

const std::map<std::string, std::string>& RunConfig::registry() {
  static const std::map<std::string, std::string> keys = {
      {"baro.window", "100"},
      {"baro.floor_threshold", "2.5"},
      {"baro.nominal_floor_height", "3.64"},
      {"elevator.range_sq_threshold", "9.0"},
      {"elevator.footprint_a", "1.0"},
      {"elevator.footprint_b", "1.0"},
      {"elevator.shell_spacing", "0.1"},
      {"loop.n_rings", "20"},
      {"loop.n_sectors", "60"},
      {"loop.l_max", "40.0"},
      {"loop.top_k", "10"},
      {"loop.accept_threshold", "0.20"},
      {"loop.exclusion_gap", "50"},
      {"loop.sensor_height", "0.5"},
      {"graph.sigma_z", "0.3"},
      {"graph.odom_sigma_xy", "0.02"},
      {"graph.odom_sigma_z", "0.02"},
      {"graph.odom_sigma_rot", "0.01"},
      {"graph.elevator_odom_sigma_z", "10.0"},
      {"graph.loop_sigma_xy", "0.05"},
      {"graph.loop_sigma_yaw", "0.02"},
      {"graph.prior_sigma", "0.001"},
      {"graph.max_iterations", "100"},
      {"graph.cost_tolerance", "1e-9"},
      {"graph.initial_lambda", "1e-4"},
      {"voxel.max_ground_channel", "4"},
      {"voxel.n_z", "5"},
      {"voxel.resolution", "0.3"},
      {"plan.v_rbt", "1.0"},
      {"plan.v_elv", "1.0"},
  };
  return keys;
}

void RunConfig::set_checked(const std::string& key, const std::string& value,
                            const std::string& context) {
  if (registry().count(key) == 0) {
    throw ValidationError(context + ": unknown configuration key '" + key + "'");
  }
  values_[key] = value;
}

void RunConfig::load_file(const std::string& path) {
  for (const auto& raw : read_lines(path)) {
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (split_ws(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path + ": expected key = value: " + line);
    }
    const auto key_tokens = split_ws(line.substr(0, eq));
    const auto value_tokens = split_ws(line.substr(eq + 1));
    if (key_tokens.size() != 1 || value_tokens.size() != 1) {
      throw ValidationError(path + ": expected key = value: " + line);
    }
    set_checked(key_tokens[0], value_tokens[0], path);
  }
}

void RunConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 >= assignment.size()) {
    throw ValidationError("bad --set assignment '" + assignment +
                          "', expected section.key=value");
  }
  set_checked(assignment.substr(0, eq), assignment.substr(eq + 1), "--set");
}

double RunConfig::get_double(const std::string& key) const {
  auto it = values_.find(key);
  const std::string& value =
      it != values_.end() ? it->second : registry().at(key);
  return parse_double(value, "config key " + key);
}

int RunConfig::get_int(const std::string& key) const {
  auto it = values_.find(key);
  const std::string& value =
      it != values_.end() ? it->second : registry().at(key);
  return static_cast<int>(parse_long(value, "config key " + key));
}

MappingOptions RunConfig::mapping_options() const {
  MappingOptions opts;
  opts.baro.window = get_int("baro.window");
  opts.baro.floor_threshold = get_double("baro.floor_threshold");
  opts.baro.nominal_floor_height = get_double("baro.nominal_floor_height");
  opts.elevator.range_sq_threshold = get_double("elevator.range_sq_threshold");
  opts.elevator.footprint_a = get_double("elevator.footprint_a");
  opts.elevator.footprint_b = get_double("elevator.footprint_b");
  opts.elevator.shell_spacing = get_double("elevator.shell_spacing");
  opts.loop.n_rings = get_int("loop.n_rings");
  opts.loop.n_sectors = get_int("loop.n_sectors");
  opts.loop.l_max = get_double("loop.l_max");
  opts.loop.top_k = get_int("loop.top_k");
  opts.loop.accept_threshold = get_double("loop.accept_threshold");
  opts.loop.exclusion_gap = get_int("loop.exclusion_gap");
  opts.loop.sensor_height = get_double("loop.sensor_height");
  opts.optimize.max_iterations = get_int("graph.max_iterations");
  opts.optimize.cost_tolerance = get_double("graph.cost_tolerance");
  opts.optimize.initial_lambda = get_double("graph.initial_lambda");
  opts.sigma_z = get_double("graph.sigma_z");
  opts.odom_sigma_xy = get_double("graph.odom_sigma_xy");
  opts.odom_sigma_z = get_double("graph.odom_sigma_z");
  opts.odom_sigma_rot = get_double("graph.odom_sigma_rot");
  opts.elevator_odom_sigma_z = get_double("graph.elevator_odom_sigma_z");
  opts.loop_sigma_xy = get_double("graph.loop_sigma_xy");
  opts.loop_sigma_yaw = get_double("graph.loop_sigma_yaw");
  opts.prior_sigma = get_double("graph.prior_sigma");
  opts.max_ground_channel = get_int("voxel.max_ground_channel");
  return opts;
}

VoxelizeConfig RunConfig::voxelize_config() const {
  VoxelizeConfig cfg;
  cfg.max_ground_channel = get_int("voxel.max_ground_channel");
  cfg.n_z = get_int("voxel.n_z");
  cfg.resolution = get_double("voxel.resolution");
  return cfg;
}

PlanConfig RunConfig::plan_config() const {
  PlanConfig cfg;
  cfg.v_rbt = get_double("plan.v_rbt");
  cfg.v_elv = get_double("plan.v_elv");
  return cfg;
}

}  // namespace mfnav
