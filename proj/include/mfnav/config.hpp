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

#ifndef MFNAV_CONFIG_HPP_
#define MFNAV_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

#include "mfnav/pipeline.hpp"
#include "mfnav/planner.hpp"
#include "mfnav/voxel_map.hpp"

namespace mfnav {

/// Layered key-value configuration: built-in defaults, then an optional
/// `section.key = value` file, then command-line overrides (last wins).
/// Every key must be in the documented registry; unknown keys are rejected.
class RunConfig {
 public:
  RunConfig() = default;

  void load_file(const std::string& path);
  /// One `section.key=value` assignment, as passed on the command line.
  void apply_override(const std::string& assignment);

  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;

  MappingOptions mapping_options() const;
  VoxelizeConfig voxelize_config() const;
  PlanConfig plan_config() const;  // elevator overrides are separate flags

  static const std::map<std::string, std::string>& registry();  // key -> default

 private:
  void set_checked(const std::string& key, const std::string& value,
                   const std::string& context);
  std::map<std::string, std::string> values_;
};

}  // namespace mfnav

#endif  // MFNAV_CONFIG_HPP_
