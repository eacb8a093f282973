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

#ifndef MFNAV_POSE_GRAPH_HPP_
#define MFNAV_POSE_GRAPH_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfnav/scan_context.hpp"
#include "mfnav/se3.hpp"

namespace mfnav {

using PoseMap = std::map<int, Pose3>;

struct Se3Edge {
  int i = 0, j = 0;
  Pose3 rel;  // measured pose of node j in node i's frame
  Mat6 info = Mat6::Identity();
};

struct ElevationConstraint {
  int id = 0;
  double z_target = 0.0;  // absolute target, resolved against the prior at add time
  double sigma = 0.3;
};

struct PriorConstraint {
  int id = 0;
  Pose3 target;
  Mat6 info = Mat6::Identity();
};

Mat6 diagonal_information(double sigma_xyz, double sigma_rot);
Mat6 diagonal_information(const Vec3& sigma_t, const Vec3& sigma_r);

/// Pose graph over SE(3) nodes with odometry/loop edges, unary elevation
/// constraints on z and one gauge-fixing prior.
class PoseGraph {
 public:
  void add_node(int id, const Pose3& initial);
  bool has_node(int id) const { return nodes_.count(id) > 0; }
  const Pose3& initial_pose(int id) const;
  const PoseMap& nodes() const { return nodes_; }

  /// The prior pins the gauge; must be set before elevation constraints so
  /// their altitude targets can be resolved against its z.
  void set_prior(int id, const Pose3& target, const Mat6& info);
  const std::optional<PriorConstraint>& prior() const { return prior_; }

  /// Consecutive-pose odometry edge (j must equal i + 1).
  void add_odometry(int i, int j, const Pose3& rel, const Mat6& info);

  /// Loop closure from place recognition: checks the candidate's floor
  /// agreement and promotes the planar transform to SE(3) with weak
  /// z/roll/pitch information.
  void add_loop(const LoopCandidate& candidate, const PlanarTransform& rel,
                double sigma_xy, double sigma_yaw, double weak_sigma = 10.0);

  /// Generic relative edge; used by the file loader and by add_odometry /
  /// add_loop internally.
  void add_se3_edge(int i, int j, const Pose3& rel, const Mat6& info);

  /// Pulls node i's z toward prior.z + delta_z with standard deviation sigma.
  void add_elevation_constraint(int i, double delta_z, double sigma);

  const std::vector<Se3Edge>& edges() const { return edges_; }
  const std::vector<ElevationConstraint>& elevation_constraints() const {
    return elevations_;
  }

  /// Text round trip. Records: VERTEX_SE3:QUAT, EDGE_SE3:QUAT (21
  /// upper-triangular information entries) and EDGE_Z (absolute z target).
  /// The format carries no prior; load() pins the lowest vertex at its stored
  /// pose, so a custom prior does not survive a round trip.
  static PoseGraph load(const std::string& path);
  void save(const std::string& path) const;

 private:
  PoseMap nodes_;
  std::vector<Se3Edge> edges_;
  std::vector<ElevationConstraint> elevations_;
  std::optional<PriorConstraint> prior_;
};

struct OptimizeParams {
  int max_iterations = 100;
  double cost_tolerance = 1e-9;   // relative cost change that stops iterating
  double initial_lambda = 1e-4;   // Levenberg damping start
};

struct OptimizeResult {
  PoseMap poses;
  double final_cost = 0.0;
  int iterations = 0;
  std::vector<double> cost_history;  // accepted iterations, starting cost first
};

/// Thrown when damping growth exceeds its cap without an acceptable step.
class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& what, OptimizeResult last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  OptimizeResult last_iterate;
};

/// One whitened residual block with jacobians w.r.t. the local 6-dof
/// parameters (translation then rotation) of each involved node.
struct ResidualBlock {
  Eigen::VectorXd residual;
  std::vector<int> node_ids;
  std::vector<Eigen::MatrixXd> jacobians;
};

/// All residual blocks at the given poses; the optimizer's linearization,
/// exposed for verification against finite differences.
std::vector<ResidualBlock> linearize(const PoseGraph& graph, const PoseMap& poses);

/// Sum of squared whitened residuals over all constraints.
double total_cost(const PoseGraph& graph, const PoseMap& poses);

/// Applies a local step to one pose: translation added, rotation applied
/// multiplicatively on the right.
Pose3 retract(const Pose3& pose, const Vec6& delta);

/// Batch Levenberg-Marquardt over the whole graph. The cost of accepted
/// iterates never increases; damping failure beyond 1e12 throws
/// OptimizationError carrying the last iterate.
OptimizeResult optimize(const PoseGraph& graph, const OptimizeParams& params = {});

}  // namespace mfnav

#endif  // MFNAV_POSE_GRAPH_HPP_
