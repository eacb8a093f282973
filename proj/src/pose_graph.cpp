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

#include "mfnav/pose_graph.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"

namespace mfnav {

Mat6 diagonal_information(double sigma_xyz, double sigma_rot) {
  return diagonal_information(Vec3::Constant(sigma_xyz), Vec3::Constant(sigma_rot));
}

Mat6 diagonal_information(const Vec3& sigma_t, const Vec3& sigma_r) {
  Mat6 info = Mat6::Zero();
  for (int d = 0; d < 3; ++d) {
    info(d, d) = 1.0 / (sigma_t[d] * sigma_t[d]);
    info(3 + d, 3 + d) = 1.0 / (sigma_r[d] * sigma_r[d]);
  }
  return info;
}

void PoseGraph::add_node(int id, const Pose3& initial) {
  if (!nodes_.emplace(id, initial).second) {
    throw std::invalid_argument("PoseGraph: duplicate node " + std::to_string(id));
  }
}

const Pose3& PoseGraph::initial_pose(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw std::invalid_argument("PoseGraph: unknown node " + std::to_string(id));
  }
  return it->second;
}

void PoseGraph::set_prior(int id, const Pose3& target, const Mat6& info) {
  if (!has_node(id)) {
    throw std::invalid_argument("PoseGraph: prior on unknown node " +
                                std::to_string(id));
  }
  if (prior_.has_value()) {
    throw std::invalid_argument("PoseGraph: prior already set");
  }
  prior_ = PriorConstraint{id, target, info};
}

void PoseGraph::add_se3_edge(int i, int j, const Pose3& rel, const Mat6& info) {
  if (!has_node(i) || !has_node(j)) {
    throw std::invalid_argument("PoseGraph: edge references unknown node");
  }
  edges_.push_back({i, j, rel, info});
}

void PoseGraph::add_odometry(int i, int j, const Pose3& rel, const Mat6& info) {
  if (j != i + 1) {
    throw std::invalid_argument("PoseGraph: odometry edges join consecutive nodes");
  }
  add_se3_edge(i, j, rel, info);
}

void PoseGraph::add_loop(const LoopCandidate& candidate, const PlanarTransform& rel,
                         double sigma_xy, double sigma_yaw, double weak_sigma) {
  if (candidate.query_floor != candidate.match_floor) {
    throw std::invalid_argument("PoseGraph: loop joins different floor labels");
  }
  // The estimator is planar: z, roll and pitch carry only weak information.
  const Mat6 info = diagonal_information(Vec3(sigma_xy, sigma_xy, weak_sigma),
                                         Vec3(weak_sigma, weak_sigma, sigma_yaw));
  add_se3_edge(candidate.match_id, candidate.query_id, rel.to_pose3(), info);
}

void PoseGraph::add_elevation_constraint(int i, double delta_z, double sigma) {
  if (!has_node(i)) {
    throw std::invalid_argument("PoseGraph: elevation on unknown node " +
                                std::to_string(i));
  }
  if (sigma <= 0.0) {
    throw std::invalid_argument("PoseGraph: non-positive elevation sigma");
  }
  if (!prior_.has_value()) {
    throw std::invalid_argument(
        "PoseGraph: set the prior before adding elevation constraints");
  }
  elevations_.push_back({i, prior_->target.t.z() + delta_z, sigma});
}

namespace {

Eigen::Matrix<double, 6, 1> se3_residual(const Pose3& rel, const Pose3& pose_i,
                                         const Pose3& pose_j) {
  const Pose3 between = pose_i.inverse() * pose_j;
  const Pose3 error = rel.inverse() * between;
  Vec6 r;
  r.head<3>() = error.t;
  r.tail<3>() = quat_log(error.q);
  return r;
}

// Square root of an information matrix via LLT, so residuals can be whitened
// as L^T r with info = L L^T.
Eigen::Matrix<double, 6, 6> info_sqrt(const Mat6& info) {
  const Eigen::LLT<Mat6> llt(info);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("PoseGraph: information matrix not positive definite");
  }
  return llt.matrixL().transpose();
}

}  // namespace

std::vector<ResidualBlock> linearize(const PoseGraph& graph, const PoseMap& poses) {
  std::vector<ResidualBlock> blocks;
  blocks.reserve(graph.edges().size() + graph.elevation_constraints().size() + 1);

  auto pose_of = [&poses](int id) -> const Pose3& {
    auto it = poses.find(id);
    if (it == poses.end()) {
      throw std::invalid_argument("linearize: missing pose for node " +
                                  std::to_string(id));
    }
    return it->second;
  };

  for (const auto& edge : graph.edges()) {
    const Pose3& pi = pose_of(edge.i);
    const Pose3& pj = pose_of(edge.j);
    const Mat3 zr_t = edge.rel.q.conjugate().toRotationMatrix();
    const Mat3 ri_t = pi.q.conjugate().toRotationMatrix();
    const Mat3 rj_t = pj.q.conjugate().toRotationMatrix();

    const Vec6 r = se3_residual(edge.rel, pi, pj);
    const Mat3 jr_inv = so3_right_jacobian_inverse(r.tail<3>());
    const Vec3 local_offset = ri_t * (pj.t - pi.t);

    // d residual / d [dt_i, dtheta_i] and [dt_j, dtheta_j], with
    // t <- t + dt and q <- q * exp(dtheta).
    Eigen::Matrix<double, 6, 6> ji = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> jj = Eigen::Matrix<double, 6, 6>::Zero();
    ji.block<3, 3>(0, 0) = -zr_t * ri_t;
    ji.block<3, 3>(0, 3) = zr_t * skew(local_offset);
    ji.block<3, 3>(3, 3) = -jr_inv * rj_t * pi.q.toRotationMatrix();
    jj.block<3, 3>(0, 0) = zr_t * ri_t;
    jj.block<3, 3>(3, 3) = jr_inv;

    const Eigen::Matrix<double, 6, 6> w = info_sqrt(edge.info);
    ResidualBlock block;
    block.residual = w * r;
    block.node_ids = {edge.i, edge.j};
    block.jacobians = {w * ji, w * jj};
    blocks.push_back(std::move(block));
  }

  for (const auto& elev : graph.elevation_constraints()) {
    const Pose3& p = pose_of(elev.id);
    ResidualBlock block;
    block.residual = Eigen::VectorXd::Constant(1, (p.t.z() - elev.z_target) / elev.sigma);
    block.node_ids = {elev.id};
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(1, 6);
    jac(0, 2) = 1.0 / elev.sigma;
    block.jacobians = {jac};
    blocks.push_back(std::move(block));
  }

  if (graph.prior().has_value()) {
    const auto& prior = *graph.prior();
    const Pose3& p = pose_of(prior.id);
    const Vec6 r = se3_residual(prior.target, Pose3(), p);
    const Mat3 jr_inv = so3_right_jacobian_inverse(r.tail<3>());
    Eigen::Matrix<double, 6, 6> jac = Eigen::Matrix<double, 6, 6>::Zero();
    jac.block<3, 3>(0, 0) = prior.target.q.conjugate().toRotationMatrix();
    jac.block<3, 3>(3, 3) = jr_inv;
    const Eigen::Matrix<double, 6, 6> w = info_sqrt(prior.info);
    ResidualBlock block;
    block.residual = w * r;
    block.node_ids = {prior.id};
    block.jacobians = {w * jac};
    blocks.push_back(std::move(block));
  }

  return blocks;
}

double total_cost(const PoseGraph& graph, const PoseMap& poses) {
  double cost = 0.0;
  for (const auto& block : linearize(graph, poses)) {
    cost += block.residual.squaredNorm();
  }
  return cost;
}

Pose3 retract(const Pose3& pose, const Vec6& delta) {
  Pose3 out;
  out.t = pose.t + delta.head<3>();
  out.q = (pose.q * quat_exp(delta.tail<3>())).normalized();
  return out;
}

OptimizeResult optimize(const PoseGraph& graph, const OptimizeParams& params) {
  if (!graph.prior().has_value()) {
    throw std::invalid_argument("optimize: graph has no prior");
  }
  constexpr double kLambdaCap = 1e12;

  PoseMap poses = graph.nodes();
  std::map<int, int> index_of;
  int count = 0;
  for (const auto& [id, pose] : poses) {
    (void)pose;
    index_of[id] = count++;
  }
  const int dim = 6 * count;

  OptimizeResult result;
  double cost = total_cost(graph, poses);
  result.cost_history.push_back(cost);

  double lambda = params.initial_lambda;
  int iteration = 0;
  for (; iteration < params.max_iterations; ++iteration) {
    if (cost == 0.0) break;

    const auto blocks = linearize(graph, poses);
    Eigen::VectorXd gradient = Eigen::VectorXd::Zero(dim);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(blocks.size() * 72);
    for (const auto& block : blocks) {
      for (std::size_t a = 0; a < block.node_ids.size(); ++a) {
        const int row0 = 6 * index_of.at(block.node_ids[a]);
        gradient.segment<6>(row0) +=
            block.jacobians[a].transpose() * block.residual;
        for (std::size_t b = 0; b < block.node_ids.size(); ++b) {
          const int col0 = 6 * index_of.at(block.node_ids[b]);
          const Eigen::MatrixXd h =
              block.jacobians[a].transpose() * block.jacobians[b];
          for (int r = 0; r < 6; ++r) {
            for (int c = 0; c < 6; ++c) {
              if (h(r, c) != 0.0) triplets.emplace_back(row0 + r, col0 + c, h(r, c));
            }
          }
        }
      }
    }

    if (gradient.lpNorm<Eigen::Infinity>() < 1e-14) break;  // stationary point

    bool accepted = false;
    while (!accepted) {
      std::vector<Eigen::Triplet<double>> damped = triplets;
      for (int d = 0; d < dim; ++d) damped.emplace_back(d, d, lambda);
      Eigen::SparseMatrix<double> h(dim, dim);
      h.setFromTriplets(damped.begin(), damped.end());
      Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> solver(h);
      bool solve_ok = solver.info() == Eigen::Success;
      Eigen::VectorXd step;
      if (solve_ok) {
        step = solver.solve(-gradient);
        solve_ok = solver.info() == Eigen::Success && step.allFinite();
      }

      double new_cost = std::numeric_limits<double>::infinity();
      PoseMap candidate;
      if (solve_ok) {
        candidate = poses;
        for (auto& [id, pose] : candidate) {
          pose = retract(pose, step.segment<6>(6 * index_of.at(id)));
        }
        new_cost = total_cost(graph, candidate);
      }

      if (solve_ok && new_cost <= cost) {
        poses = std::move(candidate);
        cost = new_cost;
        lambda = std::max(lambda * 0.5, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
        if (lambda > kLambdaCap) {
          result.poses = poses;
          result.final_cost = cost;
          result.iterations = iteration;
          throw OptimizationError("optimize: damping exceeded cap without progress",
                                  result);
        }
      }
    }

    const double previous = result.cost_history.back();
    result.cost_history.push_back(cost);
    if (std::abs(previous - cost) < params.cost_tolerance * std::max(previous, 1e-300)) {
      ++iteration;
      break;
    }
  }

  result.poses = std::move(poses);
  result.final_cost = cost;
  result.iterations = iteration;
  return result;
}

PoseGraph PoseGraph::load(const std::string& path) {
  const auto lines = read_lines(path);
  PoseGraph graph;
  struct PendingEdge {
    int i, j;
    Pose3 rel;
    Mat6 info;
  };
  std::vector<PendingEdge> edges;
  std::vector<ElevationConstraint> elevations;
  for (const auto& line : lines) {
    if (line.empty()) continue;
    const auto tok = split_ws(line);
    if (tok[0] == "VERTEX_SE3:QUAT") {
      if (tok.size() != 9) throw ValidationError(path + ": bad vertex line");
      const int id = static_cast<int>(parse_long(tok[1], path));
      Pose3 pose;
      pose.t = Vec3(parse_double(tok[2], path), parse_double(tok[3], path),
                    parse_double(tok[4], path));
      pose.q = Quat(parse_double(tok[8], path), parse_double(tok[5], path),
                    parse_double(tok[6], path), parse_double(tok[7], path));
      if (std::abs(pose.q.norm() - 1.0) > 1e-6) {
        throw ValidationError(path + ": vertex quaternion not unit");
      }
      graph.add_node(id, pose);
    } else if (tok[0] == "EDGE_SE3:QUAT") {
      if (tok.size() != 31) throw ValidationError(path + ": bad edge line");
      PendingEdge e;
      e.i = static_cast<int>(parse_long(tok[1], path));
      e.j = static_cast<int>(parse_long(tok[2], path));
      e.rel.t = Vec3(parse_double(tok[3], path), parse_double(tok[4], path),
                     parse_double(tok[5], path));
      e.rel.q = Quat(parse_double(tok[9], path), parse_double(tok[6], path),
                     parse_double(tok[7], path), parse_double(tok[8], path));
      int cursor = 10;
      for (int r = 0; r < 6; ++r) {
        for (int c = r; c < 6; ++c) {
          const double v = parse_double(tok[cursor++], path);
          e.info(r, c) = v;
          e.info(c, r) = v;
        }
      }
      edges.push_back(e);
    } else if (tok[0] == "EDGE_Z") {
      if (tok.size() != 4) throw ValidationError(path + ": bad EDGE_Z line");
      ElevationConstraint c;
      c.id = static_cast<int>(parse_long(tok[1], path));
      c.z_target = parse_double(tok[2], path);
      c.sigma = parse_double(tok[3], path);
      elevations.push_back(c);
    } else {
      throw ValidationError(path + ": unknown record " + tok[0]);
    }
  }
  if (graph.nodes_.empty()) throw ValidationError(path + ": no vertices");
  // The format carries no prior record: pin the lowest vertex at its pose.
  const int first = graph.nodes_.begin()->first;
  graph.set_prior(first, graph.nodes_.begin()->second,
                  diagonal_information(1e-3, 1e-3));
  for (const auto& e : edges) graph.add_se3_edge(e.i, e.j, e.rel, e.info);
  for (const auto& c : elevations) {
    if (!graph.has_node(c.id)) throw ValidationError(path + ": EDGE_Z unknown node");
    graph.elevations_.push_back(c);
  }
  return graph;
}

void PoseGraph::save(const std::string& path) const {
  std::ostringstream os;
  for (const auto& [id, pose] : nodes_) {
    os << "VERTEX_SE3:QUAT " << id << ' ' << format_double(pose.t.x()) << ' '
       << format_double(pose.t.y()) << ' ' << format_double(pose.t.z()) << ' '
       << format_double(pose.q.x()) << ' ' << format_double(pose.q.y()) << ' '
       << format_double(pose.q.z()) << ' ' << format_double(pose.q.w()) << '\n';
  }
  for (const auto& e : edges_) {
    os << "EDGE_SE3:QUAT " << e.i << ' ' << e.j << ' ' << format_double(e.rel.t.x())
       << ' ' << format_double(e.rel.t.y()) << ' ' << format_double(e.rel.t.z())
       << ' ' << format_double(e.rel.q.x()) << ' ' << format_double(e.rel.q.y())
       << ' ' << format_double(e.rel.q.z()) << ' ' << format_double(e.rel.q.w());
    for (int r = 0; r < 6; ++r) {
      for (int c = r; c < 6; ++c) os << ' ' << format_double(e.info(r, c));
    }
    os << '\n';
  }
  for (const auto& c : elevations_) {
    os << "EDGE_Z " << c.id << ' ' << format_double(c.z_target) << ' '
       << format_double(c.sigma) << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace mfnav
