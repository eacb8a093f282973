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

#include "mfnav/scan_context.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mfnav {

ScanContext make_descriptor(const Scan& scan, const LoopDbConfig& cfg, int floor) {
  if (scan.points.empty()) {
    throw std::invalid_argument("make_descriptor: empty scan");
  }
  ScanContext out;
  out.m = Eigen::MatrixXd::Zero(cfg.n_rings, cfg.n_sectors);
  out.floor = floor;
  out.node_id = scan.node_id;

  const double ring_width = cfg.l_max / cfg.n_rings;
  const double sector_width = 2.0 * std::numbers::pi / cfg.n_sectors;
  for (const auto& pt : scan.points) {
    const double radius = std::hypot(pt.p.x(), pt.p.y());
    if (radius > cfg.l_max) continue;
    int ring = static_cast<int>(radius / ring_width);
    ring = std::min(ring, cfg.n_rings - 1);
    double azimuth = std::atan2(pt.p.y(), pt.p.x());
    if (azimuth < 0.0) azimuth += 2.0 * std::numbers::pi;
    int sector = static_cast<int>(azimuth / sector_width);
    sector = std::min(sector, cfg.n_sectors - 1);
    const double height = std::max(0.0, pt.p.z() + cfg.sensor_height);
    out.m(ring, sector) = std::max(out.m(ring, sector), height);
  }
  return out;
}

RingKey ring_key(const ScanContext& descriptor) {
  const auto rings = descriptor.m.rows();
  const auto sectors = descriptor.m.cols();
  RingKey key(rings);
  for (Eigen::Index r = 0; r < rings; ++r) {
    int occupied = 0;
    for (Eigen::Index s = 0; s < sectors; ++s) {
      if (descriptor.m(r, s) > 0.0) ++occupied;
    }
    key[r] = static_cast<double>(occupied) / static_cast<double>(sectors);
  }
  return key;
}

std::pair<double, int> descriptor_distance(const ScanContext& a,
                                           const ScanContext& b) {
  if (a.m.rows() != b.m.rows() || a.m.cols() != b.m.cols()) {
    throw std::invalid_argument("descriptor_distance: dimension mismatch");
  }
  const int sectors = static_cast<int>(a.m.cols());
  const Eigen::VectorXd a_norms = a.m.colwise().norm();
  const Eigen::VectorXd b_norms = b.m.colwise().norm();

  double best = 1.0;
  int best_shift = 0;
  for (int shift = 0; shift < sectors; ++shift) {
    double sum = 0.0;
    int effective = 0;
    for (int col = 0; col < sectors; ++col) {
      const int b_col = (col + shift) % sectors;
      const double an = a_norms[col];
      const double bn = b_norms[b_col];
      if (an == 0.0 && bn == 0.0) continue;  // mutually empty, no evidence
      ++effective;
      if (an == 0.0 || bn == 0.0) {
        sum += 1.0;  // one side empty: orthogonal
        continue;
      }
      const double cosine = a.m.col(col).dot(b.m.col(b_col)) / (an * bn);
      sum += 1.0 - cosine;
    }
    const double dist = effective > 0 ? sum / effective : 1.0;
    if (dist < best) {
      best = dist;
      best_shift = shift;
    }
  }
  return {best, best_shift};
}

void RingKeyTree::insert(const RingKey& key, int payload) {
  const int index = static_cast<int>(nodes_.size());
  const int dims = static_cast<int>(key.size());
  if (root_ == -1) {
    nodes_.push_back({key, payload, 0});
    root_ = index;
    return;
  }
  int cur = root_;
  while (true) {
    Node& node = nodes_[cur];
    int& child = key[node.dim] < node.key[node.dim] ? node.left : node.right;
    if (child == -1) {
      const int child_dim = (node.dim + 1) % dims;
      child = index;
      nodes_.push_back({key, payload, child_dim});
      return;
    }
    cur = child;
  }
}

void RingKeyTree::search(int node_index, const RingKey& query, int k,
                         std::vector<std::pair<double, int>>& best) const {
  if (node_index == -1) return;
  const Node& node = nodes_[node_index];
  const double d2 = (node.key - query).squaredNorm();
  const std::pair<double, int> entry{d2, node.payload};
  if (static_cast<int>(best.size()) < k || entry < best.back()) {
    best.insert(std::upper_bound(best.begin(), best.end(), entry), entry);
    if (static_cast<int>(best.size()) > k) best.pop_back();
  }
  const double plane_delta = query[node.dim] - node.key[node.dim];
  const int near = plane_delta < 0.0 ? node.left : node.right;
  const int far = plane_delta < 0.0 ? node.right : node.left;
  search(near, query, k, best);
  if (static_cast<int>(best.size()) < k ||
      plane_delta * plane_delta <= best.back().first) {
    search(far, query, k, best);
  }
}

std::vector<std::pair<double, int>> RingKeyTree::knn(const RingKey& query,
                                                     int k) const {
  std::vector<std::pair<double, int>> best;
  best.reserve(k + 1);
  search(root_, query, k, best);
  for (auto& [d2, payload] : best) d2 = std::sqrt(d2);
  return best;
}

void LoopDatabase::insert(int node_id, int floor, const ScanContext& descriptor) {
  if (descriptors_.count(node_id) > 0) {
    throw std::invalid_argument("LoopDatabase::insert: duplicate node id " +
                                std::to_string(node_id));
  }
  const RingKey key = ring_key(descriptor);
  floor_trees_[floor].insert(key, node_id);  // tree created lazily per label
  global_tree_.insert(key, node_id);
  ScanContext stored = descriptor;
  stored.node_id = node_id;
  stored.floor = floor;
  descriptors_.emplace(node_id, std::move(stored));
}

std::optional<LoopCandidate> LoopDatabase::run_query(
    const ScanContext& query, const RingKeyTree& tree) const {
  const auto neighbours = tree.knn(ring_key(query), cfg_.top_k);
  std::optional<LoopCandidate> best;
  for (const auto& [key_dist, node_id] : neighbours) {
    (void)key_dist;
    if (std::abs(node_id - query.node_id) < cfg_.exclusion_gap) continue;
    const ScanContext& stored = descriptors_.at(node_id);
    const auto [dist, shift] = descriptor_distance(query, stored);
    if (dist >= cfg_.accept_threshold) continue;
    if (!best || dist < best->distance ||
        (dist == best->distance && node_id < best->match_id)) {
      LoopCandidate c;
      c.query_id = query.node_id;
      c.match_id = node_id;
      c.distance = dist;
      c.shift = shift;
      c.query_floor = query.floor;
      c.match_floor = stored.floor;
      best = c;
    }
  }
  return best;
}

std::optional<LoopCandidate> LoopDatabase::query(const ScanContext& query) const {
  auto it = floor_trees_.find(query.floor);
  if (it == floor_trees_.end()) return std::nullopt;
  return run_query(query, it->second);
}

std::optional<LoopCandidate> LoopDatabase::query_all_floors(
    const ScanContext& query) const {
  return run_query(query, global_tree_);
}

}  // namespace mfnav
