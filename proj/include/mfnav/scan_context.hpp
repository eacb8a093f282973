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

#ifndef MFNAV_SCAN_CONTEXT_HPP_
#define MFNAV_SCAN_CONTEXT_HPP_

#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mfnav/scan.hpp"

namespace mfnav {

struct LoopDbConfig {
  int n_rings = 20;
  int n_sectors = 60;
  double l_max = 40.0;           // m, indoor radial cutoff
  int top_k = 10;                // ring-key candidates per query
  double accept_threshold = 0.20;
  int exclusion_gap = 50;        // minimum node-id separation for a match
  double sensor_height = 0.5;    // m, added to z so bin heights stay >= 0
};

/// Polar descriptor of a scan: rings x sectors matrix of max point heights,
/// zero where a bin is empty.
struct ScanContext {
  Eigen::MatrixXd m;  // n_rings x n_sectors
  int floor = 0;
  int node_id = 0;
};

/// Rotation-invariant per-ring occupancy summary, the tree key.
using RingKey = Eigen::VectorXd;

struct LoopCandidate {
  int query_id = 0;
  int match_id = 0;
  double distance = 1.0;  // in [0, 1], below the acceptance threshold
  int shift = 0;          // sector offset of the best alignment
  int query_floor = 0;
  int match_floor = 0;
};

/// Bins scan points by (radius -> ring, azimuth -> sector), keeping the max
/// shifted height per bin. Points beyond l_max are dropped.
ScanContext make_descriptor(const Scan& scan, const LoopDbConfig& cfg, int floor);

RingKey ring_key(const ScanContext& descriptor);

/// Minimum over cyclic sector shifts of the mean column cosine distance,
/// ignoring column pairs that are empty on both sides. Returns the distance
/// and the minimizing shift s, where b shifted forward by s aligns with a.
std::pair<double, int> descriptor_distance(const ScanContext& a,
                                           const ScanContext& b);

/// Exact kd-tree over ring keys; incremental insertion, deterministic
/// k-nearest-neighbour queries.
class RingKeyTree {
 public:
  void insert(const RingKey& key, int payload);
  std::size_t size() const { return nodes_.size(); }

  /// k nearest payloads by Euclidean key distance, sorted by (distance,
  /// payload) for deterministic output.
  std::vector<std::pair<double, int>> knn(const RingKey& query, int k) const;

 private:
  struct Node {
    RingKey key;
    int payload;
    int dim;
    int left = -1, right = -1;
  };
  void search(int node_index, const RingKey& query, int k,
              std::vector<std::pair<double, int>>& best) const;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Floor-labeled place-recognition database: one ring-key tree per floor plus
/// a global tree kept for the unlabeled baseline. Many concurrent readers or
/// one writer.
class LoopDatabase {
 public:
  explicit LoopDatabase(const LoopDbConfig& cfg) : cfg_(cfg) {}

  void insert(int node_id, int floor, const ScanContext& descriptor);

  /// Searches only the tree matching the query's floor label.
  std::optional<LoopCandidate> query(const ScanContext& query) const;

  /// Searches the whole database regardless of labels.
  std::optional<LoopCandidate> query_all_floors(const ScanContext& query) const;

  std::size_t size() const { return descriptors_.size(); }
  std::size_t floor_tree_count() const { return floor_trees_.size(); }
  const LoopDbConfig& config() const { return cfg_; }

 private:
  std::optional<LoopCandidate> run_query(const ScanContext& query,
                                         const RingKeyTree& tree) const;

  LoopDbConfig cfg_;
  std::map<int, RingKeyTree> floor_trees_;
  RingKeyTree global_tree_;
  std::unordered_map<int, ScanContext> descriptors_;
};

}  // namespace mfnav

#endif  // MFNAV_SCAN_CONTEXT_HPP_
