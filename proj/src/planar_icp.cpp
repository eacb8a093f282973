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

#include "mfnav/planar_icp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mfnav/errors.hpp"

namespace mfnav {

namespace {

constexpr int kMaxIterations = 30;
constexpr double kDownsampleLeaf = 0.2;       // m
constexpr double kMaxCorrespondence = 1.5;    // m
constexpr double kAcceptRms = 0.5;            // m
constexpr double kConvergenceDelta = 1e-9;
// Height band (relative to the sensor) kept for matching: walls only, no
// floor or ceiling rings that would track the robot instead of the world.
constexpr double kZBandLow = -0.2;
constexpr double kZBandHigh = 1.2;

using Point2 = Eigen::Vector2d;

std::vector<Point2> flatten_and_downsample(const Scan& scan) {
  struct CellHash {
    std::size_t operator()(const std::pair<int, int>& c) const {
      return std::hash<long long>()((static_cast<long long>(c.first) << 32) ^
                                    static_cast<unsigned int>(c.second));
    }
  };
  std::unordered_map<std::pair<int, int>, std::pair<Point2, int>, CellHash> cells;
  for (const auto& pt : scan.points) {
    if (pt.p.z() < kZBandLow || pt.p.z() > kZBandHigh) continue;
    const std::pair<int, int> cell{
        static_cast<int>(std::floor(pt.p.x() / kDownsampleLeaf)),
        static_cast<int>(std::floor(pt.p.y() / kDownsampleLeaf))};
    auto [it, inserted] = cells.try_emplace(cell, Point2(pt.p.x(), pt.p.y()), 1);
    if (!inserted) {
      it->second.first += Point2(pt.p.x(), pt.p.y());
      it->second.second += 1;
    }
  }
  std::vector<Point2> out;
  out.reserve(cells.size());
  for (const auto& [cell, acc] : cells) {
    (void)cell;
    out.push_back(acc.first / acc.second);
  }
  return out;
}

// Uniform grid over the target cloud for nearest-neighbour lookups.
class TargetGrid {
 public:
  explicit TargetGrid(const std::vector<Point2>& points) : points_(points) {
    for (std::size_t n = 0; n < points.size(); ++n) {
      grid_[key(points[n])].push_back(n);
    }
  }

  bool nearest(const Point2& p, Point2& out) const {
    const auto [ci, cj] = key(p);
    double best_d2 = kMaxCorrespondence * kMaxCorrespondence;
    const Point2* best = nullptr;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        auto it = grid_.find({ci + di, cj + dj});
        if (it == grid_.end()) continue;
        for (std::size_t n : it->second) {
          const double d2 = (points_[n] - p).squaredNorm();
          if (d2 < best_d2) {
            best_d2 = d2;
            best = &points_[n];
          }
        }
      }
    }
    if (best != nullptr) out = *best;
    return best != nullptr;
  }

 private:
  struct CellHash {
    std::size_t operator()(const std::pair<int, int>& c) const {
      return std::hash<long long>()((static_cast<long long>(c.first) << 32) ^
                                    static_cast<unsigned int>(c.second));
    }
  };
  static std::pair<int, int> key(const Point2& p) {
    return {static_cast<int>(std::floor(p.x() / kMaxCorrespondence)),
            static_cast<int>(std::floor(p.y() / kMaxCorrespondence))};
  }
  const std::vector<Point2>& points_;
  std::unordered_map<std::pair<int, int>, std::vector<std::size_t>, CellHash> grid_;
};

// Closed-form planar absolute orientation for paired points.
PlanarTransform solve_rigid(const std::vector<Point2>& src,
                            const std::vector<Point2>& dst) {
  Point2 src_mean = Point2::Zero(), dst_mean = Point2::Zero();
  for (std::size_t n = 0; n < src.size(); ++n) {
    src_mean += src[n];
    dst_mean += dst[n];
  }
  src_mean /= static_cast<double>(src.size());
  dst_mean /= static_cast<double>(src.size());
  double sxx = 0, sxy = 0, syx = 0, syy = 0;
  for (std::size_t n = 0; n < src.size(); ++n) {
    const Point2 a = src[n] - src_mean;
    const Point2 b = dst[n] - dst_mean;
    sxx += a.x() * b.x();
    sxy += a.x() * b.y();
    syx += a.y() * b.x();
    syy += a.y() * b.y();
  }
  PlanarTransform t;
  t.dyaw = std::atan2(sxy - syx, sxx + syy);
  const double c = std::cos(t.dyaw), s = std::sin(t.dyaw);
  t.dx = dst_mean.x() - (c * src_mean.x() - s * src_mean.y());
  t.dy = dst_mean.y() - (s * src_mean.x() + c * src_mean.y());
  return t;
}

}  // namespace

RelativePoseEstimate estimate_relative_pose(const Scan& query, const Scan& match,
                                            int shift, const LoopDbConfig& cfg) {
  if (query.points.empty() || match.points.empty()) {
    throw std::invalid_argument("estimate_relative_pose: empty scan");
  }
  const std::vector<Point2> src = flatten_and_downsample(query);
  const std::vector<Point2> dst = flatten_and_downsample(match);
  if (src.empty() || dst.empty()) {
    throw RejectedLoopError("estimate_relative_pose: no points in matching band",
                            std::numeric_limits<double>::infinity());
  }
  const TargetGrid grid(dst);

  PlanarTransform transform;
  transform.dyaw = shift * (2.0 * std::numbers::pi / cfg.n_sectors);

  double rms = std::numeric_limits<double>::infinity();
  int iterations = 0;
  for (; iterations < kMaxIterations; ++iterations) {
    std::vector<Point2> paired_src, paired_dst;
    paired_src.reserve(src.size());
    paired_dst.reserve(src.size());
    double sq_sum = 0.0;
    for (const auto& p : src) {
      const Point2 moved = transform.apply(p);
      Point2 nn;
      if (!grid.nearest(moved, nn)) continue;
      paired_src.push_back(p);
      paired_dst.push_back(nn);
      sq_sum += (moved - nn).squaredNorm();
    }
    if (paired_src.size() < 3) {
      throw RejectedLoopError("estimate_relative_pose: too few correspondences",
                              std::numeric_limits<double>::infinity());
    }
    rms = std::sqrt(sq_sum / paired_src.size());
    const PlanarTransform next = solve_rigid(paired_src, paired_dst);
    const double delta = std::abs(next.dx - transform.dx) +
                         std::abs(next.dy - transform.dy) +
                         std::abs(next.dyaw - transform.dyaw);
    transform = next;
    if (delta < kConvergenceDelta) break;
  }

  if (rms > kAcceptRms) {
    throw RejectedLoopError("estimate_relative_pose: residual " +
                                std::to_string(rms) + " m exceeds acceptance",
                            rms);
  }
  RelativePoseEstimate out;
  out.transform = transform;
  out.rms_residual = rms;
  out.iterations = iterations;
  return out;
}

}  // namespace mfnav
