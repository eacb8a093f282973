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

#ifndef MFNAV_PLANAR_ICP_HPP_
#define MFNAV_PLANAR_ICP_HPP_

#include "mfnav/scan.hpp"
#include "mfnav/scan_context.hpp"
#include "mfnav/se3.hpp"

namespace mfnav {

struct RelativePoseEstimate {
  PlanarTransform transform;  // maps query-frame points onto match-frame points
  double rms_residual = 0.0;
  int iterations = 0;
};

/// Planar alignment of two scans for a loop-closure edge. The yaw is seeded
/// from the descriptor sector shift, then refined by point-to-point ICP on
/// z-flattened, voxel-downsampled wall points. Throws RejectedLoopError when
/// the final RMS residual exceeds 0.5 m.
RelativePoseEstimate estimate_relative_pose(const Scan& query, const Scan& match,
                                            int shift, const LoopDbConfig& cfg);

}  // namespace mfnav

#endif  // MFNAV_PLANAR_ICP_HPP_
