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

#ifndef MFNAV_BARO_HPP_
#define MFNAV_BARO_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mfnav {

/// One barometer reading. Streams are non-decreasing in t.
struct PressureSample {
  double t = 0.0;  // seconds since session start
  double p = 0.0;  // pascals
};

struct BaroConfig {
  int window = 100;                   // moving-average length, samples
  double p_cri = 101325.0;            // reference pressure at the start pose, Pa
  double floor_threshold = 2.5;       // m of altitude change that flips a floor
  double nominal_floor_height = 3.64; // m, reference anchor after a floor change
};

/// Altitude change from a window of pressure samples against the reference
/// pressure. Positive output means ascent.
double estimate_delta_z(std::span<const double> window, double p_cri);

/// Analytic inverse of estimate_delta_z for a single sample; serves as the
/// synthetic-pressure source and as the test oracle for the forward formula.
double pressure_for_altitude(double delta_z, double p_cri);

/// Discrete floor state driven by thresholded altitude changes.
///
/// A crossing re-anchors the reference at floor * nominal_floor_height, so a
/// reversal of at least floor_threshold is needed to undo a change and long
/// climbs cannot accumulate reference lag. Assumes stories of roughly the
/// configured nominal height.
struct FloorTracker {
  int current_floor = 0;
  double z_ref_of_floor = 0.0;
};

/// Feeds one altitude estimate (relative to the session start) into the
/// tracker; returns the updated floor index.
int update_floor(FloorTracker& tracker, double delta_z, const BaroConfig& cfg);

/// Trailing moving-average evaluator over a pressure stream. Keeps the most
/// recent cfg.window samples; with fewer samples it averages what is there.
class DeltaZEstimator {
 public:
  explicit DeltaZEstimator(const BaroConfig& cfg) : cfg_(cfg) {}

  void push(const PressureSample& s);

  /// Pushes every sample with t <= until from the stream cursor, then
  /// evaluates. The stream must be fed in time order.
  double delta_z() const;

  bool empty() const { return buffer_.empty(); }

 private:
  BaroConfig cfg_;
  std::vector<double> buffer_;  // ring of the last `window` pressures
  std::size_t next_ = 0;
  bool full_ = false;
};

std::vector<PressureSample> load_pressure_csv(const std::string& path);
void save_pressure_csv(const std::string& path,
                       const std::vector<PressureSample>& samples);

}  // namespace mfnav

#endif  // MFNAV_BARO_HPP_
