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

#include "mfnav/baro.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"

namespace mfnav {

namespace {
// International pressure equation constants.
constexpr double kAltitudeScale = 44330.0;
constexpr double kPressureExponent = 5.255;
}  // namespace

double estimate_delta_z(std::span<const double> window, double p_cri) {
  if (window.empty()) {
    throw std::invalid_argument("estimate_delta_z: empty pressure window");
  }
  if (p_cri <= 0.0) {
    throw std::invalid_argument("estimate_delta_z: non-positive reference pressure");
  }
  double sum = 0.0;
  for (double p : window) {
    if (p <= 0.0) {
      throw std::invalid_argument("estimate_delta_z: non-positive pressure sample");
    }
    sum += p;
  }
  const double mean = sum / static_cast<double>(window.size());
  return kAltitudeScale * (1.0 - std::pow(mean / p_cri, 1.0 / kPressureExponent));
}

double pressure_for_altitude(double delta_z, double p_cri) {
  if (delta_z >= kAltitudeScale) {
    throw std::domain_error("pressure_for_altitude: altitude outside model range");
  }
  if (p_cri <= 0.0) {
    throw std::invalid_argument("pressure_for_altitude: non-positive reference pressure");
  }
  return p_cri * std::pow(1.0 - delta_z / kAltitudeScale, kPressureExponent);
}

int update_floor(FloorTracker& tracker, double delta_z, const BaroConfig& cfg) {
  // Each crossing moves one floor and re-anchors the reference at the new
  // floor's nominal height; the loop absorbs jumps spanning several floors.
  while (std::abs(delta_z - tracker.z_ref_of_floor) > cfg.floor_threshold) {
    tracker.current_floor += (delta_z > tracker.z_ref_of_floor) ? 1 : -1;
    tracker.z_ref_of_floor = tracker.current_floor * cfg.nominal_floor_height;
  }
  return tracker.current_floor;
}

void DeltaZEstimator::push(const PressureSample& s) {
  if (s.p <= 0.0) {
    throw std::invalid_argument("DeltaZEstimator: non-positive pressure sample");
  }
  const auto window = static_cast<std::size_t>(cfg_.window);
  if (buffer_.size() < window) {
    buffer_.push_back(s.p);
    full_ = buffer_.size() == window;
  } else {
    buffer_[next_] = s.p;
    next_ = (next_ + 1) % window;
  }
}

double DeltaZEstimator::delta_z() const {
  return estimate_delta_z(std::span<const double>(buffer_), cfg_.p_cri);
}

std::vector<PressureSample> load_pressure_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "t_s,pressure_pa") {
    throw ValidationError(path + ": expected header t_s,pressure_pa");
  }
  std::vector<PressureSample> out;
  out.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cols = split(lines[i], ',');
    if (cols.size() != 2) throw ValidationError(path + ": bad row " + lines[i]);
    PressureSample s;
    s.t = parse_double(cols[0], path);
    s.p = parse_double(cols[1], path);
    if (!out.empty() && s.t < out.back().t) {
      throw ValidationError(path + ": timestamps must be non-decreasing");
    }
    out.push_back(s);
  }
  return out;
}

void save_pressure_csv(const std::string& path,
                       const std::vector<PressureSample>& samples) {
  std::ostringstream os;
  os << "t_s,pressure_pa\n";
  for (const auto& s : samples) {
    os << format_double(s.t) << ',' << format_double(s.p) << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace mfnav
