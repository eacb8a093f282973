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

#include "mfnav/scan.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "mfnav/errors.hpp"
#include "mfnav/io_util.hpp"

namespace mfnav {

double mean_squared_range(const Scan& scan) {
  if (scan.points.empty()) {
    throw std::invalid_argument("mean_squared_range: empty scan");
  }
  double sum = 0.0;
  for (const auto& pt : scan.points) sum += pt.p.squaredNorm();
  return sum / static_cast<double>(scan.points.size());
}

bool detect_elevator_interior(const Scan& scan, const ElevatorDetectConfig& cfg) {
  return mean_squared_range(scan) < cfg.range_sq_threshold;
}

namespace {

// 1D samples from 0 to span (inclusive, endpoint appended when the spacing
// does not divide the span).
std::vector<double> sample_axis(double span, double spacing) {
  std::vector<double> out;
  for (double v = 0.0; v <= span + 1e-12; v += spacing) out.push_back(std::min(v, span));
  if (std::abs(out.back() - span) > 1e-12) out.push_back(span);
  return out;
}

}  // namespace

Scan synthesize_elevator_cloud(const ElevatorDetectConfig& cfg, double delta_z,
                               double base_pose_z) {
  if (delta_z == 0.0) {
    throw std::invalid_argument("synthesize_elevator_cloud: zero altitude change");
  }
  const double a = cfg.footprint_a;
  const double b = cfg.footprint_b;
  const double z_lo = base_pose_z + std::min(0.0, delta_z);
  const double z_hi = base_pose_z + std::max(0.0, delta_z);

  const auto zs = sample_axis(z_hi - z_lo, cfg.shell_spacing);
  const auto xs = sample_axis(2.0 * a, cfg.shell_spacing);
  const auto ys = sample_axis(2.0 * b, cfg.shell_spacing);

  Scan out;
  out.points.reserve(zs.size() * 2 * (xs.size() + ys.size()));
  for (double dz : zs) {
    const double z = z_lo + dz;
    for (double dx : xs) {
      out.points.push_back({Vec3(dx - a, -b, z), 0});
      out.points.push_back({Vec3(dx - a, b, z), 0});
    }
    for (double dy : ys) {
      // Corners already emitted by the y = +-b faces.
      if (dy < 1e-12 || dy > 2.0 * b - 1e-12) continue;
      out.points.push_back({Vec3(-a, dy - b, z), 0});
      out.points.push_back({Vec3(a, dy - b, z), 0});
    }
  }
  return out;
}

Scan load_scan_csv(const std::string& path, int node_id, double t) {
  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != "x,y,z,channel") {
    throw ValidationError(path + ": expected header x,y,z,channel");
  }
  Scan scan;
  scan.node_id = node_id;
  scan.t = t;
  scan.points.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cols = split(lines[i], ',');
    if (cols.size() != 4) throw ValidationError(path + ": bad row " + lines[i]);
    ScanPoint pt;
    pt.p = Vec3(parse_double(cols[0], path), parse_double(cols[1], path),
                parse_double(cols[2], path));
    pt.channel = static_cast<int>(parse_long(cols[3], path));
    if (pt.channel < 0 || pt.channel >= kNumChannels) {
      throw ValidationError(path + ": channel out of range in " + lines[i]);
    }
    scan.points.push_back(pt);
  }
  return scan;
}

void save_scan_csv(const std::string& path, const Scan& scan) {
  std::ostringstream os;
  os << "x,y,z,channel\n";
  for (const auto& pt : scan.points) {
    os << format_double(pt.p.x()) << ',' << format_double(pt.p.y()) << ','
       << format_double(pt.p.z()) << ',' << pt.channel << '\n';
  }
  write_text_file(path, os.str());
}

}  // namespace mfnav
