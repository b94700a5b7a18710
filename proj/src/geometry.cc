// Copyright 2026 The ibrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ibr/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ibr/errors.h"

namespace ibr {

RegionSpec RegionSpec::Disk(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorKind::kDomain, "disk radius must be positive");
  }
  return RegionSpec(Shape::kDisk, radius, 0.0, 0.0);
}

RegionSpec RegionSpec::Rectangle(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) ||
      !std::isfinite(height)) {
    throw Error(ErrorKind::kDomain, "rectangle sides must be positive");
  }
  return RegionSpec(Shape::kRectangle, 0.0, width, height);
}

double RegionSpec::area() const {
  return shape_ == Shape::kDisk ? kPi * radius_ * radius_ : width_ * height_;
}

bool RegionSpec::Contains(const Point& p) const {
  if (shape_ == Shape::kDisk) return p.x * p.x + p.y * p.y <= radius_ * radius_;
  return p.x >= 0.0 && p.x <= width_ && p.y >= 0.0 && p.y <= height_;
}

std::vector<Point> SamplePositions(const RegionSpec& region, int n_players,
                                   Engine& rng) {
  if (n_players <= 0) {
    throw Error(ErrorKind::kEmptyNetwork, "cannot place zero players");
  }
  std::vector<Point> points;
  points.reserve(n_players);
  for (int i = 0; i < n_players; ++i) {
    if (region.shape() == RegionSpec::Shape::kDisk) {
      // Rejection from the bounding square keeps the draw exactly uniform.
      const double r = region.radius();
      Point p;
      do {
        p.x = (2.0 * UniformUnit(rng) - 1.0) * r;
        p.y = (2.0 * UniformUnit(rng) - 1.0) * r;
      } while (p.x * p.x + p.y * p.y > r * r);
      points.push_back(p);
    } else {
      const double x = UniformUnit(rng) * region.width();
      const double y = UniformUnit(rng) * region.height();
      points.push_back({x, y});
    }
  }
  return points;
}

double Distance(const Point& p, const Point& q) {
  return std::hypot(q.x - p.x, q.y - p.y);
}

double WrapAngle(double radians) {
  double a = std::remainder(radians, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double AngleOffset(const Point& origin, const Point& target,
                   double bisector_heading) {
  if (origin == target) {
    throw Error(ErrorKind::kDegenerateGeometry,
                "angle offset undefined for coincident points");
  }
  const double bearing = std::atan2(target.y - origin.y, target.x - origin.x);
  return WrapAngle(bearing - bisector_heading);
}

std::vector<PlayerId> NearestNeighbors(std::span<const Point> points,
                                       PlayerId index, int count) {
  const int n = static_cast<int>(points.size());
  if (index < 0 || index >= n) {
    throw Error(ErrorKind::kDomain, "player index out of range");
  }
  if (count < 0 || count > n - 1) {
    throw Error(ErrorKind::kInsufficientPlayers,
                "asked for " + std::to_string(count) + " neighbours among " +
                    std::to_string(n - 1) + " other players");
  }
  std::vector<std::pair<double, PlayerId>> keyed;
  keyed.reserve(n - 1);
  for (PlayerId m = 0; m < n; ++m) {
    if (m != index) keyed.emplace_back(Distance(points[index], points[m]), m);
  }
  std::partial_sort(keyed.begin(), keyed.begin() + count, keyed.end());
  std::vector<PlayerId> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(keyed[i].second);
  return out;
}

}  // namespace ibr
