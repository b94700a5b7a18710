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

#ifndef IBR_GEOMETRY_H_
#define IBR_GEOMETRY_H_

#include <span>
#include <vector>

#include "ibr/rng.h"

namespace ibr {

inline constexpr double kPi = 3.14159265358979323846;

using PlayerId = int;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Planar deployment region. Node density lambda is 1 / area.
class RegionSpec {
 public:
  enum class Shape { kDisk, kRectangle };

  // Disk centred at the origin.
  static RegionSpec Disk(double radius);
  // Axis-aligned rectangle with its lower-left corner at the origin.
  static RegionSpec Rectangle(double width, double height);

  Shape shape() const { return shape_; }
  double radius() const { return radius_; }
  double width() const { return width_; }
  double height() const { return height_; }

  double area() const;
  double lambda() const { return 1.0 / area(); }
  bool Contains(const Point& p) const;

 private:
  RegionSpec(Shape shape, double radius, double width, double height)
      : shape_(shape), radius_(radius), width_(width), height_(height) {}

  Shape shape_;
  double radius_;
  double width_;
  double height_;
};

// n_players i.i.d. uniform points in the region. Throws kEmptyNetwork for
// n_players == 0.
std::vector<Point> SamplePositions(const RegionSpec& region, int n_players,
                                   Engine& rng);

double Distance(const Point& p, const Point& q);

// Signed angle of the origin->target ray relative to a bisector heading,
// wrapped to (-pi, pi]. Counterclockwise positive, 0 along +x.
// Throws kDegenerateGeometry when origin == target.
double AngleOffset(const Point& origin, const Point& target,
                   double bisector_heading);

// Wraps an angle to (-pi, pi].
double WrapAngle(double radians);

// The `count` players closest to points[index] (excluding index), ordered by
// (distance, index). Exact full scan. Throws kInsufficientPlayers when
// count > points.size() - 1.
std::vector<PlayerId> NearestNeighbors(std::span<const Point> points,
                                       PlayerId index, int count);

}  // namespace ibr

#endif  // IBR_GEOMETRY_H_
