#pragma once

#include <cmath>

namespace rtc {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distSq(const Point& a, const Point& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double dist(const Point& a, const Point& b) {
  return std::sqrt(distSq(a, b));
}

}  // namespace rtc
