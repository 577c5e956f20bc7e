#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

namespace crunch {

using Point = Eigen::Vector2d;

// A closed polygon ring: >= 4 vertices, first == last.
using Ring = std::vector<Point>;

struct Bounds {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  bool contains(const Point& p) const {
    return p.x() >= xmin && p.x() <= xmax && p.y() >= ymin && p.y() <= ymax;
  }
  void expand(const Point& p) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  static Bounds around(const Point& p) { return {p.x(), p.y(), p.x(), p.y()}; }
};

// Shoelace area; positive for counterclockwise rings.
inline double ring_signed_area(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += ring[i].x() * ring[i + 1].y() - ring[i + 1].x() * ring[i].y();
  }
  return 0.5 * twice;
}

// Even-odd crossing test over one ring.
inline bool point_in_ring(const Point& p, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 2; i + 1 < ring.size(); j = i++) {
    const Point& a = ring[i];
    const Point& b = ring[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross =
          a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

// Even-odd parity across a set of rings (holes flip the parity back).
inline bool point_in_rings(const Point& p, const std::vector<Ring>& rings) {
  bool inside = false;
  for (const Ring& ring : rings) {
    if (point_in_ring(p, ring)) inside = !inside;
  }
  return inside;
}

inline Bounds rings_bounds(const std::vector<Ring>& rings) {
  Bounds b = Bounds::around(rings.front().front());
  for (const Ring& ring : rings) {
    for (const Point& p : ring) b.expand(p);
  }
  return b;
}

}  // namespace crunch
