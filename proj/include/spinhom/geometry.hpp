#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace spinhom {

// Point/vector in dimension 2 or 3. The third component stays 0 in 2D so
// that dot products and norms are dimension-agnostic.
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec() = default;
  Vec(double x, double y) : c{x, y, 0.0} {}
  Vec(double x, double y, double z) : c{x, y, z} {}

  double& operator[](int i) { return c[static_cast<size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<size_t>(i)]; }

  Vec operator+(const Vec& o) const { return {c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2]}; }
  Vec operator-(const Vec& o) const { return {c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2]}; }
  Vec operator*(double s) const { return {c[0] * s, c[1] * s, c[2] * s}; }
  Vec operator-() const { return {-c[0], -c[1], -c[2]}; }
  bool operator==(const Vec& o) const { return c == o.c; }
};

inline double dot(const Vec& a, const Vec& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }
inline Vec cross(const Vec& a, const Vec& b) {
  return {a.c[1] * b.c[2] - a.c[2] * b.c[1],
          a.c[2] * b.c[0] - a.c[0] * b.c[2],
          a.c[0] * b.c[1] - a.c[1] * b.c[0]};
}
inline Vec normalized(const Vec& a) {
  double n = norm(a);
  return {a.c[0] / n, a.c[1] / n, a.c[2] / n};
}

// Axis-aligned box; components beyond `dim` are ignored.
struct Box {
  int dim = 2;
  Vec lo, hi;

  double side(int i) const { return hi[i] - lo[i]; }
  double min_side() const {
    double s = side(0);
    for (int i = 1; i < dim; ++i) s = std::min(s, side(i));
    return s;
  }
  bool contains(const Vec& p, double margin = 0.0) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] + margin || p[i] > hi[i] - margin) return false;
    return true;
  }
  // Distance from p to the box boundary (positive inside).
  double boundary_distance(const Vec& p) const {
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
      d = std::min(d, p[i] - lo[i]);
      d = std::min(d, hi[i] - p[i]);
    }
    return d;
  }
  Box shifted(const Vec& z) const {
    Box b = *this;
    b.lo = lo + z;
    b.hi = hi + z;
    return b;
  }
};

}  // namespace spinhom
