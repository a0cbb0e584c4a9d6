#pragma once

#include <array>
#include <cmath>

namespace platekit {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// Rotation by -90 degrees: maps a CCW boundary tangent to the outward normal.
inline Vec2 rotate_cw(const Vec2& v) { return {v.y, -v.x}; }

// Geometry of one triangle. Local edge j is opposite vertex j; its CCW
// traversal runs from vertex j+1 to vertex j+2 (indices mod 3).
struct TriGeom {
  std::array<Vec2, 3> v;        // physical vertex coordinates
  Vec2 centroid;
  std::array<Vec2, 3> vc;       // vertex coordinates relative to the centroid
  double area = 0.0;            // positive for CCW input
  double diameter = 0.0;        // longest edge
  std::array<double, 3> edge_len{};
  std::array<Vec2, 3> tangent;  // unit CCW traversal direction of edge j
  std::array<Vec2, 3> normal;   // outward unit normal of edge j
  std::array<Vec2, 3> grad_lambda;  // gradients of barycentric coordinates

  // Endpoints of edge j in CCW traversal order, centroid-relative.
  Vec2 edge_start_c(int j) const { return vc[(j + 1) % 3]; }
  Vec2 edge_end_c(int j) const { return vc[(j + 2) % 3]; }
};

// Builds TriGeom from physical vertices. Throws std::runtime_error on
// degenerate or clockwise triangles.
TriGeom make_tri_geom(const Vec2& a, const Vec2& b, const Vec2& c);

}  // namespace platekit
