#pragma once

#include <array>
#include <string>
#include <vector>

#include "platekit/geometry.hpp"

namespace platekit {

// Conforming triangulation with derived edge connectivity.
//
// Conventions:
//  - Triangles are stored CCW; local edge j is opposite local vertex j and is
//    traversed CCW from vertex j+1 to vertex j+2 (mod 3).
//  - Global edges store their endpoints as (lo, hi) with lo < hi; the global
//    edge tangent points from lo to hi and the global edge normal is the
//    tangent rotated by -90 degrees.
//  - tri_edge_sign[t][j] is +1 when the CCW traversal of local edge j agrees
//    with the global lo -> hi direction, else -1.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> tris;

  // Derived connectivity (filled by finalize()).
  std::vector<std::array<int, 2>> edges;           // (lo, hi), sorted lexicographically
  std::vector<std::array<int, 3>> tri_edges;       // global edge id per local edge
  std::vector<std::array<int, 3>> tri_edge_sign;   // +1 / -1 orientation flags
  std::vector<std::array<int, 2>> edge_tris;       // adjacent tris (-1 if none), lower id first
  std::vector<bool> vertex_on_boundary;
  std::vector<bool> edge_on_boundary;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_tris() const { return static_cast<int>(tris.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_interior_vertices() const;
  int num_interior_edges() const;

  // Paper's reporting mesh size h = (number of elements)^(-1/2).
  double mesh_size_parameter() const;

  double edge_length(int e) const;
  // Global unit tangent (lo -> hi) of edge e.
  Vec2 edge_tangent(int e) const;
  // Global unit normal of edge e (tangent rotated by -90 degrees).
  Vec2 edge_normal(int e) const;
};

// Uniform triangulation of the unit square with n x n cells, each split into
// two CCW triangles by one diagonal: 2 n^2 triangles total. The diagonal
// direction alternates between neighboring cells (checkerboard pattern),
// which is the mesh family the bundled reference errors correspond to.
Mesh build_uniform_square(int n);

// One step of uniform (red) refinement; parent vertices keep their indices
// and coordinates, edge midpoints are appended in global edge order.
Mesh refine_uniform(const Mesh& m);

// Rebuilds the derived connectivity from vertices/tris and validates the
// mesh; throws std::runtime_error naming the first offending entity.
void finalize_mesh(Mesh& m, bool require_single_component = true);

// Geometry of triangle t.
TriGeom entity_geometry(const Mesh& m, int t);

// Plain-text format: lines "v <x> <y>" then "t <i> <j> <k>" (0-based CCW).
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& m, const std::string& path);

}  // namespace platekit
