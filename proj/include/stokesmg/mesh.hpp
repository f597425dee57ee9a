#pragma once

// Nested triangulations of the unit square. Level 0 is the criss-cross mesh
// (8 triangles fanning out from the centre); each refinement splits every
// triangle into four congruent children through its edge midpoints.
//
// P2 node numbering on a level: vertices first (0..V-1), then edge
// midpoints (V..V+E-1). P1 nodes are the vertices.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "stokesmg/sparse.hpp"

namespace stokesmg {

inline constexpr double kBoundaryTolerance = 1e-12;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

bool on_unit_square_boundary(const Point& p);

struct Vertex {
  Point pos;
  bool on_boundary = false;
};

struct Edge {
  std::array<Index, 2> vertices{};
  Point midpoint;
  bool on_boundary = false;
};

struct Triangle {
  std::array<Index, 3> vertices{};  // counterclockwise
  std::array<Index, 3> edges{};     // edges[i] is opposite vertices[i]
};

/// Which coarse entity a fine vertex comes from.
struct VertexParent {
  enum class Kind : std::uint8_t { vertex, edge };
  Kind kind = Kind::vertex;
  Index id = 0;
};

struct MeshLevel {
  int level = 0;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<Triangle> triangles;
  double h = 0.0;  // longest edge

  // Empty on a level built from scratch; filled by refine().
  std::vector<Index> parent_triangle;
  std::vector<VertexParent> vertex_parent;

  Index num_vertices() const { return static_cast<Index>(vertices.size()); }
  Index num_edges() const { return static_cast<Index>(edges.size()); }
  Index num_triangles() const { return static_cast<Index>(triangles.size()); }

  Index num_p2_nodes() const { return num_vertices() + num_edges(); }
  Point p2_node(Index node) const;
  bool p2_node_on_boundary(Index node) const;

  /// The six P2 nodes of a triangle: 3 vertices, then the midpoints of the
  /// edges opposite them.
  std::array<Index, 6> p2_nodes(Index t) const;
  std::array<Point, 3> corners(Index t) const;
  double signed_area(Index t) const;
};

struct MeshHierarchy {
  std::vector<MeshLevel> levels;

  int max_level() const { return static_cast<int>(levels.size()) - 1; }
  const MeshLevel& operator[](int k) const { return levels.at(k); }
};

MeshLevel build_coarse_mesh();
MeshLevel refine(const MeshLevel& coarse);

/// Levels 0..max_level. Throws ResourceError when the finest level would
/// not fit in memory.
MeshHierarchy build_hierarchy(int max_level);

/// Debug dump: "v x y" per vertex, "t i j k" per triangle.
void write_mesh(std::ostream& os, const MeshLevel& mesh);

}  // namespace stokesmg
