#include "stokesmg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <utility>

namespace stokesmg {

namespace {

// 8 * 4^10 triangles is roughly 8.4M elements, several GB once the
// Taylor-Hood operators are assembled.
constexpr int kMaxSupportedLevel = 10;

Point midpoint(const Point& a, const Point& b) {
  return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
}

double distance(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Assigns edges (deduplicated by vertex pair) and h to a level whose
// vertices and triangle corners are already set.
void build_edges(MeshLevel& mesh) {
  std::map<std::pair<Index, Index>, Index> lookup;
  mesh.edges.clear();
  double h = 0.0;
  for (auto& tri : mesh.triangles) {
    for (int i = 0; i < 3; ++i) {
      Index a = tri.vertices[(i + 1) % 3];
      Index b = tri.vertices[(i + 2) % 3];
      auto key = std::minmax(a, b);
      auto [it, inserted] =
          lookup.try_emplace({key.first, key.second}, mesh.num_edges());
      if (inserted) {
        Edge e;
        e.vertices = {key.first, key.second};
        e.midpoint = midpoint(mesh.vertices[key.first].pos,
                              mesh.vertices[key.second].pos);
        e.on_boundary = on_unit_square_boundary(e.midpoint) &&
                        mesh.vertices[key.first].on_boundary &&
                        mesh.vertices[key.second].on_boundary;
        h = std::max(h, distance(mesh.vertices[key.first].pos,
                                 mesh.vertices[key.second].pos));
        mesh.edges.push_back(e);
      }
      tri.edges[i] = it->second;
    }
  }
  mesh.h = h;
}

Vertex make_vertex(Point p) { return {p, on_unit_square_boundary(p)}; }

}  // namespace

bool on_unit_square_boundary(const Point& p) {
  return std::abs(p.x) <= kBoundaryTolerance ||
         std::abs(p.x - 1.0) <= kBoundaryTolerance ||
         std::abs(p.y) <= kBoundaryTolerance ||
         std::abs(p.y - 1.0) <= kBoundaryTolerance;
}

Point MeshLevel::p2_node(Index node) const {
  if (node < num_vertices()) return vertices[node].pos;
  return edges[node - num_vertices()].midpoint;
}

bool MeshLevel::p2_node_on_boundary(Index node) const {
  if (node < num_vertices()) return vertices[node].on_boundary;
  return edges[node - num_vertices()].on_boundary;
}

std::array<Index, 6> MeshLevel::p2_nodes(Index t) const {
  const auto& tri = triangles[t];
  const Index nv = num_vertices();
  return {tri.vertices[0],  tri.vertices[1],  tri.vertices[2],
          nv + tri.edges[0], nv + tri.edges[1], nv + tri.edges[2]};
}

std::array<Point, 3> MeshLevel::corners(Index t) const {
  const auto& tri = triangles[t];
  return {vertices[tri.vertices[0]].pos, vertices[tri.vertices[1]].pos,
          vertices[tri.vertices[2]].pos};
}

double MeshLevel::signed_area(Index t) const {
  auto [a, b, c] = corners(t);
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

MeshLevel build_coarse_mesh() {
  MeshLevel mesh;
  mesh.level = 0;
  // Boundary ring, counterclockwise from the origin, then the centre.
  const std::array<Point, 8> ring = {{{0.0, 0.0},
                                      {0.5, 0.0},
                                      {1.0, 0.0},
                                      {1.0, 0.5},
                                      {1.0, 1.0},
                                      {0.5, 1.0},
                                      {0.0, 1.0},
                                      {0.0, 0.5}}};
  for (const auto& p : ring) mesh.vertices.push_back(make_vertex(p));
  mesh.vertices.push_back(make_vertex({0.5, 0.5}));
  const Index centre = 8;
  for (Index i = 0; i < 8; ++i) {
    Triangle t;
    t.vertices = {i, (i + 1) % 8, centre};
    mesh.triangles.push_back(t);
  }
  build_edges(mesh);
  return mesh;
}

MeshLevel refine(const MeshLevel& coarse) {
  MeshLevel fine;
  fine.level = coarse.level + 1;
  const Index nv = coarse.num_vertices();
  fine.vertices.reserve(nv + coarse.num_edges());
  fine.vertex_parent.reserve(nv + coarse.num_edges());
  for (Index v = 0; v < nv; ++v) {
    fine.vertices.push_back(coarse.vertices[v]);
    fine.vertex_parent.push_back({VertexParent::Kind::vertex, v});
  }
  for (Index e = 0; e < coarse.num_edges(); ++e) {
    fine.vertices.push_back(
        {coarse.edges[e].midpoint, coarse.edges[e].on_boundary});
    fine.vertex_parent.push_back({VertexParent::Kind::edge, e});
  }

  fine.triangles.reserve(4 * coarse.triangles.size());
  fine.parent_triangle.reserve(4 * coarse.triangles.size());
  for (Index t = 0; t < coarse.num_triangles(); ++t) {
    const auto& tri = coarse.triangles[t];
    const auto& v = tri.vertices;
    // m[i] is the midpoint of the edge opposite v[i].
    const std::array<Index, 3> m = {nv + tri.edges[0], nv + tri.edges[1],
                                    nv + tri.edges[2]};
    const std::array<std::array<Index, 3>, 4> children = {{{v[0], m[2], m[1]},
                                                           {m[2], v[1], m[0]},
                                                           {m[1], m[0], v[2]},
                                                           {m[0], m[1], m[2]}}};
    for (const auto& c : children) {
      Triangle child;
      child.vertices = c;
      fine.triangles.push_back(child);
      fine.parent_triangle.push_back(t);
    }
  }
  build_edges(fine);
  return fine;
}

MeshHierarchy build_hierarchy(int max_level) {
  if (max_level < 0)
    throw ContractViolation("build_hierarchy: negative max level " +
                            std::to_string(max_level));
  if (max_level > kMaxSupportedLevel)
    throw ResourceError("build_hierarchy: " + std::to_string(max_level + 1) +
                        " levels requested, at most " +
                        std::to_string(kMaxSupportedLevel + 1) +
                        " fit in memory");
  MeshHierarchy hierarchy;
  hierarchy.levels.reserve(max_level + 1);
  hierarchy.levels.push_back(build_coarse_mesh());
  for (int k = 1; k <= max_level; ++k)
    hierarchy.levels.push_back(refine(hierarchy.levels.back()));
  return hierarchy;
}

void write_mesh(std::ostream& os, const MeshLevel& mesh) {
  os.precision(17);
  for (const auto& v : mesh.vertices) os << "v " << v.pos.x << ' ' << v.pos.y << '\n';
  for (const auto& t : mesh.triangles)
    os << "t " << t.vertices[0] << ' ' << t.vertices[1] << ' ' << t.vertices[2]
       << '\n';
}

}  // namespace stokesmg
