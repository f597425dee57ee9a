#include "stokesmg/transfer.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace stokesmg {

namespace {

constexpr double kDropTolerance = 1e-14;

}  // namespace

TransferOperators build_prolongation(const TaylorHoodSpace& coarse,
                                     const TaylorHoodSpace& fine) {
  const MeshLevel& cm = coarse.mesh();
  const MeshLevel& fm = fine.mesh();
  if (fm.level != cm.level + 1 ||
      static_cast<Index>(fm.parent_triangle.size()) != fm.num_triangles() ||
      fm.num_triangles() != 4 * cm.num_triangles())
    throw ContractViolation("build_prolongation: level " + std::to_string(fm.level) +
                            " is not the refinement of level " +
                            std::to_string(cm.level));

  Triplets tu, tp;
  tu.reserve(2 * 6 * fine.num_interior_nodes());
  tp.reserve(3 * fm.num_vertices());
  std::vector<char> velocity_done(fm.num_p2_nodes(), 0);
  std::vector<char> pressure_done(fm.num_vertices(), 0);

  for (Index t = 0; t < fm.num_triangles(); ++t) {
    const Index parent = fm.parent_triangle[t];
    const auto corners = cm.corners(parent);
    const auto coarse_nodes = cm.p2_nodes(parent);
    const auto& coarse_verts = cm.triangles[parent].vertices;
    const auto fine_nodes = fm.p2_nodes(t);

    for (Index node : fine_nodes) {
      if (velocity_done[node]) continue;
      velocity_done[node] = 1;
      if (fine.interior_index(node) < 0) continue;
      const auto lambda = barycentric(corners, fm.p2_node(node));
      const auto values = p2_values(lambda);
      for (int a = 0; a < 6; ++a) {
        if (std::abs(values[a]) < kDropTolerance) continue;
        for (int comp = 0; comp < 2; ++comp) {
          const Index col = coarse.velocity_dof(comp, coarse_nodes[a]);
          if (col >= 0) tu.emplace_back(fine.velocity_dof(comp, node), col, values[a]);
        }
      }
    }

    for (Index v : fm.triangles[t].vertices) {
      if (pressure_done[v]) continue;
      pressure_done[v] = 1;
      const auto lambda = barycentric(corners, fm.vertices[v].pos);
      for (int i = 0; i < 3; ++i)
        if (std::abs(lambda[i]) >= kDropTolerance)
          tp.emplace_back(v, coarse_verts[i], lambda[i]);
    }
  }

  TransferOperators ops;
  ops.P_u = from_triplets(fine.velocity_dofs(), coarse.velocity_dofs(), tu);
  ops.P_p = from_triplets(fine.pressure_dofs(), coarse.pressure_dofs(), tp);
  ops.R_u = transpose(ops.P_u);
  ops.R_p = transpose(ops.P_p);
  return ops;
}

Vector prolongate(const TransferOperators& t, const Vector& coarse) {
  if (coarse.size() != t.coarse_size())
    throw ContractViolation("prolongate: coarse vector of size " +
                            std::to_string(coarse.size()) + ", expected " +
                            std::to_string(t.coarse_size()));
  Vector fine(t.fine_size());
  fine.head(t.P_u.rows()).noalias() = t.P_u * coarse.head(t.P_u.cols());
  fine.tail(t.P_p.rows()).noalias() = t.P_p * coarse.tail(t.P_p.cols());
  return fine;
}

Vector restrict_residual(const TransferOperators& t, const Vector& fine) {
  if (fine.size() != t.fine_size())
    throw ContractViolation("restrict_residual: fine vector of size " +
                            std::to_string(fine.size()) + ", expected " +
                            std::to_string(t.fine_size()));
  Vector coarse(t.coarse_size());
  coarse.head(t.R_u.rows()).noalias() = t.R_u * fine.head(t.R_u.cols());
  coarse.tail(t.R_p.rows()).noalias() = t.R_p * fine.tail(t.R_p.cols());
  return coarse;
}

}  // namespace stokesmg
