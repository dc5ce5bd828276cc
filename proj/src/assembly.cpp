#include "ifex/assembly.hpp"

#include <algorithm>

#include "ifex/quadrature.hpp"

namespace ifex {

ElementBasis BasisCache::basis_of(int element) const {
  if (const ElementBasis* b = cut_basis_of(element)) return *b;
  const auto& el = mesh->elements[element];
  ElementBasis b = non_interface_basis(
      {mesh->nodes[el[0]], mesh->nodes[el[1]], mesh->nodes[el[2]]},
      material.region(topo->element_region[element]));
  b.vertex_ids = el;
  return b;
}

const ElementBasis* BasisCache::cut_basis_of(int element) const {
  const int c = topo->element_cut[element];
  return c >= 0 ? &cut_basis[c] : nullptr;
}

BasisCache build_basis(const Mesh& mesh, const InterfaceTopology& topo,
                       const MaterialModel& material) {
  BasisCache cache;
  cache.mesh = &mesh;
  cache.topo = &topo;
  cache.material = material;
  cache.geoms.reserve(topo.cuts.size());
  cache.cut_basis.reserve(topo.cuts.size());
  for (const ElementCut& cut : topo.cuts) {
    cache.geoms.push_back(build_geom(mesh, cut));
    cache.cut_basis.push_back(interface_basis(cache.geoms.back(),
                                              material.minus_of_curve(cut.curve),
                                              material.plus_of_curve(cut.curve)));
  }
  return cache;
}

DofMap build_dof_map(const Mesh& mesh, const ForwardProblemSpec& spec) {
  DofMap map;
  map.pure_neumann = spec.kind == BCKind::PureNeumann;
  const int nn = static_cast<int>(mesh.nodes.size());
  map.node_to_free.assign(nn, -1);
  for (int i = 0; i < nn; ++i) {
    if (spec.node_is_dirichlet(mesh.node_boundary_mask[i])) {
      map.dirichlet_nodes.push_back(i);
    } else {
      map.node_to_free[i] = static_cast<int>(map.free_nodes.size());
      map.free_nodes.push_back(i);
    }
  }
  map.system_size = static_cast<int>(map.free_nodes.size()) + (map.pure_neumann ? 1 : 0);
  return map;
}

Eigen::VectorXd AssembledSystem::nodal_values(const Eigen::VectorXd& reduced) const {
  const int nn = static_cast<int>(dofs.node_to_free.size());
  Eigen::VectorXd w(nn);
  for (int i = 0; i < nn; ++i) {
    const int f = dofs.node_to_free[i];
    w(i) = f >= 0 ? reduced(f) : g_dirichlet(i);
  }
  return w;
}

double AssembledSystem::multiplier(const Eigen::VectorXd& reduced) const {
  return dofs.pure_neumann ? reduced(reduced.size() - 1) : 0.0;
}

Eigen::Matrix3d local_stiffness(const ElementBasis& b) {
  Eigen::Matrix3d k = Eigen::Matrix3d::Zero();
  if (!b.interface) {
    const double area = quad::tri_area(b.verts[0], b.verts[1], b.verts[2]);
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q)
        k(p, q) = b.beta_minus * area * b.shape[p].plus.g.dot(b.shape[q].plus.g);
    return k;
  }
  for (int m = 0; m < 3; ++m) {
    const bool minus = b.geom.subtri_minus[m];
    const double beta = minus ? b.beta_minus : b.beta_plus;
    const double area = b.geom.subtri_area[m];
    for (int p = 0; p < 3; ++p) {
      const Vec2 gp = minus ? b.shape[p].minus.g : b.shape[p].plus.g;
      for (int q = 0; q < 3; ++q) {
        const Vec2 gq = minus ? b.shape[q].minus.g : b.shape[q].plus.g;
        k(p, q) += beta * area * gp.dot(gq);
      }
    }
  }
  return k;
}

Eigen::Vector3d local_load(const ElementBasis& b, const Field& f) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  auto accumulate = [&](const std::array<Vec2, 3>& tri, bool minus) {
    const double area = quad::tri_area(tri[0], tri[1], tri[2]);
    for (const auto& gp : quad::tri7()) {
      const Vec2 x = gp.l1 * tri[0] + gp.l2 * tri[1] + gp.l3 * tri[2];
      const double fx = f(x);
      for (int p = 0; p < 3; ++p) {
        const Affine2& a = minus ? b.shape[p].minus : b.shape[p].plus;
        out(p) += gp.w * area * fx * a(x);
      }
    }
  };
  if (!b.interface) {
    accumulate(b.verts, false);
  } else {
    for (int m = 0; m < 3; ++m) accumulate(b.geom.subtri[m], b.geom.subtri_minus[m]);
  }
  return out;
}

Eigen::Vector3d local_r_vector(const ElementBasis& b) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  if (!b.interface) {
    const double area = quad::tri_area(b.verts[0], b.verts[1], b.verts[2]);
    return Eigen::Vector3d::Constant(area / 3.0);
  }
  for (int m = 0; m < 3; ++m) {
    const auto& tri = b.geom.subtri[m];
    const Vec2 centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
    const double area = b.geom.subtri_area[m];
    for (int p = 0; p < 3; ++p) {
      const Affine2& a = b.geom.subtri_minus[m] ? b.shape[p].minus : b.shape[p].plus;
      out(p) += area * a(centroid);  // affine integrand: centroid rule is exact
    }
  }
  return out;
}

EdgeContext make_edge_context(const Mesh& mesh, const BasisCache& cache, const EdgeCut& cut) {
  EdgeContext ctx;
  const Mesh::Edge& e = mesh.edges[cut.edge];
  ctx.edge = &e;
  ctx.p1 = mesh.nodes[e.a];
  ctx.p2 = mesh.nodes[e.b];
  ctx.crossing = cut.rec.point;
  ctx.length = (ctx.p2 - ctx.p1).norm();
  ctx.boundary = e.elem[1] < 0;
  ctx.elem[0] = cache.cut_basis_of(e.elem[0]);
  ctx.elem[1] = ctx.boundary ? nullptr : cache.cut_basis_of(e.elem[1]);
  if (!ctx.elem[0] || (!ctx.boundary && !ctx.elem[1]))
    throw ContractError("make_edge_context: cut edge adjacent to uncut element");
  // normal from elem[0] across the edge (outward on the boundary)
  const Vec2 d = (ctx.p2 - ctx.p1) / ctx.length;
  Vec2 n(d.y(), -d.x());
  const auto& el = mesh.elements[e.elem[0]];
  Vec2 opposite = Vec2::Zero();
  for (int k = 0; k < 3; ++k)
    if (el[k] != e.a && el[k] != e.b) opposite = mesh.nodes[el[k]];
  if (n.dot(opposite - ctx.p1) > 0) n = -n;
  ctx.normal = n;
  return ctx;
}

namespace {

Vec2 side_normal(const EdgeContext& ctx, int r) { return r == 2 ? -ctx.normal : ctx.normal; }

// Quadrature over the edge split at the interface crossing.
template <class F>
void for_edge_quadrature(const EdgeContext& ctx, F&& body) {
  const auto gl = quad::gauss_legendre(8);
  const Vec2 pts[3] = {ctx.p1, ctx.crossing, ctx.p2};
  for (int seg = 0; seg < 2; ++seg) {
    const Vec2 a = pts[seg], b = pts[seg + 1];
    const double half = 0.5 * (b - a).norm();
    if (half < 1e-15) continue;
    for (int g = 0; g < gl.n; ++g) {
      const Vec2 x = a + 0.5 * (gl.x[g] + 1.0) * (b - a);
      body(x, gl.w[g] * half);
    }
  }
}

}  // namespace

Eigen::Matrix3d edge_consistency_matrix(const EdgeContext& ctx, int r1, int r2) {
  const ElementBasis& b1 = side_elem(ctx, r1);
  const ElementBasis& b2 = side_elem(ctx, r2);
  const Vec2 n2 = side_normal(ctx, r2);
  Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
  for_edge_quadrature(ctx, [&](const Vec2& x, double w) {
    const bool minus = b1.interface ? b1.geom.minus_at(x) : false;
    const double beta = minus ? b1.beta_minus : b1.beta_plus;
    for (int p = 0; p < 3; ++p) {
      const Vec2 gp = minus ? b1.shape[p].minus.g : b1.shape[p].plus.g;
      const double flux = beta * gp.dot(n2);
      for (int q = 0; q < 3; ++q) {
        const bool minus2 = b2.interface ? b2.geom.minus_at(x) : false;
        const Affine2& aq = minus2 ? b2.shape[q].minus : b2.shape[q].plus;
        e(p, q) += w * flux * aq(x);
      }
    }
  });
  return e;
}

Eigen::Matrix3d edge_penalty_matrix(const EdgeContext& ctx, int r1, int r2, double sigma) {
  const ElementBasis& b1 = side_elem(ctx, r1);
  const ElementBasis& b2 = side_elem(ctx, r2);
  const double nn = side_normal(ctx, r1).dot(side_normal(ctx, r2));
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  for_edge_quadrature(ctx, [&](const Vec2& x, double w) {
    for (int p = 0; p < 3; ++p) {
      const double vp = b1.interface ? b1.shape[p].value(b1.geom, x) : b1.shape[p].plus(x);
      for (int q = 0; q < 3; ++q) {
        const double vq = b2.interface ? b2.shape[q].value(b2.geom, x) : b2.shape[q].plus(x);
        g(p, q) += w * vp * vq;
      }
    }
  });
  return g * (sigma * nn / ctx.length);
}

Eigen::Vector3d edge_dirichlet_flux_vector(const EdgeContext& ctx, const Field& g_d) {
  const ElementBasis& b = *ctx.elem[0];
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for_edge_quadrature(ctx, [&](const Vec2& x, double w) {
    const bool minus = b.geom.minus_at(x);
    const double beta = minus ? b.beta_minus : b.beta_plus;
    for (int p = 0; p < 3; ++p) {
      const Vec2 gp = minus ? b.shape[p].minus.g : b.shape[p].plus.g;
      out(p) += w * beta * g_d(x) * gp.dot(ctx.normal);
    }
  });
  return out;
}

Eigen::Vector3d edge_dirichlet_penalty_vector(const EdgeContext& ctx, const Field& g_d,
                                              double sigma) {
  const ElementBasis& b = *ctx.elem[0];
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for_edge_quadrature(ctx, [&](const Vec2& x, double w) {
    for (int p = 0; p < 3; ++p) out(p) += w * g_d(x) * b.shape[p].value(b.geom, x);
  });
  return out * (sigma / ctx.length);
}

Eigen::Vector3d edge_neumann_vector(const EdgeContext& ctx, const Field& g_n) {
  const ElementBasis& b = *ctx.elem[0];
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for_edge_quadrature(ctx, [&](const Vec2& x, double w) {
    for (int p = 0; p < 3; ++p) {
      const double vp = b.interface ? b.shape[p].value(b.geom, x) : b.shape[p].plus(x);
      out(p) += w * g_n(x) * vp;
    }
  });
  return out;
}

AssembledSystem assemble(const Mesh& mesh, const InterfaceTopology& topo,
                         const BasisCache& cache, const ForwardProblemSpec& spec) {
  const int nn = static_cast<int>(mesh.nodes.size());
  const double sigma = spec.sigma();
  AssembledSystem sys;
  sys.stamp = topo.stamp;
  sys.dofs = build_dof_map(mesh, spec);
  sys.F_full = Eigen::VectorXd::Zero(nn);
  sys.g_dirichlet = Eigen::VectorXd::Zero(nn);
  for (int i : sys.dofs.dirichlet_nodes) sys.g_dirichlet(i) = spec.g_dirichlet(mesh.nodes[i]);

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.elements.size() * 9 + mesh.edges.size() * 36);

  // volume terms
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const ElementBasis b = cache.basis_of(static_cast<int>(e));
    const Eigen::Matrix3d k = local_stiffness(b);
    const Eigen::Vector3d ft = local_load(b, spec.f);
    for (int p = 0; p < 3; ++p) {
      sys.F_full(b.vertex_ids[p]) += ft(p);
      for (int q = 0; q < 3; ++q)
        trips.emplace_back(b.vertex_ids[q], b.vertex_ids[p], k(p, q));
    }
  }

  // structural zeros so the sparsity pattern is interface-independent:
  // cut-edge penalties couple the full node sets of the two adjacent elements
  for (const Mesh::Edge& e : mesh.edges) {
    if (e.elem[1] < 0) continue;
    const auto& n1 = mesh.elements[e.elem[0]];
    const auto& n2 = mesh.elements[e.elem[1]];
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) {
        trips.emplace_back(n1[p], n2[q], 0.0);
        trips.emplace_back(n2[q], n1[p], 0.0);
      }
  }

  // interface-edge terms
  for (const EdgeCut& cut : topo.edge_cuts) {
    const Mesh::Edge& e = mesh.edges[cut.edge];
    const bool boundary = e.elem[1] < 0;
    if (boundary && spec.side_is_neumann(e.boundary_side)) continue;
    const EdgeContext ctx = make_edge_context(mesh, cache, cut);
    const std::vector<int> sides = boundary ? std::vector<int>{0} : std::vector<int>{1, 2};
    const double w = boundary ? 1.0 : 0.5;
    for (int r1 : sides) {
      const auto& ids1 = side_elem(ctx, r1).vertex_ids;
      for (int r2 : sides) {
        const auto& ids2 = side_elem(ctx, r2).vertex_ids;
        const Eigen::Matrix3d e12 = edge_consistency_matrix(ctx, r1, r2);
        const Eigen::Matrix3d e21 = edge_consistency_matrix(ctx, r2, r1);
        const Eigen::Matrix3d g12 = edge_penalty_matrix(ctx, r1, r2, sigma);
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q)
            trips.emplace_back(ids2[q], ids1[p],
                               -w * (e12(p, q) + e21(q, p)) + g12(p, q));
      }
    }
    if (boundary) {
      const Eigen::Vector3d be = edge_dirichlet_flux_vector(ctx, spec.g_dirichlet);
      const Eigen::Vector3d ce = edge_dirichlet_penalty_vector(ctx, spec.g_dirichlet, sigma);
      const auto& ids = ctx.elem[0]->vertex_ids;
      for (int p = 0; p < 3; ++p) sys.F_full(ids[p]) += spec.epsilon * be(p) + ce(p);
    }
  }

  // Neumann boundary loads on every Neumann edge
  for (size_t ei = 0; ei < mesh.edges.size(); ++ei) {
    const Mesh::Edge& e = mesh.edges[ei];
    if (e.boundary_side < 0 || !spec.side_is_neumann(e.boundary_side)) continue;
    if (topo.edge_cut_index[ei] >= 0) {
      const EdgeContext ctx = make_edge_context(mesh, cache, topo.edge_cuts[topo.edge_cut_index[ei]]);
      const Eigen::Vector3d ne = edge_neumann_vector(ctx, spec.g_neumann);
      const auto& ids = ctx.elem[0]->vertex_ids;
      for (int p = 0; p < 3; ++p) sys.F_full(ids[p]) += ne(p);
    } else {
      const ElementBasis b = cache.basis_of(e.elem[0]);
      const Vec2 a = mesh.nodes[e.a], c = mesh.nodes[e.b];
      Eigen::Vector3d ne = Eigen::Vector3d::Zero();
      const auto gl = quad::gauss_legendre(8);
      const double half = 0.5 * (c - a).norm();
      for (int g = 0; g < gl.n; ++g) {
        const Vec2 x = a + 0.5 * (gl.x[g] + 1.0) * (c - a);
        const double gn = spec.g_neumann(x);
        for (int p = 0; p < 3; ++p) {
          const double vp = b.interface ? b.shape[p].value(b.geom, x) : b.shape[p].plus(x);
          ne(p) += gl.w[g] * half * gn * vp;
        }
      }
      for (int p = 0; p < 3; ++p) sys.F_full(b.vertex_ids[p]) += ne(p);
    }
  }

  sys.A_full.resize(nn, nn);
  sys.A_full.setFromTriplets(trips.begin(), trips.end());

  if (spec.kind == BCKind::PureNeumann) {
    sys.R = Eigen::VectorXd::Zero(nn);
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
      const ElementBasis b = cache.basis_of(static_cast<int>(e));
      const Eigen::Vector3d rt = local_r_vector(b);
      for (int p = 0; p < 3; ++p) sys.R(b.vertex_ids[p]) += rt(p);
    }
    const int size = nn + 1;
    std::vector<Eigen::Triplet<double>> strips;
    strips.reserve(sys.A_full.nonZeros() + 2 * nn);
    for (int k = 0; k < sys.A_full.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A_full, k); it; ++it)
        strips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int i = 0; i < nn; ++i) {
      strips.emplace_back(i, nn, sys.R(i));
      strips.emplace_back(nn, i, sys.R(i));
    }
    sys.A.resize(size, size);
    sys.A.setFromTriplets(strips.begin(), strips.end());
    sys.F = Eigen::VectorXd::Zero(size);
    sys.F.head(nn) = sys.F_full;
    sys.F(nn) = spec.u0;
  } else {
    const int nf = static_cast<int>(sys.dofs.free_nodes.size());
    std::vector<Eigen::Triplet<double>> rtrips;
    rtrips.reserve(sys.A_full.nonZeros());
    for (int k = 0; k < sys.A_full.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A_full, k); it; ++it) {
        const int ri = sys.dofs.node_to_free[it.row()];
        const int ci = sys.dofs.node_to_free[it.col()];
        if (ri >= 0 && ci >= 0) rtrips.emplace_back(ri, ci, it.value());
      }
    sys.A.resize(nf, nf);
    sys.A.setFromTriplets(rtrips.begin(), rtrips.end());
    const Eigen::VectorXd lifted = sys.A_full * sys.g_dirichlet;
    sys.F = Eigen::VectorXd::Zero(nf);
    for (int i = 0; i < nf; ++i) {
      const int node = sys.dofs.free_nodes[i];
      sys.F(i) = sys.F_full(node) - lifted(node);
    }
  }
  return sys;
}

}  // namespace ifex
