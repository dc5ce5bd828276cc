#include "ifex/sensitivity.hpp"

#include <Eigen/LU>

#include <string>
#include <thread>

#include "ifex/quadrature.hpp"

namespace ifex {

DesignLayout DesignLayout::of(const std::vector<SplineCurve>& curves) {
  DesignLayout layout;
  layout.curve_offset.resize(curves.size() + 1, 0);
  for (size_t c = 0; c < curves.size(); ++c) {
    layout.curve_offset[c] = static_cast<int>(layout.entry.size());
    for (int j = 0; j < curves[c].design_count(); ++j)
      layout.entry.push_back({static_cast<int>(c), j});
  }
  layout.curve_offset[curves.size()] = static_cast<int>(layout.entry.size());
  return layout;
}

IntersectionVelocity intersection_velocities(const SplineCurve& curve, const Mesh& mesh,
                                             const ElementCut& cut, int j) {
  auto solve_one = [&](const IntersectionRecord& rec, int edge_id) -> Vec2 {
    const Mesh::Edge& e = mesh.edges[edge_id];
    const Vec2 e1 = mesh.nodes[e.a], e2 = mesh.nodes[e.b];
    const Vec2 tau = curve.tangent(rec.t_hat);
    const Vec2 da = curve.d_alpha(rec.t_hat, j);
    Mat2 m;
    m << e2.y() - e1.y(), -(e2.x() - e1.x()), tau.y(), -tau.x();
    const double det = m.determinant();
    const double edge_len = (e2 - e1).norm();
    if (std::abs(det) <= 1e-10 * tau.norm() * edge_len)
      throw GeometryError("intersection_velocities: curve tangent to edge " +
                          std::to_string(edge_id) + " in element " +
                          std::to_string(cut.element));
    const Vec2 rhs(0.0, tau.y() * da.x() - tau.x() * da.y());
    return m.inverse() * rhs;
  };
  IntersectionVelocity iv;
  iv.dP = solve_one(cut.rec_p, cut.edge_p);
  iv.dQ = solve_one(cut.rec_q, cut.edge_q);
  return iv;
}

VelocityField velocity_field(const InterfaceElementGeom& geom, const IntersectionVelocity& iv) {
  VelocityField vf;
  vf.dJ[0] << iv.dP, iv.dQ;
  vf.dJ[1] << iv.dQ, iv.dP;
  vf.dJ[2] << iv.dQ, Vec2::Zero();
  vf.base = {geom.A[0], geom.A[1], geom.A[2]};
  for (int m = 0; m < 3; ++m) {
    vf.M[m] = vf.dJ[m] * geom.J[m].inverse();
    vf.divergence[m] = vf.M[m].trace();
  }
  return vf;
}

int VelocityField::locate(const InterfaceElementGeom& g, const Vec2& x) const {
  double best = -1e300;
  int arg = 0;
  for (int m = 0; m < 3; ++m) {
    const auto& t = g.subtri[m];
    const double s = cross2(t[1] - t[0], t[2] - t[0]);
    double worst = 1e300;
    for (int k = 0; k < 3; ++k)
      worst = std::min(worst, cross2(t[(k + 1) % 3] - t[k], x - t[k]) / s);
    if (worst > best) {
      best = worst;
      arg = m;
    }
  }
  return arg;
}

ShapeDerivativeBundle shape_derivatives(const ElementBasis& basis,
                                        const IntersectionVelocity& iv) {
  const InterfaceElementGeom& geom = basis.geom;
  ShapeDerivativeBundle out;
  out.iv = iv;
  const Vec2 d = geom.P - geom.Q;
  const double r = d.norm();
  const Vec2 tbar = d / r;
  // d nbar = tbar (nbar . (dQ - dP)) / |P - Q|, invariant под the sign of nbar
  out.dnbar = tbar * (geom.nbar.dot(iv.dQ - iv.dP) / r);
  // d L(X) = (X - P) . dnbar - nbar . dP
  out.dL.g = out.dnbar;
  out.dL.a = -geom.P.dot(out.dnbar) - geom.nbar.dot(iv.dP);

  const auto psi = p1_basis(geom.A);
  const size_t nm = geom.iminus.size();
  std::vector<double> dgamma(nm), ddelta(nm);
  for (size_t k = 0; k < nm; ++k) {
    const int i = geom.iminus[k];
    dgamma[k] = psi[i].g.dot(out.dnbar);
    ddelta[k] = out.dL(geom.A[i]);
  }

  for (int fi = 0; fi < 3; ++fi) {
    const IfeCoefficients& cf = basis.shape[fi].coef;
    std::array<double, 3> v{0, 0, 0};
    v[fi] = 1.0;
    double dgplus = 0.0;
    for (int i : geom.iplus) dgplus += psi[i].g.dot(out.dnbar) * v[i];

    std::vector<double> db(nm);
    double s1 = 0, s2 = 0, ds1 = 0, ds2 = 0;  // gamma.b, gamma.delta and derivatives
    for (size_t k = 0; k < nm; ++k) {
      db[k] = -cf.mu * (ddelta[k] * cf.gplus + cf.delta[k] * dgplus);
      s1 += cf.gamma[k] * cf.b[k];
      s2 += cf.gamma[k] * cf.delta[k];
      ds1 += dgamma[k] * cf.b[k] + cf.gamma[k] * db[k];
      ds2 += dgamma[k] * cf.delta[k] + cf.gamma[k] * ddelta[k];
    }
    const double denom = 1.0 + cf.mu * s2;
    std::vector<double> dc(nm);
    for (size_t k = 0; k < nm; ++k) {
      dc[k] = db[k] - cf.mu *
                          ((ds1 * cf.delta[k] + s1 * ddelta[k]) * denom -
                           s1 * cf.delta[k] * cf.mu * ds2) /
                          (denom * denom);
    }
    double dc0 = dgplus;
    for (size_t k = 0; k < nm; ++k)
      dc0 += dc[k] * cf.gamma[k] + cf.c[k] * dgamma[k];
    dc0 *= cf.mu;

    ShapeFnDerivative& fd = out.fn[fi];
    fd.dc0 = dc0;
    fd.dplus = Affine2{};
    for (size_t k = 0; k < nm; ++k) fd.dplus += psi[geom.iminus[k]] * dc[k];
    fd.dminus = fd.dplus + geom.L * dc0 + out.dL * cf.c0;
  }
  return out;
}

Eigen::Matrix3d d_local_stiffness(const ElementBasis& b, const ShapeDerivativeBundle& sd,
                                  const VelocityField& vf) {
  Eigen::Matrix3d s = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
  const InterfaceElementGeom& g = b.geom;
  for (int m = 0; m < 3; ++m) {
    const bool minus = g.subtri_minus[m];
    const double beta = minus ? b.beta_minus : b.beta_plus;
    const double area = g.subtri_area[m];
    for (int p = 0; p < 3; ++p) {
      const Vec2 dgp = minus ? sd.fn[p].dminus.g : sd.fn[p].dplus.g;
      const Vec2 gp = minus ? b.shape[p].minus.g : b.shape[p].plus.g;
      for (int q = 0; q < 3; ++q) {
        const Vec2 gq = minus ? b.shape[q].minus.g : b.shape[q].plus.g;
        s(p, q) += beta * area * dgp.dot(gq);
        t(p, q) += beta * area * gp.dot(gq) * vf.divergence[m];
      }
    }
  }
  return s + s.transpose() + t;
}

Eigen::Vector3d d_local_load(const ElementBasis& b, const ShapeDerivativeBundle& sd,
                             const VelocityField& vf, const Field& f) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  const InterfaceElementGeom& g = b.geom;
  for (int m = 0; m < 3; ++m) {
    const bool minus = g.subtri_minus[m];
    const auto& tri = g.subtri[m];
    const double area = g.subtri_area[m];
    for (const auto& gp : quad::tri7()) {
      const Vec2 x = gp.l1 * tri[0] + gp.l2 * tri[1] + gp.l3 * tri[2];
      const double fx = f(x);
      const Vec2 gfx = f.grad(x);
      const Vec2 v = vf.eval_piece(m, x);
      for (int p = 0; p < 3; ++p) {
        const Affine2& a = minus ? b.shape[p].minus : b.shape[p].plus;
        const Affine2& da = minus ? sd.fn[p].dminus : sd.fn[p].dplus;
        const double transport = (gfx * a(x) + fx * a.g).dot(v);
        out(p) += gp.w * area * (fx * da(x) + transport + fx * a(x) * vf.divergence[m]);
      }
    }
  }
  return out;
}

Eigen::Vector3d d_local_r_vector(const ElementBasis& b, const ShapeDerivativeBundle& sd,
                                 const VelocityField& vf) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  const InterfaceElementGeom& g = b.geom;
  for (int m = 0; m < 3; ++m) {
    const bool minus = g.subtri_minus[m];
    const auto& tri = g.subtri[m];
    const double area = g.subtri_area[m];
    // all integrands are affine on the sub-triangle; 3-point midpoint rule is exact
    const Vec2 mids[3] = {0.5 * (tri[0] + tri[1]), 0.5 * (tri[1] + tri[2]),
                          0.5 * (tri[2] + tri[0])};
    for (int p = 0; p < 3; ++p) {
      const Affine2& a = minus ? b.shape[p].minus : b.shape[p].plus;
      const Affine2& da = minus ? sd.fn[p].dminus : sd.fn[p].dplus;
      double acc = 0.0;
      for (const Vec2& x : mids)
        acc += da(x) + a.g.dot(vf.eval_piece(m, x)) + a(x) * vf.divergence[m];
      out(p) += area * acc / 3.0;
    }
  }
  return out;
}

namespace {

// Side of the sub-segment [p1, crossing]: minus when the edge endpoint p1 is
// on the minus side of the first adjacent element's chord.
bool first_segment_minus(const EdgeContext& ctx) { return ctx.elem[0]->geom.L(ctx.p1) < 0; }

const ShapeDerivativeBundle& side_bundle(int r, const ShapeDerivativeBundle& sd1,
                                         const ShapeDerivativeBundle* sd2) {
  if (r == 2) {
    if (!sd2) throw ContractError("edge derivative: missing second-element bundle");
    return *sd2;
  }
  return sd1;
}

template <class F>
void edge_split_quadrature(const EdgeContext& ctx, F&& body) {
  const auto gl = quad::gauss_legendre(8);
  const Vec2 pts[3] = {ctx.p1, ctx.crossing, ctx.p2};
  for (int seg = 0; seg < 2; ++seg) {
    const Vec2 a = pts[seg], b = pts[seg + 1];
    const double half = 0.5 * (b - a).norm();
    if (half < 1e-15) continue;
    const bool minus = seg == 0 ? first_segment_minus(ctx) : !first_segment_minus(ctx);
    for (int g = 0; g < gl.n; ++g) {
      const Vec2 x = a + 0.5 * (gl.x[g] + 1.0) * (b - a);
      body(x, gl.w[g] * half, minus);
    }
  }
}

// Tangential speed of the crossing point along the edge, oriented p1 -> p2.
double crossing_speed(const EdgeContext& ctx, const Vec2& dcross) {
  return dcross.dot(ctx.p2 - ctx.p1) / ctx.length;
}

}  // namespace

Eigen::Matrix3d d_edge_consistency(const EdgeContext& ctx, int r1, int r2,
                                   const ShapeDerivativeBundle& sd1,
                                   const ShapeDerivativeBundle* sd2, const Vec2& dcross) {
  const ElementBasis& b1 = side_elem(ctx, r1);
  const ElementBasis& b2 = side_elem(ctx, r2);
  const ShapeDerivativeBundle& d1 = side_bundle(r1, sd1, sd2);
  const ShapeDerivativeBundle& d2 = side_bundle(r2, sd1, sd2);
  const Vec2 n2 = r2 == 2 ? -ctx.normal : ctx.normal;
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  edge_split_quadrature(ctx, [&](const Vec2& x, double w, bool minus) {
    const double beta = minus ? b1.beta_minus : b1.beta_plus;
    for (int p = 0; p < 3; ++p) {
      const Vec2 gp = minus ? b1.shape[p].minus.g : b1.shape[p].plus.g;
      const Vec2 dgp = minus ? d1.fn[p].dminus.g : d1.fn[p].dplus.g;
      for (int q = 0; q < 3; ++q) {
        const Affine2& aq = minus ? b2.shape[q].minus : b2.shape[q].plus;
        const Affine2& daq = minus ? d2.fn[q].dminus : d2.fn[q].dplus;
        out(p, q) += w * beta * (dgp.dot(n2) * aq(x) + gp.dot(n2) * daq(x));
      }
    }
  });
  // the integrand jumps at the moving crossing point
  const double speed = crossing_speed(ctx, dcross);
  const bool m1 = first_segment_minus(ctx);
  const Vec2& xc = ctx.crossing;
  for (int p = 0; p < 3; ++p) {
    const Vec2 gp_first = m1 ? b1.shape[p].minus.g : b1.shape[p].plus.g;
    const Vec2 gp_second = m1 ? b1.shape[p].plus.g : b1.shape[p].minus.g;
    const double beta_first = m1 ? b1.beta_minus : b1.beta_plus;
    const double beta_second = m1 ? b1.beta_plus : b1.beta_minus;
    for (int q = 0; q < 3; ++q) {
      const double vq_first = (m1 ? b2.shape[q].minus : b2.shape[q].plus)(xc);
      const double vq_second = (m1 ? b2.shape[q].plus : b2.shape[q].minus)(xc);
      const double jump =
          beta_first * gp_first.dot(n2) * vq_first - beta_second * gp_second.dot(n2) * vq_second;
      out(p, q) += jump * speed;
    }
  }
  return out;
}

Eigen::Matrix3d d_edge_penalty(const EdgeContext& ctx, int r1, int r2,
                               const ShapeDerivativeBundle& sd1,
                               const ShapeDerivativeBundle* sd2, double sigma) {
  const ElementBasis& b1 = side_elem(ctx, r1);
  const ElementBasis& b2 = side_elem(ctx, r2);
  const ShapeDerivativeBundle& d1 = side_bundle(r1, sd1, sd2);
  const ShapeDerivativeBundle& d2 = side_bundle(r2, sd1, sd2);
  const Vec2 na = r1 == 2 ? -ctx.normal : ctx.normal;
  const Vec2 nb = r2 == 2 ? -ctx.normal : ctx.normal;
  Eigen::Matrix3d out = Eigen::Matrix3d::Zero();
  edge_split_quadrature(ctx, [&](const Vec2& x, double w, bool minus) {
    for (int p = 0; p < 3; ++p) {
      const Affine2& ap = minus ? b1.shape[p].minus : b1.shape[p].plus;
      const Affine2& dap = minus ? d1.fn[p].dminus : d1.fn[p].dplus;
      for (int q = 0; q < 3; ++q) {
        const Affine2& aq = minus ? b2.shape[q].minus : b2.shape[q].plus;
        const Affine2& daq = minus ? d2.fn[q].dminus : d2.fn[q].dplus;
        out(p, q) += w * (dap(x) * aq(x) + ap(x) * daq(x));
      }
    }
  });
  // psi_p psi_q is continuous at the crossing: no jump term
  return out * (sigma * na.dot(nb) / ctx.length);
}

Eigen::Vector3d d_edge_dirichlet_flux(const EdgeContext& ctx, const ShapeDerivativeBundle& sd1,
                                      const Field& g_d, const Vec2& dcross) {
  const ElementBasis& b = *ctx.elem[0];
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  edge_split_quadrature(ctx, [&](const Vec2& x, double w, bool minus) {
    const double beta = minus ? b.beta_minus : b.beta_plus;
    for (int p = 0; p < 3; ++p) {
      const Vec2 dgp = minus ? sd1.fn[p].dminus.g : sd1.fn[p].dplus.g;
      out(p) += w * beta * g_d(x) * dgp.dot(ctx.normal);
    }
  });
  const double speed = crossing_speed(ctx, dcross);
  const bool m1 = first_segment_minus(ctx);
  const Vec2& xc = ctx.crossing;
  const double gd = g_d(xc);
  for (int p = 0; p < 3; ++p) {
    const Vec2 gp_first = m1 ? b.shape[p].minus.g : b.shape[p].plus.g;
    const Vec2 gp_second = m1 ? b.shape[p].plus.g : b.shape[p].minus.g;
    const double beta_first = m1 ? b.beta_minus : b.beta_plus;
    const double beta_second = m1 ? b.beta_plus : b.beta_minus;
    out(p) += (beta_first * gp_first.dot(ctx.normal) - beta_second * gp_second.dot(ctx.normal)) *
              gd * speed;
  }
  return out;
}

Eigen::Vector3d d_edge_dirichlet_penalty(const EdgeContext& ctx,
                                         const ShapeDerivativeBundle& sd1, const Field& g_d,
                                         double sigma) {
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  edge_split_quadrature(ctx, [&](const Vec2& x, double w, bool minus) {
    for (int p = 0; p < 3; ++p) {
      const Affine2& dap = minus ? sd1.fn[p].dminus : sd1.fn[p].dplus;
      out(p) += w * g_d(x) * dap(x);
    }
  });
  return out * (sigma / ctx.length);
}

Eigen::Vector3d d_edge_neumann(const EdgeContext& ctx, const ShapeDerivativeBundle& sd1,
                               const Field& g_n, const Vec2& dcross) {
  const ElementBasis& b = *ctx.elem[0];
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  edge_split_quadrature(ctx, [&](const Vec2& x, double w, bool minus) {
    for (int p = 0; p < 3; ++p) {
      const Affine2& dap = minus ? sd1.fn[p].dminus : sd1.fn[p].dplus;
      out(p) += w * g_n(x) * dap(x);
    }
  });
  // the shape functions are continuous across the chord, so this vanishes;
  // kept in the literal form of the transport rule
  const double speed = crossing_speed(ctx, dcross);
  const bool m1 = first_segment_minus(ctx);
  const Vec2& xc = ctx.crossing;
  const double gn = g_n(xc);
  for (int p = 0; p < 3; ++p) {
    const double first = (m1 ? b.shape[p].minus : b.shape[p].plus)(xc);
    const double second = (m1 ? b.shape[p].plus : b.shape[p].minus)(xc);
    out(p) += gn * (first - second) * speed;
  }
  return out;
}

PerDesignDerivatives element_derivatives(const std::vector<SplineCurve>& curves,
                                         const DesignLayout& layout, const Mesh& mesh,
                                         const InterfaceTopology& topo, const BasisCache& cache,
                                         int j) {
  if (j < 0 || j >= layout.total()) throw InvalidArgument("element_derivatives: bad index");
  PerDesignDerivatives pd;
  pd.j = j;
  pd.curve = layout.entry[j].first;
  const int local_j = layout.entry[j].second;
  const SplineCurve& curve = curves[pd.curve];
  const size_t nc = topo.cuts.size();
  pd.iv.resize(nc);
  pd.vf.resize(nc);
  pd.sd.resize(nc);
  for (size_t c = 0; c < nc; ++c) {
    const ElementCut& cut = topo.cuts[c];
    if (cut.curve != pd.curve) {
      pd.vf[c] = velocity_field(cache.geoms[c], pd.iv[c]);  // zero field
      pd.sd[c] = ShapeDerivativeBundle{};
      continue;
    }
    pd.iv[c] = intersection_velocities(curve, mesh, cut, local_j);
    pd.vf[c] = velocity_field(cache.geoms[c], pd.iv[c]);
    pd.sd[c] = shape_derivatives(cache.cut_basis[c], pd.iv[c]);
  }
  return pd;
}

GlobalDerivatives assemble_dA_dF(const Mesh& mesh, const InterfaceTopology& topo,
                                 const BasisCache& cache, const ForwardProblemSpec& spec,
                                 const PerDesignDerivatives& pd) {
  const int nn = static_cast<int>(mesh.nodes.size());
  const double sigma = spec.sigma();
  GlobalDerivatives gd;
  gd.dF_full = Eigen::VectorXd::Zero(nn);
  std::vector<Eigen::Triplet<double>> trips;

  for (size_t c = 0; c < topo.cuts.size(); ++c) {
    if (topo.cuts[c].curve != pd.curve) continue;
    const ElementBasis& b = cache.cut_basis[c];
    const Eigen::Matrix3d dk = d_local_stiffness(b, pd.sd[c], pd.vf[c]);
    const Eigen::Vector3d df = d_local_load(b, pd.sd[c], pd.vf[c], spec.f);
    for (int p = 0; p < 3; ++p) {
      gd.dF_full(b.vertex_ids[p]) += df(p);
      for (int q = 0; q < 3; ++q)
        trips.emplace_back(b.vertex_ids[q], b.vertex_ids[p], dk(p, q));
    }
  }

  for (const EdgeCut& cut : topo.edge_cuts) {
    if (cut.curve != pd.curve) continue;
    const Mesh::Edge& e = mesh.edges[cut.edge];
    const bool boundary = e.elem[1] < 0;
    if (boundary && spec.side_is_neumann(e.boundary_side)) continue;
    const EdgeContext ctx = make_edge_context(mesh, cache, cut);
    const int c1 = topo.element_cut[e.elem[0]];
    const int c2 = boundary ? -1 : topo.element_cut[e.elem[1]];
    const ShapeDerivativeBundle& sd1 = pd.sd[c1];
    const ShapeDerivativeBundle* sd2 = c2 >= 0 ? &pd.sd[c2] : nullptr;
    // crossing velocity taken from the first element's records
    const ElementCut& ec1 = topo.cuts[c1];
    const Vec2 dcross = ec1.edge_p == cut.edge ? pd.iv[c1].dP : pd.iv[c1].dQ;

    const std::vector<int> sides = boundary ? std::vector<int>{0} : std::vector<int>{1, 2};
    const double w = boundary ? 1.0 : 0.5;
    for (int r1 : sides) {
      const auto& ids1 = side_elem(ctx, r1).vertex_ids;
      for (int r2 : sides) {
        const auto& ids2 = side_elem(ctx, r2).vertex_ids;
        const Eigen::Matrix3d de12 = d_edge_consistency(ctx, r1, r2, sd1, sd2, dcross);
        const Eigen::Matrix3d de21 = d_edge_consistency(ctx, r2, r1, sd1, sd2, dcross);
        const Eigen::Matrix3d dg12 = d_edge_penalty(ctx, r1, r2, sd1, sd2, sigma);
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q)
            trips.emplace_back(ids2[q], ids1[p],
                               -w * (de12(p, q) + de21(q, p)) + dg12(p, q));
      }
    }
    if (boundary) {
      const Eigen::Vector3d dbe = d_edge_dirichlet_flux(ctx, sd1, spec.g_dirichlet, dcross);
      const Eigen::Vector3d dce = d_edge_dirichlet_penalty(ctx, sd1, spec.g_dirichlet, sigma);
      const auto& ids = ctx.elem[0]->vertex_ids;
      for (int p = 0; p < 3; ++p) gd.dF_full(ids[p]) += spec.epsilon * dbe(p) + dce(p);
    }
  }

  // cut Neumann boundary edges contribute through the load only
  for (const EdgeCut& cut : topo.edge_cuts) {
    if (cut.curve != pd.curve) continue;
    const Mesh::Edge& e = mesh.edges[cut.edge];
    if (e.elem[1] >= 0 || !spec.side_is_neumann(e.boundary_side)) continue;
    const EdgeContext ctx = make_edge_context(mesh, cache, cut);
    const int c1 = topo.element_cut[e.elem[0]];
    const ElementCut& ec1 = topo.cuts[c1];
    const Vec2 dcross = ec1.edge_p == cut.edge ? pd.iv[c1].dP : pd.iv[c1].dQ;
    const Eigen::Vector3d dne = d_edge_neumann(ctx, pd.sd[c1], spec.g_neumann, dcross);
    const auto& ids = ctx.elem[0]->vertex_ids;
    for (int p = 0; p < 3; ++p) gd.dF_full(ids[p]) += dne(p);
  }

  gd.dA_full.resize(nn, nn);
  gd.dA_full.setFromTriplets(trips.begin(), trips.end());

  if (spec.kind == BCKind::PureNeumann) {
    gd.dR = Eigen::VectorXd::Zero(nn);
    for (size_t c = 0; c < topo.cuts.size(); ++c) {
      if (topo.cuts[c].curve != pd.curve) continue;
      const ElementBasis& b = cache.cut_basis[c];
      const Eigen::Vector3d dr = d_local_r_vector(b, pd.sd[c], pd.vf[c]);
      for (int p = 0; p < 3; ++p) gd.dR(b.vertex_ids[p]) += dr(p);
    }
  }
  return gd;
}

Eigen::VectorXd direct_rhs(const AssembledSystem& sys, const GlobalDerivatives& gd,
                           const Eigen::VectorXd& reduced_state) {
  if (sys.dofs.pure_neumann) {
    const int nn = static_cast<int>(sys.dofs.node_to_free.size());
    const Eigen::VectorXd u = reduced_state.head(nn);
    const double lambda = reduced_state(nn);
    Eigen::VectorXd rhs(nn + 1);
    rhs.head(nn) = gd.dF_full - gd.dA_full * u - gd.dR * lambda;
    rhs(nn) = -gd.dR.dot(u);
    return rhs;
  }
  const Eigen::VectorXd w = sys.nodal_values(reduced_state);
  const Eigen::VectorXd daw = gd.dA_full * w;
  const int nf = static_cast<int>(sys.dofs.free_nodes.size());
  Eigen::VectorXd rhs(nf);
  for (int i = 0; i < nf; ++i) {
    const int node = sys.dofs.free_nodes[i];
    rhs(i) = gd.dF_full(node) - daw(node);
  }
  return rhs;
}

double adjoint_contribution(const AssembledSystem& sys, const GlobalDerivatives& gd,
                            const Eigen::VectorXd& reduced_state,
                            const Eigen::VectorXd& reduced_adjoint) {
  return reduced_adjoint.dot(direct_rhs(sys, gd, reduced_state));
}

Eigen::VectorXd material_derivative(
    const std::vector<SplineCurve>& curves, const DesignLayout& layout, const Mesh& mesh,
    const InterfaceTopology& topo, const BasisCache& cache,
    const std::vector<const ForwardProblemSpec*>& specs,
    const std::vector<const AssembledSystem*>& systems,
    const std::vector<Eigen::VectorXd>& states, const std::vector<Eigen::VectorXd>& adjoints,
    const std::function<double(int, const PerDesignDerivatives&)>& explicit_terms, int threads) {
  const size_t kk = specs.size();
  if (systems.size() != kk || states.size() != kk || adjoints.size() != kk)
    throw ContractError("material_derivative: need one system/state/adjoint per problem");
  const int nd = layout.total();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(nd);
  auto work = [&](int j) {
    const PerDesignDerivatives pd = element_derivatives(curves, layout, mesh, topo, cache, j);
    double g = 0.0;
    for (size_t k = 0; k < kk; ++k) {
      const GlobalDerivatives gd = assemble_dA_dF(mesh, topo, cache, *specs[k], pd);
      g += adjoint_contribution(*systems[k], gd, states[k], adjoints[k]);
    }
    if (explicit_terms) g += explicit_terms(j, pd);
    grad(j) = g;
  };
  const int nthreads = std::max(1, threads);
  if (nthreads == 1 || nd < 2) {
    for (int j = 0; j < nd; ++j) work(j);
  } else {
    // per-j results land in disjoint slots, so the result is thread-count
    // independent
    std::vector<std::thread> pool;
    const int used = std::min(nthreads, nd);
    for (int t = 0; t < used; ++t) {
      pool.emplace_back([&, t] {
        for (int j = t; j < nd; j += used) work(j);
      });
    }
    for (auto& th : pool) th.join();
  }
  return grad;
}

bool same_interface_sets(const InterfaceTopology& a, const InterfaceTopology& b) {
  if (a.element_cut.size() != b.element_cut.size()) return false;
  for (size_t i = 0; i < a.element_cut.size(); ++i) {
    if ((a.element_cut[i] >= 0) != (b.element_cut[i] >= 0)) return false;
    if (a.element_cut[i] >= 0 &&
        a.cuts[a.element_cut[i]].curve != b.cuts[b.element_cut[i]].curve)
      return false;
  }
  if (a.edge_cut_index.size() != b.edge_cut_index.size()) return false;
  for (size_t i = 0; i < a.edge_cut_index.size(); ++i)
    if ((a.edge_cut_index[i] >= 0) != (b.edge_cut_index[i] >= 0)) return false;
  return true;
}

}  // namespace ifex
