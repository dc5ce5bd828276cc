#include "ifex/objectives.hpp"

#include <cmath>

#include "ifex/quadrature.hpp"

namespace ifex {

namespace {

void check_rect_alignment(const Rect& r, const Mesh& mesh) {
  const double h = mesh.h();
  for (double v : {r.x0, r.y0, r.x1, r.y1}) {
    const double k = (v + 1.0) / h;
    if (std::abs(k - std::round(k)) > 1e-9)
      throw ContractError("objective: observation window must align with mesh lines");
  }
}

void check_stamp(std::uint64_t a, std::uint64_t b) {
  if (a != b) throw ContractError("objective: stale topology/state combination");
}

Eigen::VectorXd reduce_to(const AssembledSystem& sys, const Eigen::VectorXd& full) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(sys.dofs.system_size);
  const int nf = static_cast<int>(sys.dofs.free_nodes.size());
  for (int i = 0; i < nf; ++i) out(i) = full(sys.dofs.free_nodes[i]);
  return out;  // multiplier slot, when present, stays zero
}

}  // namespace

ObjectiveContext build_objective_context(const Mesh& mesh, const InterfaceTopology& topo,
                                         const BasisCache& cache, const ObjectiveSpec& spec) {
  ObjectiveContext ctx;
  ctx.stamp = topo.stamp;
  const int nn = static_cast<int>(mesh.nodes.size());
  const Rect omega0 = spec.kind == ObjectiveSpec::Kind::OutputLeastSquares ? spec.omega0 : Rect{};
  if (!omega0.is_whole()) check_rect_alignment(omega0, mesh);
  ctx.in_omega0.assign(mesh.elements.size(), 0);
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const auto& el = mesh.elements[e];
    ctx.in_omega0[e] = omega0.contains(mesh.nodes[el[0]]) && omega0.contains(mesh.nodes[el[1]]) &&
                       omega0.contains(mesh.nodes[el[2]]);
  }

  if (spec.kind == ObjectiveSpec::Kind::HeatDissipation) {
    std::vector<Eigen::Triplet<double>> trips;
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
      const ElementBasis b = cache.basis_of(static_cast<int>(e));
      const Eigen::Matrix3d k = local_stiffness(b);
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q)
          trips.emplace_back(b.vertex_ids[q], b.vertex_ids[p], k(p, q));
    }
    ctx.k_bulk.resize(nn, nn);
    ctx.k_bulk.setFromTriplets(trips.begin(), trips.end());
    return ctx;
  }

  std::vector<Eigen::Triplet<double>> trips;
  ctx.ubar_vec = Eigen::VectorXd::Zero(nn);
  ctx.ubar_sq = 0.0;
  const bool ols = spec.kind == ObjectiveSpec::Kind::OutputLeastSquares;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    if (!ctx.in_omega0[e]) continue;
    const ElementBasis b = cache.basis_of(static_cast<int>(e));
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    Eigen::Vector3d uv = Eigen::Vector3d::Zero();
    auto accumulate = [&](const std::array<Vec2, 3>& tri, bool minus) {
      const double area = quad::tri_area(tri[0], tri[1], tri[2]);
      for (const auto& gp : quad::tri7()) {
        const Vec2 x = gp.l1 * tri[0] + gp.l2 * tri[1] + gp.l3 * tri[2];
        double vals[3];
        for (int p = 0; p < 3; ++p)
          vals[p] = (minus ? b.shape[p].minus : b.shape[p].plus)(x);
        for (int p = 0; p < 3; ++p)
          for (int q = 0; q < 3; ++q) m(p, q) += gp.w * area * vals[p] * vals[q];
        if (ols) {
          const double ub = spec.ubar(x);
          for (int p = 0; p < 3; ++p) uv(p) += gp.w * area * ub * vals[p];
          ctx.ubar_sq += gp.w * area * ub * ub;
        }
      }
    };
    if (!b.interface) {
      accumulate(b.verts, false);
    } else {
      for (int m3 = 0; m3 < 3; ++m3) accumulate(b.geom.subtri[m3], b.geom.subtri_minus[m3]);
    }
    for (int p = 0; p < 3; ++p) {
      ctx.ubar_vec(b.vertex_ids[p]) += uv(p);
      for (int q = 0; q < 3; ++q)
        trips.emplace_back(b.vertex_ids[q], b.vertex_ids[p], m(p, q));
    }
  }
  ctx.mass.resize(nn, nn);
  ctx.mass.setFromTriplets(trips.begin(), trips.end());
  return ctx;
}

double eval_objective(const ObjectiveSpec& spec, const ObjectiveContext& ctx,
                      const std::vector<AssembledSystem>& systems, const ForwardStates& states) {
  check_stamp(ctx.stamp, states.stamp);
  for (const auto& sys : systems) check_stamp(ctx.stamp, sys.stamp);
  switch (spec.kind) {
    case ObjectiveSpec::Kind::OutputLeastSquares: {
      const Eigen::VectorXd& w = states.nodal.at(0);
      return w.dot(ctx.mass * w) - 2.0 * w.dot(ctx.ubar_vec) + ctx.ubar_sq;
    }
    case ObjectiveSpec::Kind::KohnVogelius: {
      const Eigen::VectorXd d = states.nodal.at(0) - states.nodal.at(1);
      return d.dot(ctx.mass * d);
    }
    case ObjectiveSpec::Kind::HeatDissipation: {
      const Eigen::VectorXd& w = states.nodal.at(0);
      return w.dot(ctx.k_bulk * w);
    }
  }
  throw ContractError("eval_objective: unknown kind");
}

std::vector<Eigen::VectorXd> objective_du(const ObjectiveSpec& spec, const ObjectiveContext& ctx,
                                          const std::vector<AssembledSystem>& systems,
                                          const ForwardStates& states) {
  check_stamp(ctx.stamp, states.stamp);
  std::vector<Eigen::VectorXd> out;
  switch (spec.kind) {
    case ObjectiveSpec::Kind::OutputLeastSquares: {
      const Eigen::VectorXd full = 2.0 * (ctx.mass * states.nodal.at(0) - ctx.ubar_vec);
      out.push_back(reduce_to(systems.at(0), full));
      break;
    }
    case ObjectiveSpec::Kind::KohnVogelius: {
      const Eigen::VectorXd full =
          2.0 * (ctx.mass * (states.nodal.at(0) - states.nodal.at(1)));
      out.push_back(reduce_to(systems.at(0), full));
      out.push_back(reduce_to(systems.at(1), -full));
      break;
    }
    case ObjectiveSpec::Kind::HeatDissipation: {
      const Eigen::VectorXd full = 2.0 * (ctx.k_bulk * states.nodal.at(0));
      out.push_back(reduce_to(systems.at(0), full));
      break;
    }
  }
  return out;
}

double explicit_terms_j(const ObjectiveSpec& spec, const ObjectiveContext& ctx,
                        const InterfaceTopology& topo, const BasisCache& cache,
                        const ForwardStates& states, const PerDesignDerivatives& pd) {
  check_stamp(ctx.stamp, states.stamp);
  const bool ols = spec.kind == ObjectiveSpec::Kind::OutputLeastSquares;
  const bool kv = spec.kind == ObjectiveSpec::Kind::KohnVogelius;
  double total = 0.0;
  for (size_t c = 0; c < topo.cuts.size(); ++c) {
    const ElementCut& cut = topo.cuts[c];
    if (cut.curve != pd.curve) continue;
    if (!ctx.in_omega0[cut.element]) continue;
    const ElementBasis& b = cache.cut_basis[c];
    const ShapeDerivativeBundle& sd = pd.sd[c];
    const VelocityField& vf = pd.vf[c];
    std::array<double, 3> w1{}, w2{};
    for (int p = 0; p < 3; ++p) {
      w1[p] = states.nodal.at(0)(b.vertex_ids[p]);
      if (kv) w2[p] = states.nodal.at(1)(b.vertex_ids[p]);
    }
    for (int m = 0; m < 3; ++m) {
      const bool minus = b.geom.subtri_minus[m];
      const auto& tri = b.geom.subtri[m];
      const double area = b.geom.subtri_area[m];
      const double beta = minus ? b.beta_minus : b.beta_plus;
      for (const auto& gp : quad::tri7()) {
        const Vec2 x = gp.l1 * tri[0] + gp.l2 * tri[1] + gp.l3 * tri[2];
        const Vec2 v = vf.eval_piece(m, x);
        double u1 = 0, du1 = 0, u2 = 0, du2 = 0;
        Vec2 gu1 = Vec2::Zero(), gdu1 = Vec2::Zero(), gu2 = Vec2::Zero();
        for (int p = 0; p < 3; ++p) {
          const Affine2& a = minus ? b.shape[p].minus : b.shape[p].plus;
          const Affine2& da = minus ? sd.fn[p].dminus : sd.fn[p].dplus;
          u1 += w1[p] * a(x);
          du1 += w1[p] * da(x);
          gu1 += w1[p] * a.g;
          gdu1 += w1[p] * da.g;
          if (kv) {
            u2 += w2[p] * a(x);
            du2 += w2[p] * da(x);
            gu2 += w2[p] * a.g;
          }
        }
        double jx, dj_dalpha;
        Vec2 grad_j;
        if (ols) {
          const double diff = u1 - spec.ubar(x);
          jx = diff * diff;
          dj_dalpha = 2.0 * diff * du1;
          grad_j = 2.0 * diff * (gu1 - spec.ubar.grad(x));
        } else if (kv) {
          const double diff = u1 - u2;
          jx = diff * diff;
          dj_dalpha = 2.0 * diff * (du1 - du2);
          grad_j = 2.0 * diff * (gu1 - gu2);
        } else {
          jx = beta * gu1.squaredNorm();
          dj_dalpha = 2.0 * beta * gu1.dot(gdu1);
          grad_j = Vec2::Zero();  // piecewise-constant integrand
        }
        total += gp.w * area * (dj_dalpha + grad_j.dot(v) + jx * vf.divergence[m]);
      }
    }
  }
  return total;
}

std::pair<double, Eigen::VectorXd> area_constraint(const ObjectiveSpec& spec,
                                                   const std::vector<SplineCurve>& curves,
                                                   const DesignLayout& layout) {
  if (spec.kind != ObjectiveSpec::Kind::HeatDissipation)
    throw ContractError("area_constraint: heat objective only");
  if (curves.size() != 1)
    throw ContractError("area_constraint: a single design curve is expected");
  const double value = curves[0].enclosed_area() - spec.theta * 4.0;
  const auto grad_local = curves[0].enclosed_area_gradient();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(layout.total());
  for (int j = 0; j < layout.total(); ++j) {
    const auto [c, local] = layout.entry[j];
    if (c == 0) grad(j) = grad_local[local];
  }
  return {value, grad};
}

}  // namespace ifex
