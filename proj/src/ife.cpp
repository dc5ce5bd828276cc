#include "ifex/ife.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace ifex {

std::array<Affine2, 3> p1_basis(const std::array<Vec2, 3>& v) {
  const double s2 = cross2(v[1] - v[0], v[2] - v[0]);  // twice the signed area
  std::array<Affine2, 3> out;
  for (int i = 0; i < 3; ++i) {
    const Vec2 d = v[(i + 2) % 3] - v[(i + 1) % 3];
    out[i].g = Vec2(-d.y(), d.x()) / s2;
    out[i].a = 1.0 - out[i].g.dot(v[i]);
  }
  return out;
}

InterfaceElementGeom build_geom(const std::array<Vec2, 3>& verts, const Vec2& p, const Vec2& q,
                                bool a1_minus) {
  InterfaceElementGeom g;
  g.A = verts;
  g.P = p;
  g.Q = q;
  g.a1_minus = a1_minus;
  const Vec2 d = p - q;
  const double len = d.norm();
  if (len < 1e-12) throw GeometryError("build_geom: coincident intersection points");

  auto on_segment = [](const Vec2& x, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double t = (x - a).dot(ab) / ab.squaredNorm();
    return std::abs(cross2(ab, x - a)) < 1e-9 * ab.norm() && t > -1e-9 && t < 1 + 1e-9;
  };
  if (!on_segment(p, verts[0], verts[1]) || !on_segment(q, verts[0], verts[2])) {
    if (on_segment(p, verts[0], verts[1]) && on_segment(q, verts[0], verts[1]))
      throw GeometryError("build_geom: both intersections on one edge");
    throw GeometryError("build_geom: intersections not in the canonical arrangement");
  }

  g.nbar = Vec2(p.y() - q.y(), -(p.x() - q.x())) / len;
  // orient so the minus side has L < 0
  const double l_a1 = g.nbar.dot(verts[0] - p);
  if ((l_a1 < 0) != a1_minus) g.nbar = -g.nbar;
  g.L.g = g.nbar;
  g.L.a = -g.nbar.dot(p);

  for (int i = 0; i < 3; ++i) {
    const bool minus = g.L(verts[i]) < 0;
    (minus ? g.iminus : g.iplus).push_back(i);
  }
  if (g.iminus.empty() || g.iplus.empty())
    throw GeometryError("build_geom: chord does not separate the vertices");

  g.subtri[0] = {verts[0], p, q};
  g.subtri[1] = {verts[1], q, p};
  g.subtri[2] = {verts[2], q, verts[1]};
  g.J[0] << p - verts[0], q - verts[0];
  g.J[1] << q - verts[1], p - verts[1];
  g.J[2] << q - verts[2], verts[1] - verts[2];
  for (int m = 0; m < 3; ++m) {
    g.subtri_area[m] = 0.5 * std::abs(g.J[m].determinant());
    if (g.subtri_area[m] < 1e-14)
      throw GeometryError("build_geom: degenerate sub-triangle " + std::to_string(m));
  }
  g.subtri_minus = {a1_minus, !a1_minus, !a1_minus};
  return g;
}

InterfaceElementGeom build_geom(const Mesh& mesh, const ElementCut& cut) {
  InterfaceElementGeom g = build_geom(
      {mesh.nodes[cut.vertex[0]], mesh.nodes[cut.vertex[1]], mesh.nodes[cut.vertex[2]]},
      cut.rec_p.point, cut.rec_q.point, cut.a1_minus);
  g.element = cut.element;
  g.vertex = cut.vertex;
  return g;
}

IfeShape build_ife_shape(const InterfaceElementGeom& geom, double beta_minus, double beta_plus,
                         const std::array<double, 3>& v) {
  if (beta_minus <= 0 || beta_plus <= 0)
    throw InvalidArgument("build_ife_shape: conductivities must be positive");
  const auto psi = p1_basis(geom.A);

  IfeShape out;
  IfeCoefficients& cf = out.coef;
  cf.mu = beta_plus / beta_minus - 1.0;
  const size_t nm = geom.iminus.size();
  cf.gamma.resize(nm);
  cf.delta.resize(nm);
  cf.b.resize(nm);
  cf.c.resize(nm);
  for (size_t k = 0; k < nm; ++k) {
    const int i = geom.iminus[k];
    cf.gamma[k] = psi[i].g.dot(geom.nbar);
    cf.delta[k] = geom.L(geom.A[i]);
  }
  cf.gplus = 0.0;
  for (int i : geom.iplus) cf.gplus += psi[i].g.dot(geom.nbar) * v[i];

  double gd = 0.0;
  for (size_t k = 0; k < nm; ++k) gd += cf.gamma[k] * cf.delta[k];
  cf.denom = 1.0 + cf.mu * gd;
  if (std::abs(cf.denom) < 1e-12) throw SolverError("build_ife_shape: unisolvency failure");

  double gb = 0.0;
  for (size_t k = 0; k < nm; ++k) {
    cf.b[k] = v[geom.iminus[k]] - cf.mu * cf.delta[k] * cf.gplus;
    gb += cf.gamma[k] * cf.b[k];
  }
  double gc = 0.0;
  for (size_t k = 0; k < nm; ++k) {
    cf.c[k] = cf.b[k] - cf.mu * gb * cf.delta[k] / cf.denom;
    gc += cf.gamma[k] * cf.c[k];
  }
  cf.c0 = cf.mu * (gc + cf.gplus);

  out.plus = Affine2{};
  for (size_t k = 0; k < nm; ++k) out.plus += psi[geom.iminus[k]] * cf.c[k];
  for (int i : geom.iplus) out.plus += psi[i] * v[i];
  out.minus = out.plus + geom.L * cf.c0;
  return out;
}

namespace {

bool inside_triangle(const std::array<Vec2, 3>& v, const Vec2& x) {
  const double s = cross2(v[1] - v[0], v[2] - v[0]);
  for (int i = 0; i < 3; ++i) {
    const double c = cross2(v[(i + 1) % 3] - v[i], x - v[i]);
    if (c * s < -1e-10 * std::abs(s)) return false;
  }
  return true;
}

}  // namespace

double ElementBasis::shape_value(int i, const Vec2& x) const {
  if (i < 0 || i > 2) throw InvalidArgument("shape_value: bad index");
  if (!inside_triangle(verts, x)) throw InvalidArgument("shape_value: point outside element");
  return interface ? shape[i].value(geom, x) : shape[i].plus(x);
}

Vec2 ElementBasis::shape_gradient(int i, const Vec2& x) const {
  if (i < 0 || i > 2) throw InvalidArgument("shape_gradient: bad index");
  if (!inside_triangle(verts, x)) throw InvalidArgument("shape_gradient: point outside element");
  return interface ? shape[i].gradient(geom, x) : shape[i].plus.g;
}

ElementBasis non_interface_basis(const std::array<Vec2, 3>& verts, double beta) {
  ElementBasis eb;
  eb.interface = false;
  eb.beta_minus = eb.beta_plus = beta;
  eb.verts = verts;
  const auto psi = p1_basis(verts);
  for (int i = 0; i < 3; ++i) {
    eb.shape[i].minus = psi[i];
    eb.shape[i].plus = psi[i];
  }
  return eb;
}

ElementBasis interface_basis(const InterfaceElementGeom& geom, double beta_minus,
                             double beta_plus) {
  ElementBasis eb;
  eb.interface = true;
  eb.beta_minus = beta_minus;
  eb.beta_plus = beta_plus;
  eb.verts = geom.A;
  eb.vertex_ids = geom.vertex;
  eb.geom = geom;
  for (int i = 0; i < 3; ++i) {
    std::array<double, 3> v{0, 0, 0};
    v[i] = 1.0;
    eb.shape[i] = build_ife_shape(geom, beta_minus, beta_plus, v);
  }
  return eb;
}

}  // namespace ifex
