#pragma once

#include <array>
#include <vector>

#include "ifex/mesh.hpp"
#include "ifex/types.hpp"

namespace ifex {

// Standard P1 shape functions on a triangle, as affine fields.
std::array<Affine2, 3> p1_basis(const std::array<Vec2, 3>& v);

// Geometry of one cut element in the canonical arrangement: P on edge (A1,A2),
// Q on edge (A1,A3). The chord normal is oriented so L < 0 on the minus side.
struct InterfaceElementGeom {
  int element = -1;
  std::array<int, 3> vertex{-1, -1, -1};  // global node ids (A1, A2, A3); -1 for synthetic
  std::array<Vec2, 3> A;
  Vec2 P = Vec2::Zero(), Q = Vec2::Zero();
  bool a1_minus = false;

  Vec2 nbar = Vec2::Zero();  // unit normal of the chord
  Affine2 L;                 // L(X) = nbar . (X - P)
  std::vector<int> iminus, iplus;  // local vertex indices per side

  // sub-triangles T1 = (A1,P,Q), T2 = (A2,Q,P), T3 = (A3,Q,A2)
  std::array<Mat2, 3> J;
  std::array<double, 3> subtri_area{};
  std::array<std::array<Vec2, 3>, 3> subtri;
  std::array<bool, 3> subtri_minus{};

  bool minus_at(const Vec2& x) const { return L(x) < 0.0; }
  double area() const { return subtri_area[0] + subtri_area[1] + subtri_area[2]; }
};

InterfaceElementGeom build_geom(const std::array<Vec2, 3>& verts, const Vec2& p, const Vec2& q,
                                bool a1_minus);
InterfaceElementGeom build_geom(const Mesh& mesh, const ElementCut& cut);

// Coefficients of one IFE function for nodal values v.
struct IfeCoefficients {
  double mu = 0.0;
  double c0 = 0.0;
  double gplus = 0.0;                   // sum over I+ of (grad psi . nbar) v
  std::vector<double> gamma, delta, b, c;  // over I-
  double denom = 1.0;                      // 1 + mu gamma.delta
};

// A piecewise-linear function on a cut element: one affine piece per side.
struct IfeShape {
  Affine2 minus, plus;
  IfeCoefficients coef;
  double value(const InterfaceElementGeom& g, const Vec2& x) const {
    return g.minus_at(x) ? minus(x) : plus(x);
  }
  Vec2 gradient(const InterfaceElementGeom& g, const Vec2& x) const {
    return g.minus_at(x) ? minus.g : plus.g;
  }
};

IfeShape build_ife_shape(const InterfaceElementGeom& geom, double beta_minus, double beta_plus,
                         const std::array<double, 3>& v);

// Local basis of one element, interface or not, used by assembly and
// sensitivity. Non-interface elements carry equal pieces on both sides.
struct ElementBasis {
  bool interface = false;
  double beta_minus = 0.0, beta_plus = 0.0;  // equal on non-interface elements
  std::array<Vec2, 3> verts;
  std::array<int, 3> vertex_ids{-1, -1, -1};
  InterfaceElementGeom geom;  // valid when interface
  std::array<IfeShape, 3> shape;

  double beta_at(const Vec2& x) const {
    if (!interface) return beta_minus;
    return geom.minus_at(x) ? beta_minus : beta_plus;
  }
  double shape_value(int i, const Vec2& x) const;
  Vec2 shape_gradient(int i, const Vec2& x) const;
};

ElementBasis non_interface_basis(const std::array<Vec2, 3>& verts, double beta);
ElementBasis interface_basis(const InterfaceElementGeom& geom, double beta_minus,
                             double beta_plus);

}  // namespace ifex
