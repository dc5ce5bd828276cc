#pragma once

#include <functional>
#include <vector>

#include "ifex/assembly.hpp"
#include "ifex/geometry.hpp"
#include "ifex/mesh.hpp"

namespace ifex {

// Layout of the global design vector over a list of curves.
struct DesignLayout {
  std::vector<std::pair<int, int>> entry;  // (curve index, local design index)
  std::vector<int> curve_offset;

  int total() const { return static_cast<int>(entry.size()); }
  static DesignLayout of(const std::vector<SplineCurve>& curves);
};

struct IntersectionVelocity {
  Vec2 dP = Vec2::Zero();
  Vec2 dQ = Vec2::Zero();
};

// Total derivatives of the intersection points of one cut element with
// respect to local design variable j of its curve.
IntersectionVelocity intersection_velocities(const SplineCurve& curve, const Mesh& mesh,
                                             const ElementCut& cut, int j);

// Velocity field piece on one cut element: affine per sub-triangle, zero
// elsewhere.
struct VelocityField {
  std::array<Mat2, 3> dJ;
  std::array<Mat2, 3> M;  // (dJ_m) J_m^{-1}
  std::array<double, 3> divergence;
  std::array<Vec2, 3> base;

  Vec2 eval_piece(int m, const Vec2& x) const { return M[m] * (x - base[m]); }
  int locate(const InterfaceElementGeom& g, const Vec2& x) const;
  Vec2 eval(const InterfaceElementGeom& g, const Vec2& x) const {
    return eval_piece(locate(g, x), x);
  }
};

VelocityField velocity_field(const InterfaceElementGeom& geom, const IntersectionVelocity& iv);

// Shape derivatives (spatial point held fixed) of the IFE shape functions.
struct ShapeFnDerivative {
  Affine2 dminus, dplus;
  double dc0 = 0.0;
};

struct ShapeDerivativeBundle {
  IntersectionVelocity iv;
  Vec2 dnbar = Vec2::Zero();
  Affine2 dL;
  std::array<ShapeFnDerivative, 3> fn;
};

ShapeDerivativeBundle shape_derivatives(const ElementBasis& basis,
                                        const IntersectionVelocity& iv);

Eigen::Matrix3d d_local_stiffness(const ElementBasis& basis, const ShapeDerivativeBundle& sd,
                                  const VelocityField& vf);
Eigen::Vector3d d_local_load(const ElementBasis& basis, const ShapeDerivativeBundle& sd,
                             const VelocityField& vf, const Field& f);
Eigen::Vector3d d_local_r_vector(const ElementBasis& basis, const ShapeDerivativeBundle& sd,
                                 const VelocityField& vf);

// Edge-level material derivatives. sd1/sd2 are the bundles of elem[0]/elem[1]
// (sd2 null on boundary edges); dcross is the crossing-point velocity.
Eigen::Matrix3d d_edge_consistency(const EdgeContext& ctx, int r1, int r2,
                                   const ShapeDerivativeBundle& sd1,
                                   const ShapeDerivativeBundle* sd2, const Vec2& dcross);
Eigen::Matrix3d d_edge_penalty(const EdgeContext& ctx, int r1, int r2,
                               const ShapeDerivativeBundle& sd1,
                               const ShapeDerivativeBundle* sd2, double sigma);
Eigen::Vector3d d_edge_dirichlet_flux(const EdgeContext& ctx, const ShapeDerivativeBundle& sd1,
                                      const Field& g_d, const Vec2& dcross);
Eigen::Vector3d d_edge_dirichlet_penalty(const EdgeContext& ctx,
                                         const ShapeDerivativeBundle& sd1, const Field& g_d,
                                         double sigma);
Eigen::Vector3d d_edge_neumann(const EdgeContext& ctx, const ShapeDerivativeBundle& sd1,
                               const Field& g_n, const Vec2& dcross);

// Everything element-local for one design variable.
struct PerDesignDerivatives {
  int j = -1;
  int curve = -1;                          // curve owning the variable
  std::vector<IntersectionVelocity> iv;    // per cut (zero for other curves)
  std::vector<VelocityField> vf;
  std::vector<ShapeDerivativeBundle> sd;
};

PerDesignDerivatives element_derivatives(const std::vector<SplineCurve>& curves,
                                         const DesignLayout& layout, const Mesh& mesh,
                                         const InterfaceTopology& topo, const BasisCache& cache,
                                         int j);

struct GlobalDerivatives {
  Eigen::SparseMatrix<double> dA_full;  // node space, support on cut stencils
  Eigen::VectorXd dF_full;
  Eigen::VectorXd dR;  // nonempty for pure-Neumann problems
};

GlobalDerivatives assemble_dA_dF(const Mesh& mesh, const InterfaceTopology& topo,
                                 const BasisCache& cache, const ForwardProblemSpec& spec,
                                 const PerDesignDerivatives& pd);

// Y . (D F - D A u) for one forward problem, in reduced coordinates.
double adjoint_contribution(const AssembledSystem& sys, const GlobalDerivatives& gd,
                            const Eigen::VectorXd& reduced_state,
                            const Eigen::VectorXd& reduced_adjoint);

// Reduced right-hand side D F - (D A) u of the direct sensitivity system.
Eigen::VectorXd direct_rhs(const AssembledSystem& sys, const GlobalDerivatives& gd,
                           const Eigen::VectorXd& reduced_state);

// Full gradient: adjoint contraction over the K problems plus the
// objective-supplied explicit terms, mapped in parallel over the design set.
Eigen::VectorXd material_derivative(
    const std::vector<SplineCurve>& curves, const DesignLayout& layout, const Mesh& mesh,
    const InterfaceTopology& topo, const BasisCache& cache,
    const std::vector<const ForwardProblemSpec*>& specs,
    const std::vector<const AssembledSystem*>& systems,
    const std::vector<Eigen::VectorXd>& states, const std::vector<Eigen::VectorXd>& adjoints,
    const std::function<double(int, const PerDesignDerivatives&)>& explicit_terms, int threads);

bool same_interface_sets(const InterfaceTopology& a, const InterfaceTopology& b);

}  // namespace ifex
