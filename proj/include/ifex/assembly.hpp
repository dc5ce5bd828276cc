#pragma once

#include <Eigen/Sparse>
#include <cstdint>
#include <functional>
#include <vector>

#include "ifex/ife.hpp"
#include "ifex/mesh.hpp"

namespace ifex {

// Scalar data field with an optional gradient (needed by sensitivity terms).
struct Field {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;

  double operator()(const Vec2& x) const { return value(x); }
  Vec2 grad(const Vec2& x) const { return gradient ? gradient(x) : Vec2::Zero(); }
  static Field zero() {
    return {[](const Vec2&) { return 0.0; }, [](const Vec2&) { return Vec2::Zero(); }};
  }
  static Field constant(double c) {
    return {[c](const Vec2&) { return c; }, [](const Vec2&) { return Vec2::Zero(); }};
  }
};

// Piecewise-constant conductivity: region 0 is outside every curve, region
// c+1 the inside of curve c.
struct MaterialModel {
  double beta_out = 1.0;
  std::vector<double> beta_in{1.0};

  double region(int r) const { return r == 0 ? beta_out : beta_in.at(r - 1); }
  double minus_of_curve(int c) const { return beta_in.at(c); }
  double plus_of_curve(int) const { return beta_out; }
  double max_beta() const {
    double m = beta_out;
    for (double b : beta_in) m = std::max(m, b);
    return m;
  }
};

enum class BCKind { Mixed, PureNeumann };

struct ForwardProblemSpec {
  MaterialModel material;
  Field f;
  BCKind kind = BCKind::Mixed;
  std::uint8_t neumann_sides = 0;  // bitmask over Side; every side for PureNeumann
  Field g_dirichlet = Field::zero();
  Field g_neumann = Field::zero();  // conormal flux data
  double u0 = 0.0;                  // normalization value, pure Neumann only
  double sigma0 = -1.0;             // penalty factor; defaults to 10 max(beta)
  double epsilon = -1.0;            // consistency sign of the symmetric scheme

  double sigma() const { return sigma0 > 0 ? sigma0 : 10.0 * material.max_beta(); }
  bool side_is_neumann(int side) const {
    return kind == BCKind::PureNeumann || (neumann_sides & (1 << side));
  }
  bool node_is_dirichlet(std::uint8_t boundary_mask) const {
    if (kind == BCKind::PureNeumann) return false;
    const std::uint8_t dirichlet_sides = static_cast<std::uint8_t>(~neumann_sides) & 0xF;
    return (boundary_mask & dirichlet_sides) != 0;
  }
};

// IFE basis data for one classification of the mesh.
struct BasisCache {
  const Mesh* mesh = nullptr;
  const InterfaceTopology* topo = nullptr;
  MaterialModel material;
  std::vector<InterfaceElementGeom> geoms;   // per cut, same order as topo->cuts
  std::vector<ElementBasis> cut_basis;       // per cut

  ElementBasis basis_of(int element) const;
  const ElementBasis* cut_basis_of(int element) const;  // null when not cut
};

BasisCache build_basis(const Mesh& mesh, const InterfaceTopology& topo,
                       const MaterialModel& material);

struct DofMap {
  std::vector<int> node_to_free;  // -1 at Dirichlet nodes
  std::vector<int> free_nodes;
  std::vector<int> dirichlet_nodes;
  bool pure_neumann = false;
  int system_size = 0;  // free nodes, plus one multiplier row when pure Neumann
};

DofMap build_dof_map(const Mesh& mesh, const ForwardProblemSpec& spec);

struct AssembledSystem {
  Eigen::SparseMatrix<double> A;       // reduced operator that gets factored
  Eigen::VectorXd F;                   // matching right-hand side
  Eigen::SparseMatrix<double> A_full;  // node-space stiffness, fixed sparsity superset
  Eigen::VectorXd F_full;
  Eigen::VectorXd R;            // node-space integrals of basis functions (pure Neumann)
  Eigen::VectorXd g_dirichlet;  // node-space; zero away from Dirichlet nodes
  DofMap dofs;
  std::uint64_t stamp = 0;

  // Expand a reduced solution to nodal values (Dirichlet data filled in).
  Eigen::VectorXd nodal_values(const Eigen::VectorXd& reduced) const;
  double multiplier(const Eigen::VectorXd& reduced) const;
};

Eigen::Matrix3d local_stiffness(const ElementBasis& basis);
Eigen::Vector3d local_load(const ElementBasis& basis, const Field& f);
Eigen::Vector3d local_r_vector(const ElementBasis& basis);

// Context of one interface edge: adjacent element bases, crossing point,
// normals oriented from side 1 to side 2 (outward for boundary edges).
struct EdgeContext {
  const Mesh::Edge* edge = nullptr;
  Vec2 p1, p2;       // endpoint coordinates (edge->a, edge->b)
  Vec2 crossing;
  double length = 0;
  Vec2 normal;       // n^1 = -n^2 for interior edges, outward on the boundary
  const ElementBasis* elem[2] = {nullptr, nullptr};  // elem[1] null on the boundary
  bool boundary = false;
};

EdgeContext make_edge_context(const Mesh& mesh, const BasisCache& cache, const EdgeCut& cut);

inline const ElementBasis& side_elem(const EdgeContext& ctx, int r) {
  return r == 2 ? *ctx.elem[1] : *ctx.elem[0];
}

// E^{r1 r2} and G^{r1 r2}; r in {1,2} maps to elem[0], elem[1] (r=0 boundary
// uses elem[0] with the outward normal).
Eigen::Matrix3d edge_consistency_matrix(const EdgeContext& ctx, int r1, int r2);
Eigen::Matrix3d edge_penalty_matrix(const EdgeContext& ctx, int r1, int r2, double sigma);

Eigen::Vector3d edge_dirichlet_flux_vector(const EdgeContext& ctx, const Field& g_d);  // B_e
Eigen::Vector3d edge_dirichlet_penalty_vector(const EdgeContext& ctx, const Field& g_d,
                                              double sigma);                           // C_e
Eigen::Vector3d edge_neumann_vector(const EdgeContext& ctx, const Field& g_n);         // N_e

AssembledSystem assemble(const Mesh& mesh, const InterfaceTopology& topo,
                         const BasisCache& cache, const ForwardProblemSpec& spec);

}  // namespace ifex
