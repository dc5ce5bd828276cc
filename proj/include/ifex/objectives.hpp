#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "ifex/assembly.hpp"
#include "ifex/sensitivity.hpp"

namespace ifex {

struct Rect {
  double x0 = -1, y0 = -1, x1 = 1, y1 = 1;
  bool contains(const Vec2& p, double tol = 1e-12) const {
    return p.x() >= x0 - tol && p.x() <= x1 + tol && p.y() >= y0 - tol && p.y() <= y1 + tol;
  }
  bool is_whole() const {
    return x0 <= -1 + 1e-14 && y0 <= -1 + 1e-14 && x1 >= 1 - 1e-14 && y1 >= 1 - 1e-14;
  }
};

struct ObjectiveSpec {
  enum class Kind { OutputLeastSquares, KohnVogelius, HeatDissipation };
  Kind kind = Kind::OutputLeastSquares;
  Rect omega0;                 // observation window (least squares only)
  Field ubar = Field::zero();  // data field (least squares only)
  double theta = 0.5;          // volume fraction bound (heat only)
  std::vector<ForwardProblemSpec> problems;

  int forward_count() const { return static_cast<int>(problems.size()); }
};

// Solved forward problems on one classification.
struct ForwardStates {
  std::uint64_t stamp = 0;
  std::vector<Eigen::VectorXd> reduced;
  std::vector<Eigen::VectorXd> nodal;  // node-space values including Dirichlet data
};

// Quadrature-consistent discrete pieces of the objective for one topology.
struct ObjectiveContext {
  std::uint64_t stamp = 0;
  std::vector<char> in_omega0;          // per element
  Eigen::SparseMatrix<double> mass;     // node-space mass over omega0 (OLS/KV)
  Eigen::VectorXd ubar_vec;             // node-space data moments (OLS)
  double ubar_sq = 0.0;                 // quadrature of ubar^2 over omega0 (OLS)
  Eigen::SparseMatrix<double> k_bulk;   // node-space stiffness, volume terms only (heat)
};

ObjectiveContext build_objective_context(const Mesh& mesh, const InterfaceTopology& topo,
                                         const BasisCache& cache, const ObjectiveSpec& spec);

double eval_objective(const ObjectiveSpec& spec, const ObjectiveContext& ctx,
                      const std::vector<AssembledSystem>& systems, const ForwardStates& states);

// One reduced-space gradient of the objective per forward problem.
std::vector<Eigen::VectorXd> objective_du(const ObjectiveSpec& spec, const ObjectiveContext& ctx,
                                          const std::vector<AssembledSystem>& systems,
                                          const ForwardStates& states);

// The three design-explicit integrals over the velocity-field support.
double explicit_terms_j(const ObjectiveSpec& spec, const ObjectiveContext& ctx,
                        const InterfaceTopology& topo, const BasisCache& cache,
                        const ForwardStates& states, const PerDesignDerivatives& pd);

// Area inequality of the heat-design problem: value |inside| - theta |domain|
// and its gradient over the global design layout.
std::pair<double, Eigen::VectorXd> area_constraint(const ObjectiveSpec& spec,
                                                   const std::vector<SplineCurve>& curves,
                                                   const DesignLayout& layout);

}  // namespace ifex
