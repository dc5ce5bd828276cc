#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "ifex/objectives.hpp"
#include "ifex/solver.hpp"

namespace ifex {

// Everything produced by one objective/gradient evaluation at a design point.
struct Evaluation {
  double j = 0.0;
  Eigen::VectorXd gradient;  // empty when not requested
  std::vector<SplineCurve> curves;
  InterfaceTopology topo;
  std::vector<AssembledSystem> systems;
  ForwardStates states;
};

// Binds one objective (with its forward problems) to one mesh and manages
// classification, assembly, solves, adjoints and the design gradient.
class Pipeline {
 public:
  Pipeline(Mesh mesh, ObjectiveSpec objective, std::vector<SplineCurve> initial_curves,
           int threads = 1);

  const Mesh& mesh() const { return mesh_; }
  const ObjectiveSpec& objective() const { return objective_; }
  const DesignLayout& layout() const { return layout_; }
  std::vector<double> initial_alpha() const;
  std::vector<SplineCurve> curves_at(const std::vector<double>& alpha) const;
  // largest control-point displacement between two designs
  double motion(const std::vector<double>& a, const std::vector<double>& b) const;
  // hash of the interface-element set (element ids and owning curves)
  std::uint64_t topology_signature(const std::vector<double>& alpha) const;

  Evaluation evaluate(const std::vector<double>& alpha, bool with_gradient) const;

 private:
  Mesh mesh_;
  ObjectiveSpec objective_;
  std::vector<SplineCurve> initial_;
  DesignLayout layout_;
  int threads_ = 1;
};

// Forward solve of a single problem at fixed geometry. The topology is held
// behind a stable pointer so the basis cache stays valid across moves.
struct ForwardSolve {
  std::shared_ptr<InterfaceTopology> topo;
  BasisCache cache;
  AssembledSystem sys;
  Eigen::VectorXd reduced;
  Eigen::VectorXd nodal;
};

ForwardSolve solve_forward(const Mesh& mesh, const std::vector<SplineCurve>& curves,
                           const ForwardProblemSpec& spec);

// L2 and H1-seminorm errors of a nodal IFE field against an exact solution.
std::pair<double, double> error_norms(const Mesh& mesh, const BasisCache& cache,
                                      const Eigen::VectorXd& nodal,
                                      const std::function<double(const Vec2&)>& exact,
                                      const std::function<Vec2(const Vec2&)>& exact_grad);

// Symmetric Hausdorff distance between two sampled curves.
double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

}  // namespace ifex
