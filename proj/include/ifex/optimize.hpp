#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ifex/types.hpp"

namespace ifex {

struct OptimizeOptions {
  int max_iters = 150;
  double tol_g = 1e-6;        // infinity norm of the gradient
  double tol_j_rel = 1e-10;   // relative decrease over tol_j_window iterations
  int tol_j_window = 5;
  int max_halvings = 30;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_refinements = 0;
  double stall_motion_factor = 0.05;  // in units of h
  int stall_reject_limit = 5;
  // the first line-search trial keeps the largest design displacement below
  // initial_step_factor * h, and no trial exceeds max_step_factor * h;
  // unlimited when h is unset
  double h = 0.0;
  double initial_step_factor = 0.5;
  double max_step_factor = 1.0;
};

// Value/gradient callbacks at one mesh level; evaluations may throw
// GeometryError, which the line search treats as a rejected trial point.
struct ObjectiveCallbacks {
  std::function<double(const std::vector<double>&)> value;
  std::function<std::pair<double, Eigen::VectorXd>(const std::vector<double>&)>
      value_and_gradient;
  // optional single inequality c(alpha) <= 0 handled by SQP steps
  std::function<std::pair<double, Eigen::VectorXd>(const std::vector<double>&)> constraint;
  // displacement metric between designs, for the stall test
  std::function<double(const std::vector<double>&, const std::vector<double>&)> motion;
  // signature of the interface-element set at a design; quasi-Newton pairs
  // whose endpoints disagree carry kink jumps, not curvature, and are skipped
  std::function<std::uint64_t(const std::vector<double>&)> topology_signature;
};

struct OptState {
  std::vector<double> alpha;
  double j = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd h_inv;  // BFGS inverse Hessian approximation
  double constraint_value = 0.0;
  Eigen::VectorXd constraint_grad;
  double nu = 1.0;  // l1 merit penalty weight
  double last_step = 0.0;
  int halvings_used = 0;
};

struct LineSearchFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

OptState make_initial_state(const ObjectiveCallbacks& cb, const std::vector<double>& alpha);

// One accepted quasi-Newton step under the Wolfe conditions.
OptState bfgs_step(const OptState& state, const ObjectiveCallbacks& cb,
                   const OptimizeOptions& opt);

// One SQP iteration on the single linearized inequality with an l1 merit
// line search.
OptState constrained_step(const OptState& state, const ObjectiveCallbacks& cb,
                          const OptimizeOptions& opt);

struct IterationRecord {
  int iter = 0;
  double j = 0.0;
  double grad_norm = 0.0;  // infinity norm
  double step = 0.0;
  int mesh_n = 0;
  bool accepted = true;
  double constraint = 0.0;
  double merit = 0.0;
  std::vector<double> alpha;
};

struct OptResult {
  std::vector<double> alpha;
  double j = 0.0;
  bool converged = false;
  std::string stop_reason;
  int final_mesh_n = 0;
  std::vector<IterationRecord> history;
};

struct OptimizationLevel {
  ObjectiveCallbacks callbacks;
  int mesh_n = 0;
  double h = 0.0;
};

// Full loop with stall-triggered uniform refinement; make_level(i) builds the
// callbacks on refinement level i (mesh N doubling with i).
OptResult run_optimization(const std::function<OptimizationLevel(int)>& make_level,
                           const std::vector<double>& alpha0, const OptimizeOptions& opt);

}  // namespace ifex
