#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ifex/objectives.hpp"

namespace ifex {

// A named inverse/design problem instance: objective with forward problems,
// initial design curves, and (when known) the target geometry and exact
// forward solution for studies.
struct CaseDefinition {
  std::string name;
  ObjectiveSpec objective;
  std::vector<SplineCurve> initial_curves;
  // parametric target interface per curve, t in [0,1]
  std::vector<std::function<Vec2(double)>> target;
  bool has_exact_solution = false;
  std::function<double(const Vec2&)> exact_u;
  std::function<Vec2(const Vec2&)> exact_grad_u;

  // interpolate the target with splines (used for fixed-true-curve studies)
  std::vector<SplineCurve> true_curves(int points_per_curve) const;
  std::vector<Vec2> target_polyline(int curve, int samples) const;
};

std::vector<std::string> case_names();
CaseDefinition make_case(const std::string& name, int control_points);

// Parameterized inline case families, mirroring the preset structure.
struct InlineCaseParams {
  std::string family;  // "ols-circle" | "kv-circle" | "heat-circle"
  double beta_minus = 1.0, beta_plus = 10.0;
  Vec2 target_center = Vec2::Zero();
  double target_rx = 0.5, target_ry = 0.5;
  Vec2 initial_center = Vec2::Zero();
  double initial_radius = 0.4;
  double theta = 0.5;  // heat volume bound
};
CaseDefinition make_inline_case(const InlineCaseParams& params, int control_points);

}  // namespace ifex
