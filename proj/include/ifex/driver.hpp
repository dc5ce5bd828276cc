#pragma once

#include "ifex/config.hpp"
#include "ifex/optimize.hpp"
#include "ifex/pipeline.hpp"

namespace ifex {

struct ForwardStudyRow {
  int n = 0;
  double l2 = 0.0, h1 = 0.0;
  double rate_l2 = 0.0, rate_h1 = 0.0;  // zero on the first row
};

std::vector<ForwardStudyRow> forward_study(const CaseDefinition& cd, const std::vector<int>& ns,
                                           int true_curve_points = 64);

struct GradCheckRow {
  int j = 0;
  double analytic = 0.0;
  double fd = 0.0;
  double rel_err = 0.0;
  double step = 0.0;
  bool stable = true;
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;
  double max_rel_err = 0.0;
  bool all_stable = true;
};

GradCheckReport grad_check(const CaseDefinition& cd, int mesh_n, double fd_step, int threads);

struct InvertOutcome {
  OptResult result;
  std::vector<SplineCurve> final_curves;
};

InvertOutcome run_invert(const CaseDefinition& cd, const RunConfig& cfg,
                         bool write_artifacts = true);

// CLI entry points; return process exit codes.
int cmd_forward_study(const RunConfig& cfg);
int cmd_grad_check(const RunConfig& cfg);
int cmd_invert(const RunConfig& cfg);

}  // namespace ifex
