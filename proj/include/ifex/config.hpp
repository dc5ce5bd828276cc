#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ifex/cases.hpp"

namespace ifex {

struct RunConfig {
  std::string command = "invert";  // forward-study | grad-check | invert
  std::string case_name = "table1-case3";
  std::optional<InlineCaseParams> inline_case;
  int mesh_n = 40;
  int control_points = 10;
  int threads = 1;
  int max_iters = 150;
  double tol_g = 1e-6;
  double tol_j_rel = 1e-10;
  int max_refinements = 0;
  std::string out_dir = "out";
  std::vector<int> forward_ns = {20, 40, 80};
  double fd_step = 1e-5;
  double grad_check_tol = 1e-3;
  bool omega0_whole = false;  // force observation on the whole domain
};

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);
RunConfig load_config_file(const std::string& path);

CaseDefinition build_case(const RunConfig& cfg);

}  // namespace ifex
