#include "ifex/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

namespace ifex {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json inline_to_json(const InlineCaseParams& p) {
  ordered_json j;
  j["family"] = p.family;
  j["beta_minus"] = p.beta_minus;
  j["beta_plus"] = p.beta_plus;
  j["target_center"] = {p.target_center.x(), p.target_center.y()};
  j["target_rx"] = p.target_rx;
  j["target_ry"] = p.target_ry;
  j["initial_center"] = {p.initial_center.x(), p.initial_center.y()};
  j["initial_radius"] = p.initial_radius;
  j["theta"] = p.theta;
  return j;
}

InlineCaseParams inline_from_json(const ordered_json& j) {
  InlineCaseParams p;
  p.family = j.at("family").get<std::string>();
  p.beta_minus = j.value("beta_minus", p.beta_minus);
  p.beta_plus = j.value("beta_plus", p.beta_plus);
  if (j.contains("target_center"))
    p.target_center = Vec2(j["target_center"][0].get<double>(),
                           j["target_center"][1].get<double>());
  p.target_rx = j.value("target_rx", p.target_rx);
  p.target_ry = j.value("target_ry", p.target_ry);
  if (j.contains("initial_center"))
    p.initial_center = Vec2(j["initial_center"][0].get<double>(),
                            j["initial_center"][1].get<double>());
  p.initial_radius = j.value("initial_radius", p.initial_radius);
  p.theta = j.value("theta", p.theta);
  return p;
}

}  // namespace

std::string config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  j["case"] = cfg.case_name;
  if (cfg.inline_case) j["inline"] = inline_to_json(*cfg.inline_case);
  j["mesh_n"] = cfg.mesh_n;
  j["control_points"] = cfg.control_points;
  j["threads"] = cfg.threads;
  j["max_iters"] = cfg.max_iters;
  j["tol_g"] = cfg.tol_g;
  j["tol_j_rel"] = cfg.tol_j_rel;
  j["max_refinements"] = cfg.max_refinements;
  j["out_dir"] = cfg.out_dir;
  j["forward_ns"] = cfg.forward_ns;
  j["fd_step"] = cfg.fd_step;
  j["grad_check_tol"] = cfg.grad_check_tol;
  j["omega0_whole"] = cfg.omega0_whole;
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  const ordered_json j = ordered_json::parse(text);
  RunConfig cfg;
  cfg.command = j.value("command", cfg.command);
  cfg.case_name = j.value("case", cfg.case_name);
  if (j.contains("inline")) cfg.inline_case = inline_from_json(j["inline"]);
  cfg.mesh_n = j.value("mesh_n", cfg.mesh_n);
  cfg.control_points = j.value("control_points", cfg.control_points);
  cfg.threads = j.value("threads", cfg.threads);
  cfg.max_iters = j.value("max_iters", cfg.max_iters);
  cfg.tol_g = j.value("tol_g", cfg.tol_g);
  cfg.tol_j_rel = j.value("tol_j_rel", cfg.tol_j_rel);
  cfg.max_refinements = j.value("max_refinements", cfg.max_refinements);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  if (j.contains("forward_ns")) cfg.forward_ns = j["forward_ns"].get<std::vector<int>>();
  cfg.fd_step = j.value("fd_step", cfg.fd_step);
  cfg.grad_check_tol = j.value("grad_check_tol", cfg.grad_check_tol);
  cfg.omega0_whole = j.value("omega0_whole", cfg.omega0_whole);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

CaseDefinition build_case(const RunConfig& cfg) {
  CaseDefinition cd = cfg.inline_case ? make_inline_case(*cfg.inline_case, cfg.control_points)
                                      : make_case(cfg.case_name, cfg.control_points);
  if (cfg.omega0_whole && cd.objective.kind == ObjectiveSpec::Kind::OutputLeastSquares)
    cd.objective.omega0 = Rect{};
  return cd;
}

}  // namespace ifex
