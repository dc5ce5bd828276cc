#include <CLI11.hpp>
#include <iostream>

#include "ifex/driver.hpp"

namespace {

void add_common(CLI::App* sub, std::string& config_path, ifex::RunConfig& cfg) {
  sub->add_option("--config", config_path, "JSON config file");
  sub->add_option("--case", cfg.case_name, "named case preset");
  sub->add_option("--mesh", cfg.mesh_n, "mesh subdivisions per side");
  sub->add_option("--out", cfg.out_dir, "output directory");
  sub->add_option("--threads", cfg.threads, "sensitivity worker threads");
  sub->add_option("--max-iters", cfg.max_iters, "iteration limit");
  sub->add_option("--tol-g", cfg.tol_g, "gradient stopping tolerance");
  sub->add_option("--control-points", cfg.control_points, "spline control points per curve");
  sub->add_option("--refinements", cfg.max_refinements, "uniform refinements allowed on stall");
}

int dispatch(const std::string& command, const std::string& config_path, ifex::RunConfig cli_cfg,
             const CLI::App& sub) {
  ifex::RunConfig cfg;
  if (!config_path.empty()) cfg = ifex::load_config_file(config_path);
  // explicit CLI flags win over the file
  auto take = [&](const char* flag, auto member) {
    if (sub.count(flag)) cfg.*member = cli_cfg.*member;
  };
  take("--case", &ifex::RunConfig::case_name);
  take("--mesh", &ifex::RunConfig::mesh_n);
  take("--out", &ifex::RunConfig::out_dir);
  take("--threads", &ifex::RunConfig::threads);
  take("--max-iters", &ifex::RunConfig::max_iters);
  take("--tol-g", &ifex::RunConfig::tol_g);
  take("--control-points", &ifex::RunConfig::control_points);
  take("--refinements", &ifex::RunConfig::max_refinements);
  cfg.command = command;

  if (command == "forward-study") return ifex::cmd_forward_study(cfg);
  if (command == "grad-check") return ifex::cmd_grad_check(cfg);
  return ifex::cmd_invert(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Immersed finite element interface solver and shape optimizer"};
  app.require_subcommand(1);

  std::string cfg_path_fs, cfg_path_gc, cfg_path_inv;
  ifex::RunConfig cfg_fs, cfg_gc, cfg_inv;
  CLI::App* fs = app.add_subcommand("forward-study", "convergence table on a fixed true curve");
  add_common(fs, cfg_path_fs, cfg_fs);
  CLI::App* gc = app.add_subcommand("grad-check", "analytic vs finite-difference gradient");
  add_common(gc, cfg_path_gc, cfg_gc);
  gc->add_option("--fd-step", cfg_gc.fd_step, "central difference step");
  CLI::App* inv = app.add_subcommand("invert", "run the shape optimization");
  add_common(inv, cfg_path_inv, cfg_inv);

  CLI11_PARSE(app, argc, argv);
  try {
    if (fs->parsed()) return dispatch("forward-study", cfg_path_fs, cfg_fs, *fs);
    if (gc->parsed()) return dispatch("grad-check", cfg_path_gc, cfg_gc, *gc);
    return dispatch("invert", cfg_path_inv, cfg_inv, *inv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
