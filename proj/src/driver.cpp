#include "ifex/driver.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "ifex/output.hpp"
#include "ifex/sensitivity.hpp"

namespace ifex {

std::vector<ForwardStudyRow> forward_study(const CaseDefinition& cd, const std::vector<int>& ns,
                                           int true_curve_points) {
  if (!cd.has_exact_solution)
    throw ContractError("forward_study: case '" + cd.name + "' has no exact solution");
  const auto curves = cd.true_curves(true_curve_points);
  std::vector<ForwardStudyRow> rows;
  for (int n : ns) {
    const Mesh mesh = build_cartesian_mesh(n);
    const ForwardSolve fs = solve_forward(mesh, curves, cd.objective.problems[0]);
    auto [l2, h1] = error_norms(mesh, fs.cache, fs.nodal, cd.exact_u, cd.exact_grad_u);
    ForwardStudyRow row;
    row.n = n;
    row.l2 = l2;
    row.h1 = h1;
    if (!rows.empty()) {
      const double ratio = std::log2(static_cast<double>(n) / rows.back().n);
      row.rate_l2 = std::log2(rows.back().l2 / l2) / ratio;
      row.rate_h1 = std::log2(rows.back().h1 / h1) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

GradCheckReport grad_check(const CaseDefinition& cd, int mesh_n, double fd_step, int threads) {
  const Mesh mesh = build_cartesian_mesh(mesh_n);
  const Pipeline pipe(mesh, cd.objective, cd.initial_curves, threads);
  const std::vector<double> alpha0 = pipe.initial_alpha();
  const Evaluation base = pipe.evaluate(alpha0, true);

  GradCheckReport report;
  for (int j = 0; j < static_cast<int>(alpha0.size()); ++j) {
    GradCheckRow row;
    row.j = j;
    row.analytic = base.gradient(j);
    double delta = fd_step;
    bool stable = false;
    double fd = 0.0;
    for (int attempt = 0; attempt < 4 && !stable; ++attempt, delta *= 0.1) {
      std::vector<double> ap = alpha0, am = alpha0;
      ap[j] += delta;
      am[j] -= delta;
      try {
        const Evaluation ep = pipe.evaluate(ap, false);
        const Evaluation em = pipe.evaluate(am, false);
        if (!same_interface_sets(base.topo, ep.topo) || !same_interface_sets(base.topo, em.topo))
          continue;  // topology changed under the step: shrink and retry
        fd = (ep.j - em.j) / (2 * delta);
        row.step = delta;
        stable = true;
      } catch (const GeometryError&) {
        continue;
      }
    }
    row.stable = stable;
    row.fd = fd;
    row.rel_err = stable ? std::abs(row.analytic - fd) / std::max(1.0, std::abs(fd)) : 1.0;
    report.all_stable = report.all_stable && stable;
    report.max_rel_err = std::max(report.max_rel_err, row.rel_err);
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::string history_csv(const OptResult& result) {
  std::ostringstream os;
  os << "iter,J,grad_norm,step,mesh_N\n";
  for (const auto& rec : result.history) {
    os << rec.iter << ',' << format_double(rec.j) << ',' << format_double(rec.grad_norm) << ','
       << format_double(rec.step) << ',' << rec.mesh_n << '\n';
  }
  return os.str();
}

std::string merit_csv(const OptResult& result) {
  std::ostringstream os;
  os << "iter,J,constraint,merit,accepted\n";
  for (const auto& rec : result.history) {
    os << rec.iter << ',' << format_double(rec.j) << ',' << format_double(rec.constraint) << ','
       << format_double(rec.merit) << ',' << (rec.accepted ? 1 : 0) << '\n';
  }
  return os.str();
}

}  // namespace

InvertOutcome run_invert(const CaseDefinition& cd, const RunConfig& cfg, bool write_artifacts) {
  const bool heat = cd.objective.kind == ObjectiveSpec::Kind::HeatDissipation;

  // pipelines per refinement level, built lazily and kept alive
  auto pipelines = std::make_shared<std::vector<std::shared_ptr<Pipeline>>>();
  auto make_level = [&, pipelines](int level) {
    const int n = cfg.mesh_n << level;
    while (static_cast<int>(pipelines->size()) <= level) {
      const int ln = cfg.mesh_n << pipelines->size();
      pipelines->push_back(std::make_shared<Pipeline>(build_cartesian_mesh(ln), cd.objective,
                                                      cd.initial_curves, cfg.threads));
    }
    auto pipe = (*pipelines)[level];
    OptimizationLevel lv;
    lv.mesh_n = n;
    lv.h = 2.0 / n;
    lv.callbacks.value = [pipe](const std::vector<double>& a) {
      return pipe->evaluate(a, false).j;
    };
    lv.callbacks.value_and_gradient =
        [pipe](const std::vector<double>& a) -> std::pair<double, Eigen::VectorXd> {
      Evaluation ev = pipe->evaluate(a, true);
      return {ev.j, std::move(ev.gradient)};
    };
    if (heat) {
      lv.callbacks.constraint =
          [pipe](const std::vector<double>& a) -> std::pair<double, Eigen::VectorXd> {
        auto curves = pipe->curves_at(a);
        return area_constraint(pipe->objective(), curves, DesignLayout::of(curves));
      };
    }
    lv.callbacks.motion = [pipe](const std::vector<double>& a, const std::vector<double>& b) {
      return pipe->motion(a, b);
    };
    lv.callbacks.topology_signature = [pipe](const std::vector<double>& a) {
      return pipe->topology_signature(a);
    };
    return lv;
  };

  OptimizeOptions opt;
  opt.max_iters = cfg.max_iters;
  opt.tol_g = cfg.tol_g;
  opt.tol_j_rel = cfg.tol_j_rel;
  opt.max_refinements = cfg.max_refinements;

  const Pipeline pipe0(build_cartesian_mesh(cfg.mesh_n), cd.objective, cd.initial_curves,
                       cfg.threads);
  InvertOutcome outcome;
  outcome.result = run_optimization(make_level, pipe0.initial_alpha(), opt);
  outcome.final_curves = pipe0.curves_at(outcome.result.alpha);

  if (write_artifacts) {
    const std::filesystem::path out(cfg.out_dir);
    write_text_file(out / "objective_history.csv", history_csv(outcome.result));
    if (heat) write_text_file(out / "merit_history.csv", merit_csv(outcome.result));
    char name[64];
    for (const auto& rec : outcome.result.history) {
      std::snprintf(name, sizeof(name), "iter_%04d.csv", rec.iter);
      write_text_file(out / "curves" / name, curves_csv(pipe0.curves_at(rec.alpha)));
    }
    write_text_file(out / "final_curve.csv", curves_csv(outcome.final_curves));

    std::vector<SvgCurve> svg;
    for (size_t c = 0; c < cd.target.size(); ++c) {
      SvgCurve t;
      t.points = cd.target_polyline(static_cast<int>(c), 512);
      t.color = "#c03030";
      t.dashed = true;
      svg.push_back(std::move(t));
    }
    const int snapshots = 6;
    const int steps = static_cast<int>(outcome.result.history.size());
    for (int s = 0; s <= snapshots; ++s) {
      const int idx = std::min(steps - 1, s * (steps - 1) / snapshots);
      const auto curves = pipe0.curves_at(outcome.result.history[idx].alpha);
      for (const auto& c : curves) {
        SvgCurve sc;
        const int m = 256;
        for (int k = 0; k <= m; ++k)
          sc.points.push_back(c.eval(c.closed() && k == m ? 0.0 : static_cast<double>(k) / m));
        sc.color = s == snapshots ? "#1f6fb4" : "#9db8d2";
        sc.width = s == snapshots ? 0.012 : 0.006;
        svg.push_back(std::move(sc));
      }
    }
    write_text_file(out / "curves.svg", curves_svg(svg));

    RunConfig resolved = cfg;
    std::ostringstream manifest;
    manifest << "{\n\"version\": \"ifex 1.0.0\",\n\"config\": " << config_to_json(resolved)
             << ",\n\"stop_reason\": \"" << outcome.result.stop_reason << "\",\n\"final_J\": "
             << format_double(outcome.result.j) << "\n}\n";
    write_text_file(out / "manifest.json", manifest.str());
  }
  return outcome;
}

int cmd_forward_study(const RunConfig& cfg) {
  const CaseDefinition cd = build_case(cfg);
  const auto rows = forward_study(cd, cfg.forward_ns);
  std::ostringstream os;
  os << "N,L2,H1,rateL2,rateH1\n";
  for (const auto& r : rows)
    os << r.n << ',' << format_double(r.l2) << ',' << format_double(r.h1) << ','
       << format_double(r.rate_l2) << ',' << format_double(r.rate_h1) << '\n';
  write_text_file(std::filesystem::path(cfg.out_dir) / "convergence.csv", os.str());
  std::cout << os.str();
  return 0;
}

int cmd_grad_check(const RunConfig& cfg) {
  const CaseDefinition cd = build_case(cfg);
  const GradCheckReport report = grad_check(cd, cfg.mesh_n, cfg.fd_step, cfg.threads);
  std::ostringstream os;
  os << "j,analytic,fd,rel_err,step,stable\n";
  for (const auto& r : report.rows)
    os << r.j << ',' << format_double(r.analytic) << ',' << format_double(r.fd) << ','
       << format_double(r.rel_err) << ',' << format_double(r.step) << ',' << (r.stable ? 1 : 0)
       << '\n';
  write_text_file(std::filesystem::path(cfg.out_dir) / "grad_check.csv", os.str());
  std::cout << os.str();
  std::cout << "max_rel_err," << format_double(report.max_rel_err) << '\n';
  return report.max_rel_err <= cfg.grad_check_tol && report.all_stable ? 0 : 1;
}

int cmd_invert(const RunConfig& cfg) {
  const CaseDefinition cd = build_case(cfg);
  try {
    const InvertOutcome outcome = run_invert(cd, cfg);
    std::cout << "final J = " << format_double(outcome.result.j) << " ("
              << outcome.result.stop_reason << ")\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "invert failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ifex
