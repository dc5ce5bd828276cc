// Acceptance suite: one pass/fail line per criterion, deterministic output,
// and a byte-reproducibility check that reruns every criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ifex/cases.hpp"
#include "ifex/driver.hpp"
#include "ifex/output.hpp"
#include "ifex/pipeline.hpp"
#include "ifex/quadrature.hpp"
#include "ifex/sensitivity.hpp"
#include "ifex/solver.hpp"

using namespace ifex;

namespace {

struct CriterionResult {
  bool pass = false;
  std::string detail;  // deterministic; hashed for the reproducibility check
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- criterion 1
CriterionResult forward_convergence() {
  const CaseDefinition cd = make_case("table2-case1", 20);
  const auto rows = forward_study(cd, {20, 40, 80});
  std::ostringstream os;
  bool ok = true;
  for (size_t i = 0; i < rows.size(); ++i) {
    os << "N=" << rows[i].n << " L2=" << fmt(rows[i].l2) << " H1=" << fmt(rows[i].h1);
    if (i > 0) {
      os << " rateL2=" << fmt(rows[i].rate_l2) << " rateH1=" << fmt(rows[i].rate_h1);
      ok = ok && rows[i].rate_l2 >= 1.8 && rows[i].rate_h1 >= 0.9;
    }
    os << "; ";
  }
  return {ok, os.str()};
}

// ---------------------------------------------------------------- criterion 2
CriterionResult objective_accuracy() {
  const CaseDefinition cd = make_case("table1-case3", 20);
  const auto curves = cd.true_curves(64);
  const Rect win = cd.objective.omega0;

  // continuous objective by high-order quadrature on a fine fixed grid
  double j_exact = 0.0;
  {
    const int n = 256;
    const double h = 2.0 / n;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec2 a(-1 + i * h, -1 + j * h), b(-1 + (i + 1) * h, -1 + j * h),
            c(-1 + (i + 1) * h, -1 + (j + 1) * h), d(-1 + i * h, -1 + (j + 1) * h);
        if (!win.contains(a) || !win.contains(c)) continue;
        auto f = [&](const Vec2& x) {
          const double m = cd.exact_u(x) - cd.objective.ubar(x);
          return m * m;
        };
        j_exact += quad::tri_integrate(a, b, c, f) + quad::tri_integrate(a, c, d, f);
      }
  }

  std::ostringstream os;
  os << "Jexact=" << fmt(j_exact) << "; ";
  std::vector<double> errs;
  for (int n : {20, 40, 80}) {
    const Pipeline pipe(build_cartesian_mesh(n), cd.objective, curves, 1);
    const double jh = pipe.evaluate(pipe.initial_alpha(), false).j;
    errs.push_back(std::abs(jh - j_exact));
    os << "N=" << n << " |Jh-Jexact|=" << fmt(errs.back()) << "; ";
  }
  bool ok = true;
  for (size_t i = 1; i < errs.size(); ++i) {
    const double rate = std::log2(errs[i - 1] / errs[i]);
    os << "rate=" << fmt(rate) << "; ";
    ok = ok && rate >= 1.8;
  }
  return {ok, os.str()};
}

// ---------------------------------------------------------------- criterion 3
CriterionResult gradient_exactness() {
  std::ostringstream os;
  bool ok = true;
  for (const char* name : {"gradcheck-ols", "gradcheck-kv", "gradcheck-heat"}) {
    const CaseDefinition cd = make_case(name, 8);
    const GradCheckReport rep = grad_check(cd, 20, 1e-5, 2);
    os << name << " max_rel_err=" << fmt(rep.max_rel_err)
       << " stable=" << (rep.all_stable ? 1 : 0) << "; ";
    ok = ok && rep.all_stable && rep.max_rel_err <= 1e-4;
  }
  return {ok, os.str()};
}

// ---------------------------------------------------------------- criterion 4
CriterionResult adjoint_direct_equivalence() {
  std::ostringstream os;
  bool ok = true;

  auto check_case = [&](const CaseDefinition& cd, const char* label) {
    const Mesh mesh = build_cartesian_mesh(10);
    const Pipeline pipe(mesh, cd.objective, cd.initial_curves, 1);
    const auto alpha = pipe.initial_alpha();
    const Evaluation ev = pipe.evaluate(alpha, true);

    const InterfaceTopology topo = classify(mesh, ev.curves);
    const BasisCache cache = build_basis(mesh, topo, cd.objective.problems[0].material);
    const ObjectiveContext ctx = build_objective_context(mesh, topo, cache, cd.objective);
    std::vector<AssembledSystem> systems = ev.systems;
    for (auto& s : systems) s.stamp = topo.stamp;
    ForwardStates states = ev.states;
    states.stamp = topo.stamp;
    const auto dj = objective_du(cd.objective, ctx, systems, states);
    const DesignLayout layout = pipe.layout();
    const int kk = cd.objective.forward_count();
    std::vector<FactoredOperator> ops(kk);
    for (int k = 0; k < kk; ++k) {
      ops[k] = FactoredOperator(cd.objective.problems[k].kind == BCKind::PureNeumann
                                    ? FactoredOperator::Kind::SymmetricIndefinite
                                    : FactoredOperator::Kind::SPD);
      ops[k].factor(systems[k].A);
    }
    double worst = 0.0;
    for (int j = 0; j < layout.total(); ++j) {
      const PerDesignDerivatives pd =
          element_derivatives(ev.curves, layout, mesh, topo, cache, j);
      double direct = explicit_terms_j(cd.objective, ctx, topo, cache, states, pd);
      for (int k = 0; k < kk; ++k) {
        const GlobalDerivatives gd =
            assemble_dA_dF(mesh, topo, cache, cd.objective.problems[k], pd);
        const Eigen::VectorXd rhs = direct_rhs(systems[k], gd, states.reduced[k]);
        direct += dj[k].dot(ops[k].solve(rhs));
      }
      worst = std::max(worst, std::abs(direct - ev.gradient(j)) /
                                  std::max(1.0, std::abs(direct)));
    }
    os << label << " max_diff=" << fmt(worst) << "; ";
    ok = ok && worst <= 1e-10;
  };

  CaseDefinition ols = make_case("gradcheck-ols", 6);
  ols.objective.omega0 = Rect{};
  ols.initial_curves = {SplineCurve(sample_circle({0.035, -0.023}, 0.55, 6), true)};
  check_case(ols, "ols");

  InlineCaseParams kv;
  kv.family = "kv-circle";
  kv.beta_minus = 1.0;
  kv.beta_plus = 6.0;
  kv.target_center = Vec2(0.1, -0.05);
  kv.target_rx = 0.5;
  kv.target_ry = 0.35;
  kv.initial_center = Vec2(0.035, -0.023);
  kv.initial_radius = 0.45;
  check_case(make_inline_case(kv, 6), "kv-neumann");
  return {ok, os.str()};
}

// ---------------------------------------------------------------- criterion 5
InterfaceElementGeom random_cut_geom(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.15, 0.85);
  std::uniform_real_distribution<double> pos(-0.8, 0.8);
  std::uniform_real_distribution<double> ang(0.0, 2 * M_PI);
  for (;;) {
    const Vec2 a1(pos(rng), pos(rng));
    const double t1 = ang(rng);
    const Vec2 a2 = a1 + 0.3 * Vec2(std::cos(t1), std::sin(t1));
    const double t2 = t1 + 0.5 + 2.0 * u(rng);
    const Vec2 a3 = a1 + 0.3 * Vec2(std::cos(t2), std::sin(t2));
    if (std::abs(cross2(a2 - a1, a3 - a1)) < 0.01) continue;
    const Vec2 p = a1 + u(rng) * (a2 - a1);
    const Vec2 q = a1 + u(rng) * (a3 - a1);
    try {
      return build_geom({a1, a2, a3}, p, q, u(rng) > 0.5);
    } catch (const GeometryError&) {
      continue;
    }
  }
}

CriterionResult ife_local_properties() {
  std::mt19937 rng(420241108);
  std::uniform_real_distribution<double> beta_dist(0.05, 20.0);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  double worst_delta = 0, worst_pou = 0, worst_cont = 0, worst_flux = 0, worst_exact = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const InterfaceElementGeom g = random_cut_geom(rng);
    const double bm = beta_dist(rng), bp = beta_dist(rng);
    const ElementBasis basis = interface_basis(g, bm, bp);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j)
        worst_delta = std::max(
            worst_delta, std::abs(basis.shape[i].value(g, g.A[j]) - (i == j ? 1.0 : 0.0)));
      // flux jump, relative to the flux magnitude
      const double fm = bm * basis.shape[i].minus.g.dot(g.nbar);
      const double fp = bp * basis.shape[i].plus.g.dot(g.nbar);
      worst_flux = std::max(worst_flux,
                            std::abs(fm - fp) / std::max(1.0, std::abs(fm) + std::abs(fp)));
      for (double t : {0.15, 0.5, 0.85}) {
        const Vec2 x = g.P + t * (g.Q - g.P);
        worst_cont = std::max(worst_cont,
                              std::abs(basis.shape[i].minus(x) - basis.shape[i].plus(x)));
      }
    }
    for (int m = 0; m < 3; ++m) {
      const Vec2 c = (g.subtri[m][0] + g.subtri[m][1] + g.subtri[m][2]) / 3.0;
      double sum = 0.0;
      for (int i = 0; i < 3; ++i) sum += basis.shape[i].value(g, c);
      worst_pou = std::max(worst_pou, std::abs(sum - 1.0));
    }
    // exact reproduction of a jump-compatible piecewise-affine function
    Affine2 wm{val(rng), Vec2(val(rng), val(rng))};
    const double kappa = (bm / bp - 1.0) * wm.g.dot(g.nbar);
    Affine2 wp;
    wp.g = wm.g + kappa * g.nbar;
    wp.a = wm.a + (wm.g - wp.g).dot(g.P);
    auto w_at = [&](const Vec2& x) { return g.minus_at(x) ? wm(x) : wp(x); };
    std::array<double, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = w_at(g.A[i]);
    const IfeShape s = build_ife_shape(g, bm, bp, v);
    for (int m = 0; m < 3; ++m) {
      const Vec2 c = (g.subtri[m][0] + g.subtri[m][1] + g.subtri[m][2]) / 3.0;
      worst_exact =
          std::max(worst_exact, std::abs(s.value(g, c) - w_at(c)) /
                                    std::max(1.0, std::abs(w_at(c))));
    }
  }
  std::ostringstream os;
  os << "delta=" << fmt(worst_delta) << " pou=" << fmt(worst_pou)
     << " continuity=" << fmt(worst_cont) << " flux=" << fmt(worst_flux)
     << " exactness=" << fmt(worst_exact);
  const bool ok = worst_delta < 1e-12 && worst_pou < 1e-12 && worst_cont < 1e-12 &&
                  worst_flux < 1e-12 && worst_exact < 1e-12;
  return {ok, os.str()};
}

// ---------------------------------------------------------------- criterion 6
CriterionResult velocity_field_properties() {
  std::mt19937 rng(620241108);
  std::uniform_real_distribution<double> mag(-1.5, 1.5);
  double worst_vertex = 0, worst_edge = 0, worst_div = 0, worst_cont = 0, worst_tan = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const InterfaceElementGeom g = random_cut_geom(rng);
    IntersectionVelocity iv;
    iv.dP = mag(rng) * (g.A[1] - g.A[0]).normalized();
    iv.dQ = mag(rng) * (g.A[2] - g.A[0]).normalized();
    const VelocityField vf = velocity_field(g, iv);
    for (int m = 0; m < 3; ++m)
      worst_vertex = std::max(worst_vertex, vf.eval_piece(m, g.A[m]).norm());
    for (double s : {0.25, 0.6, 0.95}) {
      const Vec2 x1 = g.A[0] + s * (g.P - g.A[0]);
      worst_edge = std::max(worst_edge, (vf.eval_piece(0, x1) - s * iv.dP).norm());
      worst_tan = std::max(worst_tan,
                           std::abs(cross2(vf.eval_piece(0, x1), g.A[1] - g.A[0])));
      const Vec2 x4 = g.A[1] + s * (g.A[2] - g.A[1]);
      worst_edge = std::max(worst_edge, vf.eval_piece(2, x4).norm());
      const Vec2 xc = g.P + s * (g.Q - g.P);
      worst_cont = std::max(worst_cont, (vf.eval_piece(0, xc) - vf.eval_piece(1, xc)).norm());
      const Vec2 xq = g.A[1] + s * (g.Q - g.A[1]);
      worst_cont = std::max(worst_cont, (vf.eval_piece(1, xq) - vf.eval_piece(2, xq)).norm());
    }
    for (int m = 0; m < 3; ++m) {
      const Vec2 c = (g.subtri[m][0] + g.subtri[m][1] + g.subtri[m][2]) / 3.0;
      const double h = 1e-6;
      const double div_fd =
          (vf.eval_piece(m, c + Vec2(h, 0)).x() - vf.eval_piece(m, c - Vec2(h, 0)).x() +
           vf.eval_piece(m, c + Vec2(0, h)).y() - vf.eval_piece(m, c - Vec2(0, h)).y()) /
          (2 * h);
      worst_div = std::max(worst_div, std::abs(div_fd - vf.divergence[m]));
    }
  }
  // on a classified mesh: the field vanishes at the vertices of every cut
  // element and is identically zero elsewhere by construction
  const Mesh mesh = build_cartesian_mesh(16);
  const SplineCurve curve(sample_circle({0.013, 0.021}, 0.53, 10), true);
  const InterfaceTopology topo = classify(mesh, curve);
  const BasisCache cache = build_basis(mesh, topo, MaterialModel{5.0, {1.0}});
  const DesignLayout layout = DesignLayout::of({curve});
  for (int j : {0, 9, 17}) {
    const PerDesignDerivatives pd =
        element_derivatives({curve}, layout, mesh, topo, cache, j);
    for (size_t c = 0; c < topo.cuts.size(); ++c)
      for (int m = 0; m < 3; ++m)
        worst_vertex =
            std::max(worst_vertex, pd.vf[c].eval_piece(m, cache.geoms[c].A[m]).norm());
  }
  std::ostringstream os;
  os << "vertex=" << fmt(worst_vertex) << " edge_closed_form=" << fmt(worst_edge)
     << " tangential=" << fmt(worst_tan) << " continuity=" << fmt(worst_cont)
     << " divergence=" << fmt(worst_div);
  const bool ok = worst_vertex < 1e-12 && worst_edge < 1e-12 && worst_tan < 1e-12 &&
                  worst_cont < 1e-12 && worst_div < 1e-7;
  return {ok, os.str()};
}

// ---------------------------------------------------------------- criterion 7
CriterionResult inversion_regression() {
  CaseDefinition cd = make_case("table1-case3", 10);
  cd.objective.omega0 = Rect{};  // data available on the whole domain
  RunConfig cfg;
  cfg.mesh_n = 40;
  cfg.control_points = 10;
  cfg.max_iters = 150;
  cfg.tol_g = 1e-6;
  const InvertOutcome out = run_invert(cd, cfg, /*write_artifacts=*/false);

  bool monotone = true;
  double prev = 1e300;
  for (const auto& rec : out.result.history) {
    if (!rec.accepted) continue;
    if (rec.j > prev * (1 + 1e-12)) monotone = false;
    prev = rec.j;
  }
  std::vector<Vec2> final_pts;
  const SplineCurve& fc = out.final_curves[0];
  for (int k = 0; k < 2048; ++k) final_pts.push_back(fc.eval(k / 2048.0));
  const double dist = hausdorff_distance(final_pts, cd.target_polyline(0, 2048));
  const double bound = 2.0 * (2.0 / cfg.mesh_n);
  std::ostringstream os;
  os << "hausdorff=" << fmt(dist) << " bound=" << fmt(bound)
     << " monotone=" << (monotone ? 1 : 0) << " iters=" << out.result.history.size()
     << " finalJ=" << fmt(out.result.j);
  return {dist <= bound && monotone, os.str()};
}

// ---------------------------------------------------------------- criterion 8
CriterionResult heat_design_run() {
  const CaseDefinition cd = make_case("heat", 12);
  RunConfig cfg;
  cfg.mesh_n = 80;
  cfg.control_points = 12;
  cfg.max_iters = 60;
  cfg.tol_g = 1e-6;
  const InvertOutcome out = run_invert(cd, cfg, /*write_artifacts=*/false);
  const auto& hist = out.result.history;

  // first iterate satisfying the area bound
  size_t restored = hist.size();
  for (size_t i = 0; i < hist.size(); ++i) {
    if (hist[i].constraint <= 1e-3) {
      restored = i;
      break;
    }
  }
  const bool feasible_after = restored < hist.size();
  double worst_violation = 0.0;
  bool merit_monotone = true;
  double prev_merit = 1e300;
  for (size_t i = restored; i < hist.size(); ++i) {
    if (!hist[i].accepted) continue;
    worst_violation = std::max(worst_violation, hist[i].constraint);
    if (hist[i].merit > prev_merit * (1 + 1e-12)) merit_monotone = false;
    prev_merit = hist[i].merit;
  }
  const double j0 = hist.front().j, jn = out.result.j;
  std::ostringstream os;
  os << "restored_at=" << restored << " worst_violation=" << fmt(worst_violation)
     << " merit_monotone=" << (merit_monotone ? 1 : 0) << " J0=" << fmt(j0)
     << " Jfinal=" << fmt(jn);
  const bool ok = feasible_after && worst_violation <= 1e-3 && merit_monotone && jn < j0;
  return {ok, os.str()};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    double budget_seconds;  // 0 = no stated budget
    std::function<CriterionResult()> fn;
  };
  const std::vector<Entry> criteria = {
      {"forward-solver convergence", 60, forward_convergence},
      {"objective discretization accuracy", 60, objective_accuracy},
      {"gradient exactness vs finite differences", 120, gradient_exactness},
      {"adjoint/direct equivalence", 0, adjoint_direct_equivalence},
      {"IFE local property suite", 0, ife_local_properties},
      {"velocity-field property suite", 0, velocity_field_properties},
      {"desk-scale inversion regression", 600, inversion_regression},
      {"heat-design constrained run", 0, heat_design_run},
  };

  bool all_pass = true;
  std::vector<std::uint64_t> digests;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult res;
    try {
      res = criteria[i].fn();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (criteria[i].budget_seconds > 0 && elapsed > criteria[i].budget_seconds)
      res.pass = false;
    digests.push_back(fnv1a(res.detail));
    std::printf("%s criterion %zu: %s [%.1fs] %s\n", res.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, elapsed, res.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && res.pass;
  }

  // criterion 9: rerun everything and compare output digests
  {
    const auto start = std::chrono::steady_clock::now();
    bool reproducible = true;
    for (size_t i = 0; i < criteria.size(); ++i) {
      CriterionResult res;
      try {
        res = criteria[i].fn();
      } catch (const std::exception& e) {
        res.detail = std::string("exception: ") + e.what();
      }
      if (fnv1a(res.detail) != digests[i]) {
        reproducible = false;
        std::printf("  criterion %zu not reproducible\n", i + 1);
      }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion 9: determinism across reruns [%.1fs]\n",
                reproducible ? "PASS" : "FAIL", elapsed);
    all_pass = all_pass && reproducible;
  }
  return all_pass ? 0 : 1;
}
