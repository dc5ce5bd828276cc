#include "ifex/optimize.hpp"

#include <cmath>

namespace ifex {

namespace {

std::vector<double> step_along(const std::vector<double>& x, const Eigen::VectorXd& d,
                               double t) {
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + t * d(static_cast<int>(i));
  return out;
}

struct Probe {
  bool ok = false;
  double f = 0.0;
  Eigen::VectorXd grad;
  double slope = 0.0;
};

// Strong Wolfe line search (bracket + zoom). Geometry violations at a trial
// point shrink the trial step. When the curvature condition cannot be met
// inside the geometrically valid window (the one-dimensional minimizer sits
// beyond it), the best point with sufficient decrease is accepted instead;
// the damped update rule then skips the non-curvature pair.
struct WolfeResult {
  double t = 0.0;
  double f = 0.0;
  Eigen::VectorXd grad;
  std::vector<double> x;
  int halvings = 0;
};

WolfeResult wolfe_search(const ObjectiveCallbacks& cb, const std::vector<double>& x0, double f0,
                         const Eigen::VectorXd& g0, const Eigen::VectorXd& d,
                         const OptimizeOptions& opt, double t_init, double t_max) {
  const double slope0 = g0.dot(d);
  if (slope0 >= 0) throw LineSearchFailure("line search: not a descent direction");
  int budget = opt.max_halvings;

  bool have_armijo = false;
  WolfeResult best;
  auto probe = [&](double t) {
    Probe p;
    try {
      auto [f, g] = cb.value_and_gradient(step_along(x0, d, t));
      p.ok = true;
      p.f = f;
      p.grad = std::move(g);
      p.slope = p.grad.dot(d);
      if (p.f <= f0 + opt.wolfe_c1 * t * slope0 && (!have_armijo || p.f < best.f)) {
        have_armijo = true;
        best = {t, p.f, p.grad, step_along(x0, d, t), 0};
      }
    } catch (const GeometryError&) {
      p.ok = false;
    }
    return p;
  };
  auto wolfe_ok = [&](const Probe& p, double t) {
    return p.f <= f0 + opt.wolfe_c1 * t * slope0 && std::abs(p.slope) <= opt.wolfe_c2 * (-slope0);
  };
  auto fallback = [&]() -> WolfeResult {
    // vanishing steps carry no progress and corrupt the curvature pairs
    if (have_armijo && best.t >= 1e-8) {
      best.halvings = opt.max_halvings - budget;
      return best;
    }
    throw LineSearchFailure("line search: no acceptable step");
  };

  auto zoom = [&](double lo, double f_lo, double hi) -> WolfeResult {
    for (; budget > 0; --budget) {
      const double t = 0.5 * (lo + hi);
      const Probe p = probe(t);
      if (!p.ok) {
        hi = t;  // shrink toward the feasible end
        continue;
      }
      if (p.f > f0 + opt.wolfe_c1 * t * slope0 || p.f >= f_lo) {
        hi = t;
        continue;
      }
      if (wolfe_ok(p, t))
        return {t, p.f, p.grad, step_along(x0, d, t), opt.max_halvings - budget};
      if (p.slope * (hi - lo) >= 0) hi = lo;
      lo = t;
      f_lo = p.f;
    }
    return fallback();
  };

  double t_prev = 0.0, f_prev = f0;
  double t = t_init;
  bool first = true;
  for (; budget > 0; --budget) {
    const Probe p = probe(t);
    if (!p.ok) {
      t = 0.5 * (t_prev + t);
      continue;
    }
    if (p.f > f0 + opt.wolfe_c1 * t * slope0 || (!first && p.f >= f_prev))
      return zoom(t_prev, f_prev, t);
    if (wolfe_ok(p, t)) return {t, p.f, p.grad, step_along(x0, d, t), opt.max_halvings - budget};
    if (p.slope >= 0) return zoom(t, p.f, t_prev);
    t_prev = t;
    f_prev = p.f;
    first = false;
    if (t >= t_max) return fallback();  // displacement bound reached
    t = std::min(2.0 * t, t_max);
  }
  return fallback();
}

double initial_trial(const Eigen::VectorXd& d, const OptimizeOptions& opt) {
  if (opt.h <= 0) return 1.0;
  const double dmax = d.lpNorm<Eigen::Infinity>();
  if (dmax <= 0) return 1.0;
  return std::min(1.0, opt.initial_step_factor * opt.h / dmax);
}

// accepted steps keep the largest control-point displacement near the mesh
// size, the regime in which a fixed mesh resolves the moving interface
double trial_cap(const Eigen::VectorXd& d, const OptimizeOptions& opt) {
  if (opt.h <= 0) return 1e12;
  const double dmax = d.lpNorm<Eigen::Infinity>();
  if (dmax <= 0) return 1e12;
  return opt.max_step_factor * opt.h / dmax;
}

void bfgs_update(Eigen::MatrixXd& h, const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
  const double sy = s.dot(y);
  if (sy <= 1e-10 * s.norm() * y.norm()) return;  // damped: skip non-curvature pairs
  const double rho = 1.0 / sy;
  const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(h.rows(), h.cols());
  const Eigen::MatrixXd v = i - rho * s * y.transpose();
  h = v * h * v.transpose() + rho * s * s.transpose();
}

Eigen::VectorXd to_eigen(const std::vector<double>& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<int>(x.size()));
}

}  // namespace

OptState make_initial_state(const ObjectiveCallbacks& cb, const std::vector<double>& alpha) {
  OptState st;
  st.alpha = alpha;
  auto [f, g] = cb.value_and_gradient(alpha);
  st.j = f;
  st.grad = std::move(g);
  st.h_inv = Eigen::MatrixXd::Identity(st.grad.size(), st.grad.size());
  if (cb.constraint) {
    auto [cv, cg] = cb.constraint(alpha);
    st.constraint_value = cv;
    st.constraint_grad = std::move(cg);
  }
  return st;
}

OptState bfgs_step(const OptState& state, const ObjectiveCallbacks& cb,
                   const OptimizeOptions& opt) {
  const Eigen::VectorXd d = -(state.h_inv * state.grad);
  const WolfeResult ls = wolfe_search(cb, state.alpha, state.j, state.grad, d, opt,
                                      initial_trial(d, opt), trial_cap(d, opt));
  OptState next = state;
  next.alpha = ls.x;
  next.j = ls.f;
  next.grad = ls.grad;
  next.last_step = ls.t;
  next.halvings_used = ls.halvings;
  bool same_piece = true;
  if (cb.topology_signature)
    same_piece = cb.topology_signature(state.alpha) == cb.topology_signature(ls.x);
  if (same_piece) {
    const Eigen::VectorXd s = to_eigen(ls.x) - to_eigen(state.alpha);
    const Eigen::VectorXd y = ls.grad - state.grad;
    bfgs_update(next.h_inv, s, y);
  }
  return next;
}

OptState constrained_step(const OptState& state, const ObjectiveCallbacks& cb,
                          const OptimizeOptions& opt) {
  if (!cb.constraint) throw ContractError("constrained_step: no constraint callback");
  const Eigen::VectorXd& g = state.grad;
  const Eigen::VectorXd& a = state.constraint_grad;
  const double c = state.constraint_value;

  const Eigen::VectorXd du = -(state.h_inv * g);
  double lambda = 0.0;
  Eigen::VectorXd d = du;
  if (c + a.dot(du) > 0) {
    const double denom = a.dot(state.h_inv * a);
    if (denom <= 1e-14) {
      if (c > 1e-10)
        throw LineSearchFailure("constrained_step: infeasible with vanishing constraint gradient");
      lambda = 0.0;
    } else {
      lambda = (c + a.dot(du)) / denom;
      d = du - lambda * (state.h_inv * a);
    }
  }

  OptState next = state;
  next.nu = std::max(state.nu, 1.5 * lambda + 0.1);
  const double nu = next.nu;
  auto merit = [&](double f, double cv) { return f + nu * std::max(0.0, cv); };
  const double phi0 = merit(state.j, c);
  const double dslope = g.dot(d) + nu * (c > 0 ? a.dot(d) : std::max(0.0, a.dot(d)));

  double t = initial_trial(d, opt);
  for (int i = 0; i <= opt.max_halvings; ++i) {
    const auto x = step_along(state.alpha, d, t);
    try {
      auto [f, gr] = cb.value_and_gradient(x);
      auto [cv, cg] = cb.constraint(x);
      if (merit(f, cv) <= phi0 + opt.wolfe_c1 * t * dslope ||
          merit(f, cv) < phi0 - 1e-14 * std::abs(phi0)) {
        next.alpha = x;
        next.j = f;
        next.last_step = t;
        next.halvings_used = i;
        bool same_piece = true;
        if (cb.topology_signature)
          same_piece = cb.topology_signature(state.alpha) == cb.topology_signature(x);
        if (same_piece) {
          const Eigen::VectorXd s = to_eigen(x) - to_eigen(state.alpha);
          const Eigen::VectorXd y = gr - state.grad;
          bfgs_update(next.h_inv, s, y);
        }
        next.grad = std::move(gr);
        next.constraint_value = cv;
        next.constraint_grad = std::move(cg);
        return next;
      }
    } catch (const GeometryError&) {
      // fall through to halving
    }
    t *= 0.5;
  }
  throw LineSearchFailure("constrained_step: merit line search failed");
}

OptResult run_optimization(const std::function<OptimizationLevel(int)>& make_level,
                           const std::vector<double>& alpha0, const OptimizeOptions& opt) {
  OptResult result;
  std::vector<double> alpha = alpha0;
  int level = 0;
  OptimizationLevel lv = make_level(level);

  auto initial_state = [&](const std::vector<double>& a0) {
    std::vector<double> a = a0;
    for (int attempt = 0;; ++attempt) {
      try {
        return make_initial_state(lv.callbacks, a);
      } catch (const GeometryError&) {
        if (attempt >= 3) throw;
        for (double& v : a) v += 1e-8;  // nudge off the degenerate configuration
      }
    }
  };

  OptimizeOptions level_opt = opt;
  level_opt.h = lv.h;
  OptState st = initial_state(alpha);
  int iter = 0;
  int rejects = 0;
  int small_motions = 0;
  // constrained runs gauge progress by the merit function
  auto progress_measure = [&](const OptState& s) {
    return lv.callbacks.constraint ? s.j + s.nu * std::max(0.0, s.constraint_value) : s.j;
  };
  std::vector<double> j_history;
  auto record = [&](bool accepted) {
    IterationRecord rec;
    rec.iter = iter;
    rec.j = st.j;
    rec.grad_norm = st.grad.size() ? st.grad.lpNorm<Eigen::Infinity>() : 0.0;
    rec.step = st.last_step;
    rec.mesh_n = lv.mesh_n;
    rec.accepted = accepted;
    rec.constraint = st.constraint_value;
    rec.merit = st.j + st.nu * std::max(0.0, st.constraint_value);
    rec.alpha = st.alpha;
    result.history.push_back(std::move(rec));
  };
  record(true);
  j_history.push_back(progress_measure(st));

  while (iter < opt.max_iters) {
    if (st.grad.lpNorm<Eigen::Infinity>() < opt.tol_g) {
      result.converged = true;
      result.stop_reason = "gradient tolerance reached";
      break;
    }
    if (static_cast<int>(j_history.size()) > opt.tol_j_window) {
      const double past = j_history[j_history.size() - 1 - opt.tol_j_window];
      if (past - progress_measure(st) < opt.tol_j_rel * std::max(1.0, std::abs(past))) {
        result.converged = true;
        result.stop_reason = "objective decrease below tolerance";
        break;
      }
    }

    bool stalled = false;
    try {
      const std::vector<double> prev_alpha = st.alpha;
      st = lv.callbacks.constraint ? constrained_step(st, lv.callbacks, level_opt)
                                   : bfgs_step(st, lv.callbacks, level_opt);
      ++iter;
      record(true);
      j_history.push_back(progress_measure(st));
      rejects = 0;
      const double motion = lv.callbacks.motion ? lv.callbacks.motion(prev_alpha, st.alpha)
                                                : 0.0;
      if (lv.callbacks.motion && motion < opt.stall_motion_factor * lv.h)
        ++small_motions;
      else
        small_motions = 0;
      if (small_motions >= 3 && level < opt.max_refinements) stalled = true;
    } catch (const LineSearchFailure&) {
      ++rejects;
      ++iter;
      record(false);
      // retry once with a fresh curvature model before giving up
      if (rejects == 1)
        st.h_inv = Eigen::MatrixXd::Identity(st.grad.size(), st.grad.size());
      if (rejects >= opt.stall_reject_limit) {
        if (level < opt.max_refinements) {
          stalled = true;
        } else {
          result.stop_reason = "stalled: repeated line-search failures";
          break;
        }
      }
    }

    if (stalled) {
      ++level;
      lv = make_level(level);
      level_opt.h = lv.h;
      // carry the newest design that is classifiable on the finer mesh
      bool moved = false;
      std::vector<std::vector<double>> candidates{st.alpha};
      for (auto it = result.history.rbegin(); it != result.history.rend(); ++it)
        if (it->accepted) candidates.push_back(it->alpha);
      for (size_t c = 0; c < candidates.size() && c < 12 && !moved; ++c) {
        try {
          st = initial_state(candidates[c]);
          alpha = candidates[c];
          moved = true;
        } catch (const GeometryError&) {
        }
      }
      if (!moved) {
        result.stop_reason = "stalled: no iterate classifiable on the refined mesh";
        break;
      }
      rejects = 0;
      small_motions = 0;
      record(true);
      j_history.clear();
      j_history.push_back(progress_measure(st));
    }
  }
  if (result.stop_reason.empty() && iter >= opt.max_iters)
    result.stop_reason = "iteration limit reached";

  result.alpha = st.alpha;
  result.j = st.j;
  result.final_mesh_n = lv.mesh_n;
  return result;
}

}  // namespace ifex
