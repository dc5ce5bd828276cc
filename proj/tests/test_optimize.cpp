#include <doctest.h>

#include <cmath>

#include "ifex/optimize.hpp"

using namespace ifex;

namespace {

Eigen::VectorXd to_vec(const std::vector<double>& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<int>(x.size()));
}

// f(x) = 1/2 (x-c)' A (x-c)
ObjectiveCallbacks quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& c) {
  ObjectiveCallbacks cb;
  cb.value = [a, c](const std::vector<double>& x) {
    const Eigen::VectorXd d = to_vec(x) - c;
    return 0.5 * d.dot(a * d);
  };
  cb.value_and_gradient =
      [a, c](const std::vector<double>& x) -> std::pair<double, Eigen::VectorXd> {
    const Eigen::VectorXd d = to_vec(x) - c;
    return {0.5 * d.dot(a * d), a * d};
  };
  return cb;
}

}  // namespace

TEST_SUITE("optimize") {
  TEST_CASE("identity-hessian quadratic converges in one step") {
    const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(4, 0.5, 2.0);
    const ObjectiveCallbacks cb = quadratic(Eigen::MatrixXd::Identity(4, 4), c);
    OptState st = make_initial_state(cb, {0, 0, 0, 0});
    st = bfgs_step(st, cb, OptimizeOptions{});
    CHECK(st.grad.lpNorm<Eigen::Infinity>() < 1e-12);
    CHECK((to_vec(st.alpha) - c).norm() < 1e-12);
  }

  TEST_CASE("strictly convex quadratic in five variables") {
    Eigen::MatrixXd a(5, 5);
    a.setZero();
    for (int i = 0; i < 5; ++i) {
      a(i, i) = 2.0 + i;
      if (i > 0) {
        a(i, i - 1) = 0.5;
        a(i - 1, i) = 0.5;
      }
    }
    const Eigen::VectorXd c = (Eigen::VectorXd(5) << 1, -2, 0.5, 3, -1).finished();
    const ObjectiveCallbacks cb = quadratic(a, c);
    OptState st = make_initial_state(cb, {0, 0, 0, 0, 0});
    const OptimizeOptions opt;
    int iters = 0;
    std::vector<double> js{st.j};
    while (st.grad.lpNorm<Eigen::Infinity>() > 1e-10 && iters < 12) {
      st = bfgs_step(st, cb, opt);
      js.push_back(st.j);
      ++iters;
    }
    CHECK(iters <= 12);
    CHECK(st.grad.lpNorm<Eigen::Infinity>() <= 1e-10);
    CHECK((to_vec(st.alpha) - c).norm() < 1e-8);  // direct minimizer A^{-1}(Ac) = c
    for (size_t i = 1; i < js.size(); ++i) CHECK(js[i] <= js[i - 1] + 1e-15);
  }

  TEST_CASE("uphill directions are rejected as line-search failures") {
    ObjectiveCallbacks cb;
    cb.value = [](const std::vector<double>&) { return 1.0; };
    cb.value_and_gradient =
        [](const std::vector<double>&) -> std::pair<double, Eigen::VectorXd> {
      return {1.0, Eigen::VectorXd::Zero(2)};  // zero gradient: no descent direction
    };
    OptState st = make_initial_state(cb, {0.3, -0.2});
    CHECK_THROWS_AS(bfgs_step(st, cb, OptimizeOptions{}), LineSearchFailure);
  }

  TEST_CASE("inactive constraints reproduce the unconstrained step") {
    const Eigen::VectorXd c = (Eigen::VectorXd(3) << 0.4, -0.1, 0.7).finished();
    ObjectiveCallbacks cb = quadratic(Eigen::MatrixXd::Identity(3, 3), c);
    cb.constraint = [](const std::vector<double>& x) -> std::pair<double, Eigen::VectorXd> {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(3);
      g(0) = 1.0;
      return {x[0] - 100.0, g};  // never active
    };
    OptState st = make_initial_state(cb, {0, 0, 0});
    const OptState unc = bfgs_step(st, quadratic(Eigen::MatrixXd::Identity(3, 3), c),
                                   OptimizeOptions{});
    const OptState con = constrained_step(st, cb, OptimizeOptions{});
    CHECK((to_vec(unc.alpha) - to_vec(con.alpha)).norm() < 1e-12);
  }

  TEST_CASE("active constraint at the optimum keeps the step small") {
    // minimize 1/2 |x - (2,0)|^2 subject to x_0 <= 1; optimum at (1,0)
    const Eigen::VectorXd c = (Eigen::VectorXd(2) << 2.0, 0.0).finished();
    ObjectiveCallbacks cb = quadratic(Eigen::MatrixXd::Identity(2, 2), c);
    cb.constraint = [](const std::vector<double>& x) -> std::pair<double, Eigen::VectorXd> {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
      g(0) = 1.0;
      return {x[0] - 1.0, g};
    };
    OptState st = make_initial_state(cb, {1.0, 0.0});
    const OptState next = constrained_step(st, cb, OptimizeOptions{});
    CHECK((to_vec(next.alpha) - to_vec(st.alpha)).norm() < 1e-10);
    // KKT residual with the multiplier implied by the gradient
    const Eigen::VectorXd g = next.grad;
    const double lambda = -g(0);  // a = e_0
    CHECK(lambda >= 0.0);
    CHECK(std::abs(g(0) + lambda) + std::abs(g(1)) < 1e-8);
  }

  TEST_CASE("constrained iteration reaches the boundary optimum") {
    const Eigen::VectorXd c = (Eigen::VectorXd(2) << 2.0, 0.5).finished();
    ObjectiveCallbacks cb = quadratic(Eigen::MatrixXd::Identity(2, 2), c);
    cb.constraint = [](const std::vector<double>& x) -> std::pair<double, Eigen::VectorXd> {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
      g(0) = 1.0;
      return {x[0] - 1.0, g};
    };
    OptState st = make_initial_state(cb, {1.4, -0.5});  // infeasible start
    for (int i = 0; i < 20; ++i) st = constrained_step(st, cb, OptimizeOptions{});
    CHECK(st.constraint_value < 1e-8);
    CHECK(std::abs(st.alpha[0] - 1.0) < 1e-6);
    CHECK(std::abs(st.alpha[1] - 0.5) < 1e-6);
  }

  TEST_CASE("run loop stops immediately at a minimum") {
    const Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
    auto make_level = [&](int) {
      OptimizationLevel lv;
      lv.callbacks = quadratic(Eigen::MatrixXd::Identity(3, 3), c);
      lv.mesh_n = 10;
      lv.h = 0.2;
      return lv;
    };
    const OptResult res = run_optimization(make_level, {0, 0, 0}, OptimizeOptions{});
    CHECK(res.converged);
    CHECK(res.history.size() == 1);
  }

  TEST_CASE("stalls trigger refinement and the refined level converges") {
    int levels_built = 0;
    auto make_level = [&](int level) {
      ++levels_built;
      OptimizationLevel lv;
      lv.mesh_n = 10 << level;
      lv.h = 2.0 / lv.mesh_n;
      if (level == 0) {
        // constant objective with a lying gradient: every line search fails
        lv.callbacks.value = [](const std::vector<double>&) { return 1.0; };
        lv.callbacks.value_and_gradient =
            [](const std::vector<double>&) -> std::pair<double, Eigen::VectorXd> {
          Eigen::VectorXd g(2);
          g << 1.0, 1.0;
          return {1.0, g};
        };
      } else {
        lv.callbacks = quadratic(Eigen::MatrixXd::Identity(2, 2),
                                 (Eigen::VectorXd(2) << 0.3, -0.4).finished());
      }
      return lv;
    };
    OptimizeOptions opt;
    opt.max_refinements = 1;
    opt.max_iters = 60;
    const OptResult res = run_optimization(make_level, {0, 0}, opt);
    CHECK(levels_built == 2);
    CHECK(res.final_mesh_n == 20);
    CHECK(res.converged);
    CHECK(std::abs(res.alpha[0] - 0.3) < 1e-8);
  }

  TEST_CASE("wolfe conditions hold at accepted points") {
    Eigen::MatrixXd a(3, 3);
    a << 4, 1, 0, 1, 3, 0.5, 0, 0.5, 2;
    const Eigen::VectorXd c = (Eigen::VectorXd(3) << -1, 2, 0.3).finished();
    const ObjectiveCallbacks cb = quadratic(a, c);
    const OptimizeOptions opt;
    OptState st = make_initial_state(cb, {1, 1, 1});
    for (int i = 0; i < 5 && st.grad.norm() > 1e-12; ++i) {
      const Eigen::VectorXd d = -(st.h_inv * st.grad);
      const double f0 = st.j, slope0 = st.grad.dot(d);
      const OptState next = bfgs_step(st, cb, opt);
      const double t = next.last_step;
      CHECK(next.j <= f0 + opt.wolfe_c1 * t * slope0 + 1e-14);
      CHECK(std::abs(next.grad.dot(d)) <= opt.wolfe_c2 * (-slope0) + 1e-14);
      st = next;
    }
  }
}
