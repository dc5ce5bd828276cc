#include <doctest.h>

#include <cmath>
#include <random>

#include "ifex/ife.hpp"

using namespace ifex;

namespace {

std::array<Vec2, 3> tri3(const Vec2& a, const Vec2& b, const Vec2& c) { return {a, b, c}; }

// Piecewise-affine oracle satisfying both jump conditions across the chord:
// value continuity on the line through P, Q and flux continuity in nbar.
struct JumpCompatible {
  Affine2 minus, plus;
  static JumpCompatible make(const InterfaceElementGeom& g, double bm, double bp,
                             const Affine2& minus_piece) {
    JumpCompatible w;
    w.minus = minus_piece;
    const double kappa = (bm / bp - 1.0) * minus_piece.g.dot(g.nbar);
    w.plus.g = minus_piece.g + kappa * g.nbar;
    w.plus.a = minus_piece.a + (minus_piece.g - w.plus.g).dot(g.P);
    return w;
  }
  double at(const InterfaceElementGeom& g, const Vec2& x) const {
    return g.minus_at(x) ? minus(x) : plus(x);
  }
};

InterfaceElementGeom random_geom(std::mt19937& rng) {
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

}  // namespace

TEST_SUITE("ife") {
  TEST_CASE("geometry constants of the canonical example") {
    const auto g = build_geom(tri3(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)), Vec2(0.5, 0), Vec2(0, 0.5), true);
    CHECK(std::abs(g.nbar.norm() - 1.0) < 1e-14);
    CHECK(std::abs(g.L(g.P)) < 1e-12);
    CHECK(std::abs(g.L(g.Q)) < 1e-12);
    // A1 on the minus side by construction
    CHECK(g.L(Vec2(0, 0)) < 0);
    CHECK(std::abs(std::abs(g.L(Vec2(0, 0))) - 0.5 / std::sqrt(2.0)) < 1e-12);
    CHECK(g.iminus == std::vector<int>{0});
    CHECK((g.iplus == std::vector<int>{1, 2}));
    // sub-triangle areas: 0.125 + 0.125 + 0.25 = 0.5
    CHECK(g.subtri_area[0] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(g.subtri_area[1] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(g.subtri_area[2] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(std::abs(g.area() - 0.5) < 1e-12);
  }

  TEST_CASE("degenerate cuts are rejected") {
    CHECK_THROWS_AS(build_geom(tri3(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)), Vec2(0.5, 0), Vec2(0.5, 0), true),
                    GeometryError);
    CHECK_THROWS_AS(build_geom(tri3(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)), Vec2(0.3, 0), Vec2(0.6, 0), true),
                    GeometryError);
  }

  TEST_CASE("equal conductivities reduce to the standard interpolant") {
    const auto g = build_geom(tri3(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)), Vec2(0.4, 0), Vec2(0, 0.7), true);
    const auto psi = p1_basis(g.A);
    const std::array<double, 3> v{0.3, -1.2, 0.8};
    const IfeShape s = build_ife_shape(g, 2.5, 2.5, v);
    CHECK(std::abs(s.coef.c0) < 1e-13);
    for (const Vec2& x : {Vec2(0.2, 0.2), Vec2(0.05, 0.6), Vec2(0.6, 0.1)}) {
      const double p1 = v[0] * psi[0](x) + v[1] * psi[1](x) + v[2] * psi[2](x);
      CHECK(std::abs(s.value(g, x) - p1) < 1e-13);
    }
  }

  TEST_CASE("nodal delta property") {
    const auto g = build_geom(tri3(Vec2(-1, 0), Vec2(1, 0), Vec2(0, 1)), Vec2(0.2, 0), Vec2(-0.45, 0.55), false);
    for (int i = 0; i < 3; ++i) {
      std::array<double, 3> v{0, 0, 0};
      v[i] = 1.0;
      const IfeShape s = build_ife_shape(g, 3.0, 0.7, v);
      for (int jj = 0; jj < 3; ++jj)
        CHECK(std::abs(s.value(g, g.A[jj]) - (i == jj ? 1.0 : 0.0)) < 1e-12);
    }
  }

  TEST_CASE("reproduces a jump-compatible piecewise-affine function") {
    const auto g = build_geom(tri3(Vec2(-1, 0), Vec2(1, 0), Vec2(0, 1)), Vec2(0.2, 0), Vec2(-0.4, 0.6), true);
    const double bm = 1.0, bp = 7.0;
    const JumpCompatible w = JumpCompatible::make(g, bm, bp, Affine2{0.4, Vec2(1.3, -0.8)});
    std::array<double, 3> v;
    for (int i = 0; i < 3; ++i) v[i] = w.at(g, g.A[i]);
    const IfeShape s = build_ife_shape(g, bm, bp, v);
    for (const Vec2& x : {Vec2(-0.5, 0.1), Vec2(0.5, 0.2), Vec2(0.0, 0.7), Vec2(0.1, 0.05)}) {
      CHECK(std::abs(s.value(g, x) - w.at(g, x)) < 1e-12);
    }
  }

  TEST_CASE("randomized local property suite") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> beta_dist(0.05, 20.0);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
      const InterfaceElementGeom g = random_geom(rng);
      const double bm = beta_dist(rng), bp = beta_dist(rng);

      // partition of unity across both pieces
      const IfeShape ones = build_ife_shape(g, bm, bp, {1.0, 1.0, 1.0});
      for (int m = 0; m < 3; ++m) {
        const Vec2 c = (g.subtri[m][0] + g.subtri[m][1] + g.subtri[m][2]) / 3.0;
        CHECK(std::abs(ones.value(g, c) - 1.0) < 1e-12);
      }

      const std::array<double, 3> v{val(rng), val(rng), val(rng)};
      const IfeShape s = build_ife_shape(g, bm, bp, v);
      // nodal values
      for (int i = 0; i < 3; ++i) CHECK(std::abs(s.value(g, g.A[i]) - v[i]) < 1e-11);
      // continuity along the chord
      for (double t : {0.2, 0.5, 0.8}) {
        const Vec2 x = g.P + t * (g.Q - g.P);
        CHECK(std::abs(s.minus(x) - s.plus(x)) < 1e-11);
      }
      // flux jump condition
      CHECK(std::abs(bm * s.minus.g.dot(g.nbar) - bp * s.plus.g.dot(g.nbar)) <
            1e-11 * std::max(1.0, std::abs(bp * s.plus.g.dot(g.nbar))));
      // exactness on jump-compatible piecewise-affine data
      const JumpCompatible w =
          JumpCompatible::make(g, bm, bp, Affine2{val(rng), Vec2(val(rng), val(rng))});
      std::array<double, 3> wv;
      for (int i = 0; i < 3; ++i) wv[i] = w.at(g, g.A[i]);
      const IfeShape ws = build_ife_shape(g, bm, bp, wv);
      for (int m = 0; m < 3; ++m) {
        const Vec2 c = (g.subtri[m][0] + g.subtri[m][1] + g.subtri[m][2]) / 3.0;
        CHECK(std::abs(ws.value(g, c) - w.at(g, c)) < 1e-10);
      }
    }
  }

  TEST_CASE("coefficients depend continuously on the intersection points") {
    const std::array<Vec2, 3> tri{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    auto c0_of = [&](double eps) {
      const auto g = build_geom(tri, Vec2(0.5 + eps, 0), Vec2(0, 0.6), true);
      return build_ife_shape(g, 1.0, 9.0, {1.0, -0.5, 2.0}).coef.c0;
    };
    const double base = c0_of(0.0);
    const double d1 = std::abs(c0_of(1e-3) - base);
    const double d2 = std::abs(c0_of(5e-4) - base);
    CHECK(d1 / d2 > 1.6);  // first-order in the perturbation
    CHECK(d1 / d2 < 2.4);
  }

  TEST_CASE("shape value and gradient reject outside points") {
    const auto g = build_geom(tri3(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)), Vec2(0.5, 0), Vec2(0, 0.5), true);
    const ElementBasis b = interface_basis(g, 1.0, 4.0);
    CHECK_THROWS_AS(b.shape_value(0, {2.0, 2.0}), InvalidArgument);
    CHECK_THROWS_AS(b.shape_gradient(1, {-0.5, 0.2}), InvalidArgument);
    CHECK(b.shape_value(0, {0.1, 0.1}) == doctest::Approx(b.shape[0].value(g, {0.1, 0.1})));
  }

  TEST_CASE("textbook gradient on the reference triangle") {
    const ElementBasis b = non_interface_basis({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}, 1.0);
    CHECK((b.shape_gradient(0, {0.25, 0.25}) - Vec2(-1, -1)).norm() < 1e-14);
    CHECK((b.shape_gradient(1, {0.25, 0.25}) - Vec2(1, 0)).norm() < 1e-14);
    CHECK((b.shape_gradient(2, {0.25, 0.25}) - Vec2(0, 1)).norm() < 1e-14);
  }
}
