#include "ifex/cases.hpp"

#include <cmath>
#include <map>

#include "ifex/quadrature.hpp"

namespace ifex {

namespace {

constexpr double kPi = M_PI;

Vec2 boundary_normal(const Vec2& x) {
  if (std::abs(x.x()) >= std::abs(x.y())) return x.x() > 0 ? Vec2(1, 0) : Vec2(-1, 0);
  return x.y() > 0 ? Vec2(0, 1) : Vec2(0, -1);
}

// Composite quadrature of a scalar field over the square domain.
double integrate_domain(const std::function<double(const Vec2&)>& f, int n = 512) {
  const double h = 2.0 / n;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Vec2 a(-1 + i * h, -1 + j * h), b(-1 + (i + 1) * h, -1 + j * h),
          c(-1 + (i + 1) * h, -1 + (j + 1) * h), d(-1 + i * h, -1 + (j + 1) * h);
      total += quad::tri_integrate(a, b, c, f) + quad::tri_integrate(a, c, d, f);
    }
  }
  return total;
}

// Manufactured family u = scale/(pi^4 beta_s) (r^{5/2} - 1) + scale/(pi^4 beta_-)
// for a quadratic level function r with r = 1 on the interface.
struct RadialCase {
  double scale;  // 1024 or 3600
  double beta_minus, beta_plus;
  Vec2 center;
  double ax, ay;  // r = (ax (x-cx)^2 + ay (y-cy)^2) / pi^2

  double r(const Vec2& p) const {
    const Vec2 d = p - center;
    return (ax * d.x() * d.x() + ay * d.y() * d.y()) / (kPi * kPi);
  }
  Vec2 grad_r(const Vec2& p) const {
    const Vec2 d = p - center;
    return Vec2(2 * ax * d.x(), 2 * ay * d.y()) / (kPi * kPi);
  }
  double u(const Vec2& p) const {
    const double rv = r(p);
    const double beta = rv < 1 ? beta_minus : beta_plus;
    const double c = scale / std::pow(kPi, 4);
    return c / beta * (std::pow(rv, 2.5) - 1.0) + c / beta_minus;
  }
  Vec2 grad_u(const Vec2& p) const {
    const double rv = r(p);
    const double beta = rv < 1 ? beta_minus : beta_plus;
    const double c = scale / std::pow(kPi, 4);
    return c / beta * 2.5 * std::pow(rv, 1.5) * grad_r(p);
  }
  double f(const Vec2& p) const {
    const double rv = r(p);
    const double c = scale / std::pow(kPi, 4);
    const double lap_r = 2 * (ax + ay) / (kPi * kPi);
    return -c * (3.75 * std::sqrt(rv) * grad_r(p).squaredNorm() +
                 2.5 * std::pow(rv, 1.5) * lap_r);
  }
  Vec2 grad_f(const Vec2& p) const {
    // d/dx of f via the chain rule on r
    const double rv = r(p);
    const Vec2 gr = grad_r(p);
    const double c = scale / std::pow(kPi, 4);
    const double lap_r = 2 * (ax + ay) / (kPi * kPi);
    const Mat2 hess = (Mat2() << 2 * ax / (kPi * kPi), 0, 0, 2 * ay / (kPi * kPi)).finished();
    const double sr = std::sqrt(std::max(rv, 1e-300));
    const Vec2 d_gr2 = 2.0 * (hess * gr);
    return -c * (3.75 * (0.5 / sr * gr * gr.squaredNorm() + sr * d_gr2) +
                 2.5 * 1.5 * sr * gr * lap_r);
  }
  double flux_dot(const Vec2& p, const Vec2& n) const {
    // beta grad u . n is continuous: beta cancels against 1/beta_s
    const double c = scale / std::pow(kPi, 4);
    return c * 2.5 * std::pow(r(p), 1.5) * grad_r(p).dot(n);
  }
};

Field field_from(std::function<double(const Vec2&)> v, std::function<Vec2(const Vec2&)> g) {
  return Field{std::move(v), std::move(g)};
}

SplineCurve circle_curve(const Vec2& center, double radius, int n) {
  return SplineCurve(sample_circle(center, radius, n), true);
}

SplineCurve ellipse_curve(const Vec2& center, double rx, double ry, int n) {
  return SplineCurve(sample_ellipse(center, rx, ry, n), true);
}

// Radially sample the zero level of s around an interior point where the sign
// differs from the far field.
std::function<Vec2(double)> radial_sampler(std::function<double(const Vec2&)> s, Vec2 center,
                                           double rmax) {
  return [s = std::move(s), center, rmax](double t) -> Vec2 {
    const double phi = 2 * kPi * t;
    const Vec2 dir(std::cos(phi), std::sin(phi));
    const double s0 = s(center);
    double lo = 0.0, hi = rmax;
    // expand until the sign flips
    while (s(center + hi * dir) * s0 > 0 && hi < 4.0) hi *= 1.3;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (s(center + mid * dir) * s0 > 0)
        lo = mid;
      else
        hi = mid;
    }
    return center + 0.5 * (lo + hi) * dir;
  };
}

double memo_domain_integral(const std::string& key, const std::function<double(const Vec2&)>& f) {
  static std::map<std::string, double> memo;
  auto it = memo.find(key);
  if (it != memo.end()) return it->second;
  const double v = integrate_domain(f);
  memo.emplace(key, v);
  return v;
}

CaseDefinition table1_case1(int m) {
  CaseDefinition cd;
  cd.name = "table1-case1";
  const double bm = 1.0, bp = 20.0;
  auto svalue = [](const Vec2& p) {
    const double r2 = p.squaredNorm();
    const double th = std::atan2(p.y(), p.x());
    return r2 * r2 * (1 + 0.8 * std::sin(6 * th)) - 0.1;
  };
  auto sgrad = [](const Vec2& p) -> Vec2 {
    const double r2 = p.squaredNorm();
    if (r2 < 1e-300) return Vec2::Zero();
    const double th = std::atan2(p.y(), p.x());
    const double a = 1 + 0.8 * std::sin(6 * th);
    const Vec2 radial = 4 * r2 * a * p;
    const Vec2 angular = 4.8 * r2 * std::cos(6 * th) * Vec2(-p.y(), p.x());
    return radial + angular;
  };
  auto beta_at = [bm, bp, svalue](const Vec2& p) { return svalue(p) < 0 ? bm : bp; };

  ForwardProblemSpec fp;
  fp.material = MaterialModel{bp, {bm}};
  fp.kind = BCKind::Mixed;
  fp.neumann_sides = 0;
  fp.f = field_from(
      [](const Vec2& p) {
        const double th = std::atan2(p.y(), p.x());
        return -16.0 * p.squaredNorm() * (1 - std::sin(6 * th));
      },
      [](const Vec2& p) -> Vec2 {
        if (p.squaredNorm() < 1e-300) return Vec2::Zero();
        const double th = std::atan2(p.y(), p.x());
        const double s6 = std::sin(6 * th), c6 = std::cos(6 * th);
        return -32.0 * p + 16.0 * (2.0 * s6 * p + 6.0 * c6 * Vec2(-p.y(), p.x()));
      });
  fp.g_dirichlet = field_from([svalue, beta_at](const Vec2& p) { return svalue(p) / beta_at(p); },
                              [sgrad, beta_at](const Vec2& p) { return sgrad(p) / beta_at(p); });

  cd.objective.kind = ObjectiveSpec::Kind::OutputLeastSquares;
  cd.objective.omega0 = Rect{};  // data on the whole domain
  cd.objective.ubar = fp.g_dirichlet;
  cd.objective.problems = {fp};
  cd.initial_curves = {circle_curve(Vec2(-0.6, -0.2), kPi / 9, m)};
  cd.target = {[](double t) -> Vec2 {
    const double th = 2 * kPi * t;
    const double r = std::pow(0.1 / (1 + 0.8 * std::sin(6 * th)), 0.25);
    return Vec2(r * std::cos(th), r * std::sin(th));
  }};
  return cd;
}

CaseDefinition table1_case2(int m) {
  CaseDefinition cd;
  cd.name = "table1-case2";
  const double b1 = 1.0, b2 = 10.0, b3 = 100.0;
  auto svalue = [](const Vec2& p) {
    return -4.0 * std::sin(kPi * p.x()) * std::sin(kPi * p.y()) - 2.0;
  };
  auto sgrad = [](const Vec2& p) -> Vec2 {
    return -4.0 * kPi *
           Vec2(std::cos(kPi * p.x()) * std::sin(kPi * p.y()),
                std::sin(kPi * p.x()) * std::cos(kPi * p.y()));
  };
  // inside a loop: sin sin < -1/2, split by the sign of x
  auto beta_at = [=](const Vec2& p) {
    if (svalue(p) > 0) return p.x() < 0 ? b1 : b2;
    return b3;
  };

  ForwardProblemSpec fp;
  fp.material = MaterialModel{b3, {b1, b2}};
  fp.kind = BCKind::Mixed;
  fp.f = field_from(
      [](const Vec2& p) {
        return -8.0 * kPi * kPi * std::sin(kPi * p.x()) * std::sin(kPi * p.y());
      },
      [](const Vec2& p) -> Vec2 {
        return -8.0 * std::pow(kPi, 3) *
               Vec2(std::cos(kPi * p.x()) * std::sin(kPi * p.y()),
                    std::sin(kPi * p.x()) * std::cos(kPi * p.y()));
      });
  fp.g_dirichlet =
      field_from([svalue, b3](const Vec2& p) { return svalue(p) / b3; },
                 [sgrad, b3](const Vec2& p) { return sgrad(p) / b3; });

  cd.objective.kind = ObjectiveSpec::Kind::OutputLeastSquares;
  cd.objective.omega0 = Rect{};
  cd.objective.ubar =
      field_from([svalue, beta_at](const Vec2& p) { return svalue(p) / beta_at(p); },
                 [sgrad, beta_at](const Vec2& p) { return sgrad(p) / beta_at(p); });
  cd.objective.problems = {fp};
  cd.initial_curves = {ellipse_curve(Vec2(0, -0.5), kPi / 8, kPi / 12, m),
                       ellipse_curve(Vec2(0, 0.5), kPi / 8, kPi / 12, m)};
  cd.target = {radial_sampler(svalue, Vec2(-0.5, 0.5), 0.3),
               radial_sampler(svalue, Vec2(0.5, -0.5), 0.3)};
  return cd;
}

CaseDefinition table1_case3(int m) {
  CaseDefinition cd;
  cd.name = "table1-case3";
  const RadialCase rc{1024.0, 1.0, 10.0, Vec2(0.0, 0.4), 16.0, 64.0};

  ForwardProblemSpec fp;
  fp.material = MaterialModel{rc.beta_plus, {rc.beta_minus}};
  fp.kind = BCKind::Mixed;
  fp.f = field_from([rc](const Vec2& p) { return rc.f(p); },
                    [rc](const Vec2& p) { return rc.grad_f(p); });
  fp.g_dirichlet = field_from([rc](const Vec2& p) { return rc.u(p); },
                              [rc](const Vec2& p) { return rc.grad_u(p); });

  cd.objective.kind = ObjectiveSpec::Kind::OutputLeastSquares;
  cd.objective.omega0 = Rect{-0.5, 0.0, 1.0, 1.0};
  cd.objective.ubar = fp.g_dirichlet;
  cd.objective.problems = {fp};
  cd.initial_curves = {circle_curve(Vec2(0.4, 0.2), kPi / 6.28, m)};
  cd.target = {[rc](double t) -> Vec2 {
    const double th = 2 * kPi * t;
    return rc.center + Vec2(kPi / std::sqrt(rc.ax) * std::cos(th),
                            kPi / std::sqrt(rc.ay) * std::sin(th));
  }};
  cd.has_exact_solution = true;
  cd.exact_u = [rc](const Vec2& p) { return rc.u(p); };
  cd.exact_grad_u = [rc](const Vec2& p) { return rc.grad_u(p); };
  return cd;
}

CaseDefinition table2_case1(int m) {
  CaseDefinition cd;
  cd.name = "table2-case1";
  const RadialCase rc{3600.0, 1.0, 10.0, Vec2(0.4, -0.3), 100.0, 36.0};

  ForwardProblemSpec dirichlet;
  dirichlet.material = MaterialModel{rc.beta_plus, {rc.beta_minus}};
  dirichlet.kind = BCKind::Mixed;
  dirichlet.f = field_from([rc](const Vec2& p) { return rc.f(p); },
                           [rc](const Vec2& p) { return rc.grad_f(p); });
  dirichlet.g_dirichlet = field_from([rc](const Vec2& p) { return rc.u(p); },
                                     [rc](const Vec2& p) { return rc.grad_u(p); });

  ForwardProblemSpec neumann = dirichlet;
  neumann.kind = BCKind::PureNeumann;
  neumann.g_neumann = field_from(
      [rc](const Vec2& p) { return rc.flux_dot(p, boundary_normal(p)); }, nullptr);
  neumann.u0 = memo_domain_integral("table2-case1-u0", [rc](const Vec2& p) { return rc.u(p); });

  cd.objective.kind = ObjectiveSpec::Kind::KohnVogelius;
  cd.objective.problems = {dirichlet, neumann};
  cd.initial_curves = {circle_curve(Vec2(0.1, 0.0), kPi / 4, m)};
  cd.target = {[rc](double t) -> Vec2 {
    const double th = 2 * kPi * t;
    return rc.center + Vec2(kPi / std::sqrt(rc.ax) * std::cos(th),
                            kPi / std::sqrt(rc.ay) * std::sin(th));
  }};
  cd.has_exact_solution = true;
  cd.exact_u = [rc](const Vec2& p) { return rc.u(p); };
  cd.exact_grad_u = [rc](const Vec2& p) { return rc.grad_u(p); };
  return cd;
}

CaseDefinition table2_case2(int m) {
  CaseDefinition cd;
  cd.name = "table2-case2";
  const double bm = 1.0, bp = 2.0;
  // kidney-shaped quartic level set
  auto rho = [](const Vec2& p) {
    return (p.x() + 0.5) * (p.x() + 0.5) + p.y() * p.y();
  };
  auto wt = [rho](const Vec2& p) { return rho(p) - p.x() - 0.2; };
  auto svalue = [rho, wt](const Vec2& p) {
    const double w = wt(p);
    return 4.0 * w * w - rho(p) + 0.3;
  };
  auto sgrad = [wt](const Vec2& p) -> Vec2 {
    const double w = wt(p);
    const Vec2 gw(2 * p.x(), 2 * p.y());
    const Vec2 grho(2 * p.x() + 1, 2 * p.y());
    return 8.0 * w * gw - grho;
  };
  auto beta_at = [=](const Vec2& p) { return svalue(p) < 0 ? bm : bp; };

  ForwardProblemSpec dirichlet;
  dirichlet.material = MaterialModel{bp, {bm}};
  dirichlet.kind = BCKind::Mixed;
  dirichlet.f = field_from(
      [wt](const Vec2& p) {
        return -(32.0 * p.squaredNorm() + 32.0 * wt(p) - 4.0);
      },
      [](const Vec2& p) -> Vec2 { return Vec2(-128.0 * p.x(), -128.0 * p.y()); });
  dirichlet.g_dirichlet =
      field_from([svalue, beta_at](const Vec2& p) { return svalue(p) / beta_at(p); },
                 [sgrad, beta_at](const Vec2& p) { return sgrad(p) / beta_at(p); });

  ForwardProblemSpec neumann = dirichlet;
  neumann.kind = BCKind::PureNeumann;
  neumann.g_neumann = field_from(
      [sgrad](const Vec2& p) { return sgrad(p).dot(boundary_normal(p)); }, nullptr);
  neumann.u0 = memo_domain_integral(
      "table2-case2-u0",
      [svalue, beta_at](const Vec2& p) { return svalue(p) / beta_at(p); });

  cd.objective.kind = ObjectiveSpec::Kind::KohnVogelius;
  cd.objective.problems = {dirichlet, neumann};
  cd.initial_curves = {ellipse_curve(Vec2(0.5, 0.0), kPi / 8, kPi / 4, m)};
  cd.target = {radial_sampler(svalue, Vec2(0.37, 0.0), 0.25)};
  cd.has_exact_solution = true;
  cd.exact_u = [svalue, beta_at](const Vec2& p) { return svalue(p) / beta_at(p); };
  cd.exact_grad_u = [sgrad, beta_at](const Vec2& p) { return sgrad(p) / beta_at(p); };
  return cd;
}

SplineCurve open_graph_curve(const std::vector<double>& ys) {
  const int n = static_cast<int>(ys.size());
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = Vec2(-1.0 + 2.0 * i / (n - 1), ys[i]);
  std::vector<std::pair<int, int>> dmap;
  for (int i = 1; i + 1 < n; ++i) dmap.push_back({i, 1});  // interior y-coordinates
  return SplineCurve(pts, false, dmap);
}

CaseDefinition table2_case3(int m) {
  CaseDefinition cd;
  cd.name = "table2-case3";
  const double bm = 1.0, bp = 2.0;
  auto svalue = [](const Vec2& p) {
    return std::sin(kPi * p.x()) + kPi / 1.5 * p.y() + 0.1;
  };
  auto sgrad = [](const Vec2& p) -> Vec2 {
    return Vec2(kPi * std::cos(kPi * p.x()), kPi / 1.5);
  };
  auto beta_at = [=](const Vec2& p) { return svalue(p) < 0 ? bm : bp; };

  ForwardProblemSpec dirichlet;
  dirichlet.material = MaterialModel{bp, {bm}};
  dirichlet.kind = BCKind::Mixed;
  dirichlet.f = field_from(
      [](const Vec2& p) { return kPi * kPi * std::sin(kPi * p.x()); },
      [](const Vec2& p) -> Vec2 {
        return Vec2(std::pow(kPi, 3) * std::cos(kPi * p.x()), 0.0);
      });
  dirichlet.g_dirichlet =
      field_from([svalue, beta_at](const Vec2& p) { return svalue(p) / beta_at(p); },
                 [sgrad, beta_at](const Vec2& p) { return sgrad(p) / beta_at(p); });

  ForwardProblemSpec mixed = dirichlet;
  mixed.neumann_sides = (1 << kBottom) | (1 << kTop);
  mixed.g_neumann = field_from(
      [sgrad](const Vec2& p) { return sgrad(p).dot(boundary_normal(p)); }, nullptr);

  cd.objective.kind = ObjectiveSpec::Kind::KohnVogelius;
  cd.objective.problems = {dirichlet, mixed};
  std::vector<double> ys(m, -0.15 / kPi);
  cd.initial_curves = {open_graph_curve(ys)};
  cd.target = {[](double t) -> Vec2 {
    const double x = -1.0 + 2.0 * t;
    return Vec2(x, -1.5 / kPi * (std::sin(kPi * x) + 0.1));
  }};
  cd.has_exact_solution = true;
  cd.exact_u = [svalue, beta_at](const Vec2& p) { return svalue(p) / beta_at(p); };
  cd.exact_grad_u = [sgrad, beta_at](const Vec2& p) { return sgrad(p) / beta_at(p); };
  return cd;
}

CaseDefinition heat_case(int m, double theta = 0.5) {
  CaseDefinition cd;
  cd.name = "heat";
  ForwardProblemSpec fp;
  fp.material = MaterialModel{1e-3, {1.0}};
  fp.kind = BCKind::Mixed;
  fp.f = field_from(
      [](const Vec2& p) {
        return (std::abs(p.x()) <= 0.1 && std::abs(p.y()) <= 0.1) ? -1.0 : 0.0;
      },
      [](const Vec2&) { return Vec2::Zero(); });
  fp.g_dirichlet = Field::zero();

  cd.objective.kind = ObjectiveSpec::Kind::HeatDissipation;
  cd.objective.theta = theta;
  cd.objective.problems = {fp};
  cd.initial_curves = {circle_curve(Vec2(0, 0), 0.82, m)};
  return cd;
}

CaseDefinition gradcheck_ols(int m) {
  CaseDefinition cd;
  cd.name = "gradcheck-ols";
  ForwardProblemSpec fp;
  fp.material = MaterialModel{5.0, {2.0}};
  fp.kind = BCKind::Mixed;
  fp.f = field_from([](const Vec2& p) { return 1.0 + 0.2 * p.x() + 0.4 * p.y(); },
                    [](const Vec2&) { return Vec2(0.2, 0.4); });
  fp.g_dirichlet = field_from([](const Vec2& p) { return p.x() - p.y() + 0.1; },
                              [](const Vec2&) { return Vec2(1.0, -1.0); });

  cd.objective.kind = ObjectiveSpec::Kind::OutputLeastSquares;
  cd.objective.omega0 = Rect{-0.5, 0.0, 1.0, 1.0};
  cd.objective.ubar = field_from(
      [](const Vec2& p) { return p.x() * p.x() + 0.5 * p.x() * p.y() - p.y() + 0.3; },
      [](const Vec2& p) { return Vec2(2 * p.x() + 0.5 * p.y(), 0.5 * p.x() - 1.0); });
  cd.objective.problems = {fp};

  std::vector<Vec2> pts(m);
  for (int k = 0; k < m; ++k) {
    const double th = 2 * kPi * k / m;
    const double r = 0.55 + 0.08 * std::cos(3 * th);
    pts[k] = Vec2(0.05, -0.03) + r * Vec2(std::cos(th), std::sin(th));
  }
  cd.initial_curves = {SplineCurve(pts, true)};
  return cd;
}

CaseDefinition gradcheck_kv(int m) {
  CaseDefinition cd;
  cd.name = "gradcheck-kv";
  ForwardProblemSpec dirichlet;
  dirichlet.material = MaterialModel{1.5, {3.0}};
  dirichlet.kind = BCKind::Mixed;
  dirichlet.f = field_from([](const Vec2& p) { return 0.5 * p.x() + 0.7 * p.y() - 0.1; },
                           [](const Vec2&) { return Vec2(0.5, 0.7); });
  dirichlet.g_dirichlet = field_from(
      [](const Vec2& p) {
        return 0.3 * p.x() * p.x() - 0.2 * p.y() * p.y() + 0.5 * p.y() + 0.1;
      },
      [](const Vec2& p) { return Vec2(0.6 * p.x(), -0.4 * p.y() + 0.5); });

  ForwardProblemSpec mixed = dirichlet;
  mixed.neumann_sides = (1 << kBottom) | (1 << kTop);
  mixed.g_neumann = field_from([](const Vec2& p) { return 0.4 + 0.3 * p.x() - 0.2 * p.y(); },
                               [](const Vec2&) { return Vec2(0.3, -0.2); });

  cd.objective.kind = ObjectiveSpec::Kind::KohnVogelius;
  cd.objective.problems = {dirichlet, mixed};

  // open curve from the left boundary to the bottom boundary, generic position
  // (fixed at 8 control points; m is ignored here)
  (void)m;
  std::vector<Vec2> pts = {{-1.0, 0.23},  {-0.77, 0.17}, {-0.52, 0.06}, {-0.27, -0.11},
                           {-0.02, -0.31}, {0.09, -0.57}, {0.19, -0.83}, {0.31, -1.0}};
  std::vector<std::pair<int, int>> dmap;
  for (int i = 1; i + 1 < static_cast<int>(pts.size()); ++i) {
    dmap.push_back({i, 0});
    dmap.push_back({i, 1});
  }
  cd.initial_curves = {SplineCurve(pts, false, dmap)};
  return cd;
}

CaseDefinition gradcheck_heat(int m) {
  CaseDefinition cd = heat_case(m);
  cd.name = "gradcheck-heat";
  std::vector<Vec2> pts(m);
  for (int k = 0; k < m; ++k) {
    const double th = 2 * kPi * k / m;
    const double r = 0.6 + 0.05 * std::cos(2 * th + 0.3);
    pts[k] = Vec2(0.02, 0.01) + r * Vec2(std::cos(th), std::sin(th));
  }
  cd.initial_curves = {SplineCurve(pts, true)};
  return cd;
}

}  // namespace

std::vector<SplineCurve> CaseDefinition::true_curves(int points_per_curve) const {
  std::vector<SplineCurve> out;
  for (size_t c = 0; c < target.size(); ++c) {
    std::vector<Vec2> pts;
    const bool open = !initial_curves.empty() && !initial_curves[c].closed();
    if (open) {
      for (int k = 0; k < points_per_curve; ++k)
        pts.push_back(target[c](static_cast<double>(k) / (points_per_curve - 1)));
      std::vector<std::pair<int, int>> dmap;
      for (int i = 1; i + 1 < points_per_curve; ++i) dmap.push_back({i, 1});
      out.emplace_back(pts, false, dmap);
    } else {
      for (int k = 0; k < points_per_curve; ++k)
        pts.push_back(target[c](static_cast<double>(k) / points_per_curve));
      out.emplace_back(pts, true);
    }
  }
  return out;
}

std::vector<Vec2> CaseDefinition::target_polyline(int curve, int samples) const {
  std::vector<Vec2> pts;
  pts.reserve(samples + 1);
  for (int k = 0; k <= samples; ++k)
    pts.push_back(target.at(curve)(static_cast<double>(k) / samples));
  return pts;
}

std::vector<std::string> case_names() {
  return {"table1-case1", "table1-case2", "table1-case3", "table2-case1", "table2-case2",
          "table2-case3", "heat",         "gradcheck-ols", "gradcheck-kv", "gradcheck-heat"};
}

CaseDefinition make_case(const std::string& name, int control_points) {
  if (control_points < 4) throw InvalidArgument("make_case: need at least 4 control points");
  if (name == "table1-case1") return table1_case1(control_points);
  if (name == "table1-case2") return table1_case2(control_points);
  if (name == "table1-case3") return table1_case3(control_points);
  if (name == "table2-case1") return table2_case1(control_points);
  if (name == "table2-case2") return table2_case2(control_points);
  if (name == "table2-case3") return table2_case3(control_points);
  if (name == "heat") return heat_case(control_points);
  if (name == "gradcheck-ols") return gradcheck_ols(control_points);
  if (name == "gradcheck-kv") return gradcheck_kv(control_points);
  if (name == "gradcheck-heat") return gradcheck_heat(control_points);
  throw InvalidArgument("make_case: unknown case '" + name + "'");
}

CaseDefinition make_inline_case(const InlineCaseParams& params, int control_points) {
  CaseDefinition cd;
  cd.name = "inline-" + params.family;
  if (params.family == "heat-circle") {
    cd = heat_case(control_points, params.theta);
    cd.name = "inline-heat-circle";
    cd.objective.problems[0].material = MaterialModel{params.beta_plus, {params.beta_minus}};
    cd.initial_curves = {circle_curve(params.initial_center, params.initial_radius,
                                      control_points)};
    return cd;
  }
  const RadialCase rc{kPi * kPi * kPi * kPi,  // unit-scale coefficients
                      params.beta_minus,
                      params.beta_plus,
                      params.target_center,
                      1.0 / (params.target_rx * params.target_rx / (kPi * kPi)),
                      1.0 / (params.target_ry * params.target_ry / (kPi * kPi))};
  ForwardProblemSpec dirichlet;
  dirichlet.material = MaterialModel{params.beta_plus, {params.beta_minus}};
  dirichlet.kind = BCKind::Mixed;
  dirichlet.f = field_from([rc](const Vec2& p) { return rc.f(p); },
                           [rc](const Vec2& p) { return rc.grad_f(p); });
  dirichlet.g_dirichlet = field_from([rc](const Vec2& p) { return rc.u(p); },
                                     [rc](const Vec2& p) { return rc.grad_u(p); });
  cd.target = {[rc, params](double t) -> Vec2 {
    const double th = 2 * kPi * t;
    return rc.center + Vec2(params.target_rx * std::cos(th), params.target_ry * std::sin(th));
  }};
  cd.has_exact_solution = true;
  cd.exact_u = [rc](const Vec2& p) { return rc.u(p); };
  cd.exact_grad_u = [rc](const Vec2& p) { return rc.grad_u(p); };
  cd.initial_curves = {circle_curve(params.initial_center, params.initial_radius,
                                    control_points)};
  if (params.family == "ols-circle") {
    cd.objective.kind = ObjectiveSpec::Kind::OutputLeastSquares;
    cd.objective.omega0 = Rect{};
    cd.objective.ubar = dirichlet.g_dirichlet;
    cd.objective.problems = {dirichlet};
    return cd;
  }
  if (params.family == "kv-circle") {
    ForwardProblemSpec neumann = dirichlet;
    neumann.kind = BCKind::PureNeumann;
    neumann.g_neumann = field_from(
        [rc](const Vec2& p) { return rc.flux_dot(p, boundary_normal(p)); }, nullptr);
    neumann.u0 = integrate_domain([rc](const Vec2& p) { return rc.u(p); }, 256);
    cd.objective.kind = ObjectiveSpec::Kind::KohnVogelius;
    cd.objective.problems = {dirichlet, neumann};
    return cd;
  }
  throw InvalidArgument("make_inline_case: unknown family '" + params.family + "'");
}

}  // namespace ifex
