#include "ifex/pipeline.hpp"

#include <cmath>

#include "ifex/quadrature.hpp"

namespace ifex {

Pipeline::Pipeline(Mesh mesh, ObjectiveSpec objective, std::vector<SplineCurve> initial_curves,
                   int threads)
    : mesh_(std::move(mesh)),
      objective_(std::move(objective)),
      initial_(std::move(initial_curves)),
      layout_(DesignLayout::of(initial_)),
      threads_(threads) {
  if (objective_.problems.empty()) throw ContractError("Pipeline: no forward problems");
}

std::vector<double> Pipeline::initial_alpha() const {
  std::vector<double> alpha;
  for (const auto& c : initial_) {
    const auto part = c.design_vector();
    alpha.insert(alpha.end(), part.begin(), part.end());
  }
  return alpha;
}

std::vector<SplineCurve> Pipeline::curves_at(const std::vector<double>& alpha) const {
  if (static_cast<int>(alpha.size()) != layout_.total())
    throw InvalidArgument("Pipeline: design vector size mismatch");
  std::vector<SplineCurve> curves;
  curves.reserve(initial_.size());
  for (size_t c = 0; c < initial_.size(); ++c) {
    const int lo = layout_.curve_offset[c];
    const int hi = layout_.curve_offset[c + 1];
    curves.push_back(initial_[c].with_design({alpha.begin() + lo, alpha.begin() + hi}));
  }
  return curves;
}

double Pipeline::motion(const std::vector<double>& a, const std::vector<double>& b) const {
  // per-control-point displacement; unpaired coordinates count individually
  double worst = 0.0;
  for (size_t c = 0; c < initial_.size(); ++c) {
    const auto& map = initial_[c].design_map();
    std::vector<Vec2> d(initial_[c].point_count(), Vec2::Zero());
    for (size_t j = 0; j < map.size(); ++j) {
      const int g = layout_.curve_offset[c] + static_cast<int>(j);
      d[map[j].first][map[j].second] = b[g] - a[g];
    }
    for (const Vec2& v : d) worst = std::max(worst, v.norm());
  }
  return worst;
}

std::uint64_t Pipeline::topology_signature(const std::vector<double>& alpha) const {
  const InterfaceTopology topo = classify(mesh_, curves_at(alpha));
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (const ElementCut& cut : topo.cuts) {
    mix(static_cast<std::uint64_t>(cut.element));
    mix(static_cast<std::uint64_t>(cut.curve));
  }
  return h;
}

Evaluation Pipeline::evaluate(const std::vector<double>& alpha, bool with_gradient) const {
  Evaluation ev;
  ev.curves = curves_at(alpha);
  for (const auto& c : ev.curves)
    if (c.closed() && c.self_intersects())
      throw GeometryError("evaluate: trial curve self-intersects");
  ev.topo = classify(mesh_, ev.curves);
  const BasisCache cache = build_basis(mesh_, ev.topo, objective_.problems[0].material);

  const int kk = objective_.forward_count();
  ev.states.stamp = ev.topo.stamp;
  std::vector<FactoredOperator> ops(kk);
  for (int k = 0; k < kk; ++k) {
    const ForwardProblemSpec& spec = objective_.problems[k];
    ev.systems.push_back(assemble(mesh_, ev.topo, cache, spec));
    AssembledSystem& sys = ev.systems.back();
    ops[k] = FactoredOperator(spec.kind == BCKind::PureNeumann
                                  ? FactoredOperator::Kind::SymmetricIndefinite
                                  : FactoredOperator::Kind::SPD);
    ops[k].factor(sys.A);
    ev.states.reduced.push_back(ops[k].solve(sys.F));
    ev.states.nodal.push_back(sys.nodal_values(ev.states.reduced.back()));
  }

  const ObjectiveContext ctx = build_objective_context(mesh_, ev.topo, cache, objective_);
  ev.j = eval_objective(objective_, ctx, ev.systems, ev.states);

  if (with_gradient) {
    const auto dj = objective_du(objective_, ctx, ev.systems, ev.states);
    std::vector<Eigen::VectorXd> adjoints(kk);
    std::vector<const ForwardProblemSpec*> specs(kk);
    std::vector<const AssembledSystem*> systems(kk);
    for (int k = 0; k < kk; ++k) {
      adjoints[k] = ops[k].solve_adjoint(dj[k]);
      specs[k] = &objective_.problems[k];
      systems[k] = &ev.systems[k];
    }
    ev.gradient = material_derivative(
        ev.curves, layout_, mesh_, ev.topo, cache, specs, systems, ev.states.reduced, adjoints,
        [&](int j, const PerDesignDerivatives& pd) {
          return explicit_terms_j(objective_, ctx, ev.topo, cache, ev.states, pd);
        },
        threads_);
  }
  return ev;
}

ForwardSolve solve_forward(const Mesh& mesh, const std::vector<SplineCurve>& curves,
                           const ForwardProblemSpec& spec) {
  ForwardSolve fs;
  fs.topo = std::make_shared<InterfaceTopology>(classify(mesh, curves));
  fs.cache = build_basis(mesh, *fs.topo, spec.material);
  fs.sys = assemble(mesh, *fs.topo, fs.cache, spec);
  FactoredOperator op(spec.kind == BCKind::PureNeumann
                          ? FactoredOperator::Kind::SymmetricIndefinite
                          : FactoredOperator::Kind::SPD);
  op.factor(fs.sys.A);
  fs.reduced = op.solve(fs.sys.F);
  fs.nodal = fs.sys.nodal_values(fs.reduced);
  return fs;
}

std::pair<double, double> error_norms(const Mesh& mesh, const BasisCache& cache,
                                      const Eigen::VectorXd& nodal,
                                      const std::function<double(const Vec2&)>& exact,
                                      const std::function<Vec2(const Vec2&)>& exact_grad) {
  double l2 = 0.0, h1 = 0.0;
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    const ElementBasis b = cache.basis_of(static_cast<int>(e));
    auto accumulate = [&](const std::array<Vec2, 3>& tri, bool minus) {
      const double area = quad::tri_area(tri[0], tri[1], tri[2]);
      for (const auto& gp : quad::tri7()) {
        const Vec2 x = gp.l1 * tri[0] + gp.l2 * tri[1] + gp.l3 * tri[2];
        double uh = 0.0;
        Vec2 guh = Vec2::Zero();
        for (int p = 0; p < 3; ++p) {
          const Affine2& a = minus ? b.shape[p].minus : b.shape[p].plus;
          uh += nodal(b.vertex_ids[p]) * a(x);
          guh += nodal(b.vertex_ids[p]) * a.g;
        }
        const double de = uh - exact(x);
        l2 += gp.w * area * de * de;
        h1 += gp.w * area * (guh - exact_grad(x)).squaredNorm();
      }
    };
    if (!b.interface) {
      accumulate(b.verts, false);
    } else {
      for (int m = 0; m < 3; ++m) accumulate(b.geom.subtri[m], b.geom.subtri_minus[m]);
    }
  }
  return {std::sqrt(l2), std::sqrt(h1)};
}

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  auto one_sided = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
    double worst = 0.0;
    for (const Vec2& p : from) {
      double best = 1e300;
      for (const Vec2& q : to) best = std::min(best, (p - q).squaredNorm());
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace ifex
