#pragma once

#include <memory>

#include "ifex/assembly.hpp"
#include "ifex/geometry.hpp"
#include "ifex/mesh.hpp"

namespace ifex::testhelp {

// A classified circle-interface fixture on an n x n mesh.
struct Fixture {
  Mesh mesh;
  std::vector<SplineCurve> curves;
  InterfaceTopology topo;
  BasisCache cache;

  Fixture(int n, double beta_minus, double beta_plus,
          Vec2 center = Vec2(0.013, 0.021), double radius = 0.53, int points = 12)
      : mesh(build_cartesian_mesh(n)),
        curves{SplineCurve(sample_circle(center, radius, points), true)},
        topo(classify(mesh, curves)),
        cache(build_basis(mesh, topo, MaterialModel{beta_plus, {beta_minus}})) {}
};

inline ForwardProblemSpec dirichlet_spec(double beta_minus, double beta_plus, Field f,
                                         Field g_d) {
  ForwardProblemSpec spec;
  spec.material = MaterialModel{beta_plus, {beta_minus}};
  spec.kind = BCKind::Mixed;
  spec.f = std::move(f);
  spec.g_dirichlet = std::move(g_d);
  return spec;
}

}  // namespace ifex::testhelp
