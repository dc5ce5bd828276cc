#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ifex/geometry.hpp"
#include "ifex/types.hpp"

namespace ifex {

// Sides of the square domain [-1,1]^2.
enum Side : int { kBottom = 0, kRight = 1, kTop = 2, kLeft = 3 };

// Fixed Cartesian triangulation of (-1,1)^2: N x N squares, each split along
// the lower-left to upper-right diagonal. Immutable after construction.
struct Mesh {
  int n = 0;  // squares per side
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> elements;  // counterclockwise node ids

  struct Edge {
    int a = -1, b = -1;       // node ids, a < b
    int elem[2] = {-1, -1};   // adjacent elements
    int boundary_side = -1;   // Side, or -1 for interior edges
  };
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> element_edges;  // per element: edge ids opposite to nothing in
                                                  // particular; edge k joins vertices k,(k+1)%3
  std::vector<std::uint8_t> node_boundary_mask;   // bit s set when the node lies on side s

  double h() const { return 2.0 / n; }
  Vec2 node(int i) const { return nodes[i]; }
  double element_area(int e) const;
  Vec2 element_centroid(int e) const;
};

Mesh build_cartesian_mesh(int n);
Mesh refine_uniform(const Mesh& mesh);

// Cut data of one interface element arranged so P lies on edge (A1,A2) and Q
// on edge (A1,A3); A1 is the vertex shared by the two cut edges.
struct ElementCut {
  int element = -1;
  int curve = 0;
  std::array<int, 3> vertex{-1, -1, -1};  // global node ids as A1, A2, A3
  int edge_p = -1, edge_q = -1;           // cut edge ids
  IntersectionRecord rec_p, rec_q;
  bool a1_minus = false;  // whether A1 lies on the minus side of the curve
};

struct EdgeCut {
  int edge = -1;
  int curve = 0;
  IntersectionRecord rec;
};

struct InterfaceTopology {
  std::uint64_t stamp = 0;
  std::vector<int> element_cut;    // per element: index into cuts, or -1
  std::vector<int> element_region; // per non-interface element: 0 outside all
                                   // curves, c+1 inside curve c; -1 for cut ones
  std::vector<ElementCut> cuts;
  std::vector<EdgeCut> edge_cuts;
  std::vector<int> edge_cut_index;  // per edge: index into edge_cuts or -1

  bool is_interface(int element) const { return element_cut[element] >= 0; }
  int interface_element_count() const { return static_cast<int>(cuts.size()); }
};

InterfaceTopology classify(const Mesh& mesh, const std::vector<SplineCurve>& curves);
inline InterfaceTopology classify(const Mesh& mesh, const SplineCurve& curve) {
  return classify(mesh, std::vector<SplineCurve>{curve});
}

// Which side of a curve a point falls on: true for the minus side (inside a
// closed curve, below an open one). Robust away from the curve itself.
bool point_on_minus_side(const SplineCurve& curve, const Vec2& x);

}  // namespace ifex
