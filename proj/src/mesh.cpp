#include "ifex/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <string>

namespace ifex {

double Mesh::element_area(int e) const {
  const auto& el = elements[e];
  return 0.5 * std::abs(cross2(nodes[el[1]] - nodes[el[0]], nodes[el[2]] - nodes[el[0]]));
}

Vec2 Mesh::element_centroid(int e) const {
  const auto& el = elements[e];
  return (nodes[el[0]] + nodes[el[1]] + nodes[el[2]]) / 3.0;
}

Mesh build_cartesian_mesh(int n) {
  if (n < 2) throw InvalidArgument("build_cartesian_mesh: n must be at least 2");
  Mesh m;
  m.n = n;
  const int nn = n + 1;
  m.nodes.resize(nn * nn);
  m.node_boundary_mask.assign(nn * nn, 0);
  for (int j = 0; j < nn; ++j) {
    for (int i = 0; i < nn; ++i) {
      const int id = j * nn + i;
      m.nodes[id] = Vec2(-1.0 + 2.0 * i / n, -1.0 + 2.0 * j / n);
      std::uint8_t mask = 0;
      if (j == 0) mask |= 1 << kBottom;
      if (i == n) mask |= 1 << kRight;
      if (j == n) mask |= 1 << kTop;
      if (i == 0) mask |= 1 << kLeft;
      m.node_boundary_mask[id] = mask;
    }
  }
  m.elements.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = j * nn + i, b = j * nn + i + 1, c = (j + 1) * nn + i + 1, d = (j + 1) * nn + i;
      m.elements.push_back({a, b, c});  // below the diagonal a-c
      m.elements.push_back({a, c, d});  // above it
    }
  }

  std::map<std::pair<int, int>, int> edge_ids;
  m.element_edges.resize(m.elements.size());
  for (size_t e = 0; e < m.elements.size(); ++e) {
    for (int k = 0; k < 3; ++k) {
      const int u = m.elements[e][k], v = m.elements[e][(k + 1) % 3];
      const auto key = std::minmax(u, v);
      auto it = edge_ids.find(key);
      int id;
      if (it == edge_ids.end()) {
        id = static_cast<int>(m.edges.size());
        edge_ids.emplace(key, id);
        Mesh::Edge edge;
        edge.a = key.first;
        edge.b = key.second;
        edge.elem[0] = static_cast<int>(e);
        const std::uint8_t shared = m.node_boundary_mask[edge.a] & m.node_boundary_mask[edge.b];
        edge.boundary_side = -1;
        for (int s = 0; s < 4; ++s)
          if (shared & (1 << s)) edge.boundary_side = s;
        m.edges.push_back(edge);
      } else {
        id = it->second;
        m.edges[id].elem[1] = static_cast<int>(e);
      }
      m.element_edges[e][k] = id;
    }
  }
  return m;
}

Mesh refine_uniform(const Mesh& mesh) { return build_cartesian_mesh(2 * mesh.n); }

namespace {

// Winding number of a closed curve around x, by angle summation over a dense
// polyline. Reliable for points farther from the curve than the sampling gap.
int winding_number(const SplineCurve& curve, const Vec2& x) {
  const int m = std::max(256, curve.piece_count() * 16);
  double total = 0.0;
  Vec2 prev = curve.eval(0.0) - x;
  for (int i = 1; i <= m; ++i) {
    const Vec2 cur = curve.eval(static_cast<double>(i % m) / m) - x;
    total += std::atan2(cross2(prev, cur), prev.dot(cur));
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * M_PI)));
}

}  // namespace

bool point_on_minus_side(const SplineCurve& curve, const Vec2& x) {
  if (curve.closed()) return winding_number(curve, x) != 0;
  // open curve: locate the closest sample and test the side of the tangent
  const int m = std::max(128, curve.piece_count() * 16);
  double best_t = 0.0, best_d = std::numeric_limits<double>::max();
  for (int i = 0; i <= m; ++i) {
    const double t = static_cast<double>(i) / m;
    const double d = (curve.eval(t) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best_t = t;
    }
  }
  const bool left = cross2(curve.tangent(best_t), x - curve.eval(best_t)) > 0;
  return left == (curve.orientation() > 0);
}

InterfaceTopology classify(const Mesh& mesh, const std::vector<SplineCurve>& curves) {
  static std::uint64_t next_stamp = 1;
  InterfaceTopology topo;
  topo.stamp = next_stamp++;
  topo.element_cut.assign(mesh.elements.size(), -1);
  topo.element_region.assign(mesh.elements.size(), -2);
  topo.edge_cut_index.assign(mesh.edges.size(), -1);

  const double h = mesh.h();
  const double eps_node = 1e-10 * h;

  // records per edge, gathered per curve via cell-range pruning
  std::map<int, std::vector<std::pair<int, IntersectionRecord>>> edge_records;
  for (size_t c = 0; c < curves.size(); ++c) {
    const SplineCurve& curve = curves[c];
    const int np = curve.piece_count();
    for (int piece = 0; piece < np; ++piece) {
      // piece value bounds from sampled extrema plus margin
      double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
      for (int k = 0; k <= 8; ++k) {
        const Vec2 p = curve.eval((piece + k / 8.0) / np);
        x0 = std::min(x0, p.x());
        x1 = std::max(x1, p.x());
        y0 = std::min(y0, p.y());
        y1 = std::max(y1, p.y());
      }
      const double pad = 0.51 * h + 0.3 * std::max(x1 - x0, y1 - y0);
      const int i0 = std::max(0, static_cast<int>(std::floor((x0 - pad + 1.0) / h)));
      const int i1 = std::min(mesh.n - 1, static_cast<int>(std::floor((x1 + pad + 1.0) / h)));
      const int j0 = std::max(0, static_cast<int>(std::floor((y0 - pad + 1.0) / h)));
      const int j1 = std::min(mesh.n - 1, static_cast<int>(std::floor((y1 + pad + 1.0) / h)));
      std::set<int> candidate_edges;
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          for (int k = 0; k < 3; ++k) {
            const int lower = 2 * (j * mesh.n + i);
            candidate_edges.insert(mesh.element_edges[lower][k]);
            candidate_edges.insert(mesh.element_edges[lower + 1][k]);
          }
      for (int eid : candidate_edges) {
        const Mesh::Edge& e = mesh.edges[eid];
        const Vec2 p1 = mesh.nodes[e.a], p2 = mesh.nodes[e.b];
        const Vec2 d = p2 - p1;
        const double len = d.norm();
        const Vec2 nrm(-d.y() / len, d.x() / len);
        const bool last = piece == np - 1;
        const double hi = (!curve.closed() && last) ? 1.0 : 1.0 - 1e-10;
        for (auto [s, tangential] :
             cubic_roots_in(curve.piece_projection(piece, nrm, nrm.dot(p1)), 0.0, hi)) {
          const Vec2 pt = curve.eval((piece + s) / np);
          const double u = (pt - p1).dot(d) / (len * len);
          if (u * len < -eps_node || (1.0 - u) * len < -eps_node) continue;
          if (std::abs(u * len) < eps_node || std::abs((1.0 - u) * len) < eps_node) {
            const int node = std::abs(u * len) < eps_node ? e.a : e.b;
            // open-curve endpoints are allowed to terminate on the boundary
            const bool endpoint =
                !curve.closed() && (std::abs(piece + s) < 1e-9 ||
                                    std::abs(piece + s - np) < 1e-9);
            if (!endpoint)
              throw GeometryError("classify: curve passes through mesh node " +
                                  std::to_string(node));
          }
          if (u < 0.0 || u > 1.0) continue;
          if (tangential)
            throw GeometryError("classify: curve tangent to mesh edge " + std::to_string(eid));
          IntersectionRecord rec;
          rec.t_hat = (piece + s) / np;
          rec.point = pt;
          rec.edge = eid;
          rec.segment = piece;
          rec.edge_param = u;
          edge_records[eid].push_back({static_cast<int>(c), rec});
        }
      }
    }
  }

  for (auto& [eid, recs] : edge_records) {
    if (recs.size() > 1)
      throw MeshTooCoarseError("classify: edge " + std::to_string(eid) +
                               " crossed more than once");
  }

  // interface elements: exactly two cut edges sharing a vertex
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    std::vector<std::pair<int, IntersectionRecord>> hits;
    std::vector<int> hit_edges;
    for (int k = 0; k < 3; ++k) {
      const int eid = mesh.element_edges[e][k];
      auto it = edge_records.find(eid);
      if (it != edge_records.end()) {
        hits.push_back(it->second[0]);
        hit_edges.push_back(eid);
      }
    }
    if (hits.empty()) continue;
    if (hits.size() == 1) {
      const auto& curve = curves[hits[0].first];
      if (curve.closed())
        throw MeshTooCoarseError("classify: element " + std::to_string(e) +
                                 " has a single crossing");
      // open curve terminating on the boundary of this element is fine only
      // when the crossing is the endpoint itself sitting on a boundary edge
      const double t = hits[0].second.t_hat;
      if (t > 1e-9 && t < 1.0 - 1e-9)
        throw GeometryError("classify: open curve ends inside element " + std::to_string(e));
      continue;
    }
    if (hits.size() > 2)
      throw MeshTooCoarseError("classify: element " + std::to_string(e) +
                               " crossed more than twice");
    if (hits[0].first != hits[1].first)
      throw GeometryError("classify: two curves cut element " + std::to_string(e) +
                          "; curves too close for this mesh");

    ElementCut cut;
    cut.element = static_cast<int>(e);
    cut.curve = hits[0].first;
    const auto& el = mesh.elements[e];
    // shared vertex of the two cut edges becomes A1
    const Mesh::Edge& e0 = mesh.edges[hit_edges[0]];
    const Mesh::Edge& e1 = mesh.edges[hit_edges[1]];
    int a1 = -1;
    for (int u : {e0.a, e0.b})
      for (int v : {e1.a, e1.b})
        if (u == v) a1 = u;
    if (a1 < 0) throw GeometryError("classify: cut edges do not share a vertex");
    std::array<int, 2> rest{};
    int r = 0;
    for (int k = 0; k < 3; ++k)
      if (el[k] != a1) rest[r++] = el[k];
    // A2 on the P edge, A3 on the Q edge
    auto on_edge = [](const Mesh::Edge& ed, int v) { return ed.a == v || ed.b == v; };
    int a2 = rest[0], a3 = rest[1];
    int ep = hit_edges[0], eq = hit_edges[1];
    IntersectionRecord rp = hits[0].second, rq = hits[1].second;
    if (!on_edge(e0, a2)) {
      std::swap(ep, eq);
      std::swap(rp, rq);
    }
    cut.vertex = {a1, a2, a3};
    cut.edge_p = ep;
    cut.edge_q = eq;
    cut.rec_p = rp;
    cut.rec_q = rq;

    const SplineCurve& curve = curves[cut.curve];
    const Vec2 tau = curve.tangent(rp.t_hat);
    const bool a1_left = cross2(tau, mesh.nodes[a1] - rp.point) > 0;
    cut.a1_minus = a1_left == (curve.orientation() > 0);

    topo.element_cut[e] = static_cast<int>(topo.cuts.size());
    topo.element_region[e] = -1;
    topo.cuts.push_back(cut);
  }

  for (auto& [eid, recs] : edge_records) {
    EdgeCut ec;
    ec.edge = eid;
    ec.curve = recs[0].first;
    ec.rec = recs[0].second;
    topo.edge_cut_index[eid] = static_cast<int>(topo.edge_cuts.size());
    topo.edge_cuts.push_back(ec);
  }

  // flood side labels from interface elements across uncut edges
  std::deque<int> queue;
  auto assign = [&](int elem, int region) {
    if (topo.element_region[elem] == -2) {
      topo.element_region[elem] = region;
      queue.push_back(elem);
    } else if (topo.element_region[elem] != region && topo.element_region[elem] != -1) {
      throw GeometryError("classify: inconsistent side labels near element " +
                          std::to_string(elem));
    }
  };
  for (const ElementCut& cut : topo.cuts) {
    // neighbor across the uncut edge (A2, A3) sits on the side opposite A1
    for (int k = 0; k < 3; ++k) {
      const int eid = mesh.element_edges[cut.element][k];
      if (eid == cut.edge_p || eid == cut.edge_q) continue;
      const Mesh::Edge& ed = mesh.edges[eid];
      const int nb = ed.elem[0] == cut.element ? ed.elem[1] : ed.elem[0];
      if (nb < 0 || topo.element_cut[nb] >= 0) continue;
      const bool nb_minus = !cut.a1_minus;
      assign(nb, nb_minus ? cut.curve + 1 : 0);
    }
  }
  while (!queue.empty()) {
    const int e = queue.front();
    queue.pop_front();
    const int region = topo.element_region[e];
    for (int k = 0; k < 3; ++k) {
      const int eid = mesh.element_edges[e][k];
      if (topo.edge_cut_index[eid] >= 0) continue;
      const Mesh::Edge& ed = mesh.edges[eid];
      const int nb = ed.elem[0] == e ? ed.elem[1] : ed.elem[0];
      if (nb < 0 || topo.element_cut[nb] >= 0) continue;
      assign(nb, region);
    }
  }
  // components untouched by any curve fall back to direct point tests
  for (size_t e = 0; e < mesh.elements.size(); ++e) {
    if (topo.element_region[e] != -2) continue;
    const Vec2 x = mesh.element_centroid(static_cast<int>(e));
    int region = 0;
    int inside_count = 0;
    for (size_t c = 0; c < curves.size(); ++c) {
      if (point_on_minus_side(curves[c], x)) {
        region = static_cast<int>(c) + 1;
        ++inside_count;
      }
    }
    if (inside_count > 1) throw GeometryError("classify: nested curves are not supported");
    assign(static_cast<int>(e), region);
    while (!queue.empty()) {
      const int q = queue.front();
      queue.pop_front();
      const int rq = topo.element_region[q];
      for (int k = 0; k < 3; ++k) {
        const int eid = mesh.element_edges[q][k];
        if (topo.edge_cut_index[eid] >= 0) continue;
        const Mesh::Edge& ed = mesh.edges[eid];
        const int nb = ed.elem[0] == q ? ed.elem[1] : ed.elem[0];
        if (nb < 0 || topo.element_cut[nb] >= 0) continue;
        assign(nb, rq);
      }
    }
  }
  return topo;
}

}  // namespace ifex
