#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "ifex/types.hpp"

namespace ifex {

// One cubic piece in a local coordinate s in [0,1]: c0 + c1 s + c2 s^2 + c3 s^3.
struct CubicPiece {
  std::array<double, 4> c{0, 0, 0, 0};
  double value(double s) const { return c[0] + s * (c[1] + s * (c[2] + s * c[3])); }
  double deriv(double s) const { return c[1] + s * (2 * c[2] + s * 3 * c[3]); }
};

// Interpolating C^2 cubic spline through scalar data at uniform knots.
// Closed splines use periodic end conditions, open splines natural ones.
// Construction is linear in the data, so the cardinal splines (unit data
// vectors) give exact derivatives with respect to any single data value.
class Spline1D {
 public:
  Spline1D() = default;
  Spline1D(const std::vector<double>& data, bool closed);

  double value(double t) const;
  double deriv(double t) const;  // d/dt with knots t_i = i / n_pieces

  int piece_count() const { return static_cast<int>(pieces_.size()); }
  const CubicPiece& piece(int i) const { return pieces_[i]; }
  bool closed() const { return closed_; }

  // Map a global parameter to (piece index, local s).
  std::pair<int, double> locate(double t) const;

 private:
  bool closed_ = true;
  std::vector<CubicPiece> pieces_;
};

struct IntersectionRecord {
  double t_hat = 0.0;   // spline parameter
  Vec2 point = Vec2::Zero();
  int edge = -1;        // mesh edge id, filled by the caller
  int segment = -1;     // spline piece index
  double edge_param = 0.0;  // position along the queried segment, in [0,1]
  bool tangential = false;
};

// Parametric interface curve Gamma(t, alpha). Control-point coordinates listed
// in design_map are the design variables; the rest stay fixed.
class SplineCurve {
 public:
  SplineCurve() = default;
  // design_map entries are (point index, axis) with axis 0 = x, 1 = y.
  // An empty design_map means every coordinate of every point is designable.
  SplineCurve(std::vector<Vec2> control_points, bool closed,
              std::vector<std::pair<int, int>> design_map = {});

  bool closed() const { return closed_; }
  int point_count() const { return static_cast<int>(points_.size()); }
  const std::vector<Vec2>& control_points() const { return points_; }
  int design_count() const { return static_cast<int>(design_map_.size()); }
  const std::vector<std::pair<int, int>>& design_map() const { return design_map_; }

  std::vector<double> design_vector() const;
  SplineCurve with_design(const std::vector<double>& alpha) const;

  Vec2 eval(double t) const;
  Vec2 tangent(double t) const;                   // d Gamma / d t
  Vec2 d_alpha(double t, int j) const;            // (dx/d alpha_j, dy/d alpha_j)
  double cardinal(int point_index, double t) const;
  double cardinal_deriv(int point_index, double t) const;

  int piece_count() const { return x_.piece_count(); }
  // Coefficients of n_edge . Gamma_piece(s) - c as a cubic in s.
  std::array<double, 4> piece_projection(int piece, const Vec2& n, double c) const;

  // All intersections of the curve with segment [e1, e2].
  std::vector<IntersectionRecord> intersect_edge(const Vec2& e1, const Vec2& e2) const;

  // Signed area by Green's theorem (positive for counterclockwise loops).
  double signed_area() const;
  double enclosed_area() const;                       // closed, simple curves only
  std::vector<double> enclosed_area_gradient() const; // d|area|/d alpha, over the design map

  bool self_intersects() const;
  // +1 when the minus side (inside for counterclockwise closed curves) lies to
  // the left of the direction of travel, -1 otherwise. Callers may flip it.
  int orientation() const;

 private:
  void build();

  std::vector<Vec2> points_;
  bool closed_ = true;
  std::vector<std::pair<int, int>> design_map_;
  Spline1D x_, y_;
  // cardinal_[k] is the spline interpolating the k-th unit data vector
  std::vector<Spline1D> cardinal_;
};

// Real roots of c0 + c1 s + c2 s^2 + c3 s^3 in [lo, hi]; second member of each
// pair marks (near-)double roots.
std::vector<std::pair<double, bool>> cubic_roots_in(const std::array<double, 4>& c, double lo,
                                                    double hi);

std::vector<Vec2> sample_circle(const Vec2& center, double radius, int n);
std::vector<Vec2> sample_ellipse(const Vec2& center, double rx, double ry, int n);

}  // namespace ifex
