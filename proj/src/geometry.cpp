#include "ifex/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "ifex/quadrature.hpp"

namespace ifex {

namespace {

// Hermite piece from endpoint values/derivatives in local s.
CubicPiece hermite(double p0, double p1, double m0, double m1) {
  CubicPiece out;
  out.c = {p0, m0, 3 * (p1 - p0) - 2 * m0 - m1, 2 * (p0 - p1) + m0 + m1};
  return out;
}

// Derivatives (w.r.t. local s) of the interpolating C^2 spline: tridiagonal
// system m_{i-1} + 4 m_i + m_{i+1} = 3 (p_{i+1} - p_{i-1}), cyclic when closed,
// natural (zero second derivative) ends when open.
Eigen::MatrixXd derivative_operator(int n, bool closed) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  if (closed) {
    for (int i = 0; i < n; ++i) {
      M(i, (i + n - 1) % n) += 1.0;
      M(i, i) += 4.0;
      M(i, (i + 1) % n) += 1.0;
      R(i, (i + 1) % n) += 3.0;
      R(i, (i + n - 1) % n) -= 3.0;
    }
  } else {
    M(0, 0) = 2.0;
    M(0, 1) = 1.0;
    R(0, 1) = 3.0;
    R(0, 0) = -3.0;
    for (int i = 1; i + 1 < n; ++i) {
      M(i, i - 1) = 1.0;
      M(i, i) = 4.0;
      M(i, i + 1) = 1.0;
      R(i, i + 1) = 3.0;
      R(i, i - 1) = -3.0;
    }
    M(n - 1, n - 2) = 1.0;
    M(n - 1, n - 1) = 2.0;
    R(n - 1, n - 1) = 3.0;
    R(n - 1, n - 2) = -3.0;
  }
  return M.partialPivLu().solve(R);
}

std::vector<CubicPiece> build_pieces(const std::vector<double>& data,
                                     const Eigen::VectorXd& derivs, bool closed) {
  const int n = static_cast<int>(data.size());
  const int np = closed ? n : n - 1;
  std::vector<CubicPiece> pieces(np);
  for (int i = 0; i < np; ++i) {
    const int j = (i + 1) % n;
    pieces[i] = hermite(data[i], data[j], derivs(i), derivs(j));
  }
  return pieces;
}

}  // namespace

Spline1D::Spline1D(const std::vector<double>& data, bool closed) : closed_(closed) {
  const int n = static_cast<int>(data.size());
  if (n < (closed ? 3 : 2)) throw InvalidArgument("Spline1D: too few data points");
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p(i) = data[i];
  const Eigen::VectorXd m = derivative_operator(n, closed) * p;
  pieces_ = build_pieces(data, m, closed);
}

std::pair<int, double> Spline1D::locate(double t) const {
  const int np = piece_count();
  if (closed_) {
    t -= std::floor(t);
    int i = static_cast<int>(std::floor(t * np));
    if (i >= np) i = np - 1;
    return {i, t * np - i};
  }
  if (t < -1e-12 || t > 1 + 1e-12) throw InvalidArgument("Spline1D: parameter outside [0,1]");
  t = std::clamp(t, 0.0, 1.0);
  int i = static_cast<int>(std::floor(t * np));
  if (i >= np) i = np - 1;
  return {i, t * np - i};
}

double Spline1D::value(double t) const {
  auto [i, s] = locate(t);
  return pieces_[i].value(s);
}

double Spline1D::deriv(double t) const {
  auto [i, s] = locate(t);
  return pieces_[i].deriv(s) * piece_count();
}

SplineCurve::SplineCurve(std::vector<Vec2> control_points, bool closed,
                         std::vector<std::pair<int, int>> design_map)
    : points_(std::move(control_points)), closed_(closed), design_map_(std::move(design_map)) {
  const int n = point_count();
  if (n < 4) throw InvalidArgument("SplineCurve: need at least 4 control points");
  for (int i = 0; i + 1 < n; ++i) {
    if ((points_[i + 1] - points_[i]).norm() < 1e-12)
      throw InvalidArgument("SplineCurve: duplicate consecutive control points");
  }
  if (closed_ && (points_[0] - points_[n - 1]).norm() < 1e-12)
    throw InvalidArgument("SplineCurve: closed curve repeats its first point");
  if (design_map_.empty()) {
    for (int k = 0; k < n; ++k)
      for (int axis = 0; axis < 2; ++axis) design_map_.push_back({k, axis});
  }
  for (auto [k, axis] : design_map_) {
    if (k < 0 || k >= n || axis < 0 || axis > 1)
      throw InvalidArgument("SplineCurve: design map entry out of range");
  }
  build();
}

void SplineCurve::build() {
  const int n = point_count();
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = points_[i].x();
    ys[i] = points_[i].y();
  }
  x_ = Spline1D(xs, closed_);
  y_ = Spline1D(ys, closed_);
  cardinal_.resize(n);
  std::vector<double> unit(n, 0.0);
  for (int k = 0; k < n; ++k) {
    unit[k] = 1.0;
    cardinal_[k] = Spline1D(unit, closed_);
    unit[k] = 0.0;
  }
}

std::vector<double> SplineCurve::design_vector() const {
  std::vector<double> alpha(design_map_.size());
  for (size_t j = 0; j < design_map_.size(); ++j)
    alpha[j] = points_[design_map_[j].first][design_map_[j].second];
  return alpha;
}

SplineCurve SplineCurve::with_design(const std::vector<double>& alpha) const {
  if (alpha.size() != design_map_.size())
    throw InvalidArgument("SplineCurve::with_design: size mismatch");
  SplineCurve out = *this;
  for (size_t j = 0; j < design_map_.size(); ++j)
    out.points_[design_map_[j].first][design_map_[j].second] = alpha[j];
  out.build();
  return out;
}

Vec2 SplineCurve::eval(double t) const { return {x_.value(t), y_.value(t)}; }

Vec2 SplineCurve::tangent(double t) const { return {x_.deriv(t), y_.deriv(t)}; }

double SplineCurve::cardinal(int point_index, double t) const {
  return cardinal_[point_index].value(t);
}

double SplineCurve::cardinal_deriv(int point_index, double t) const {
  return cardinal_[point_index].deriv(t);
}

Vec2 SplineCurve::d_alpha(double t, int j) const {
  if (j < 0 || j >= design_count()) throw InvalidArgument("SplineCurve::d_alpha: bad index");
  const auto [k, axis] = design_map_[j];
  const double b = cardinal(k, t);
  return axis == 0 ? Vec2(b, 0.0) : Vec2(0.0, b);
}

std::array<double, 4> SplineCurve::piece_projection(int piece, const Vec2& n, double c) const {
  const CubicPiece& px = x_.piece(piece);
  const CubicPiece& py = y_.piece(piece);
  std::array<double, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = n.x() * px.c[i] + n.y() * py.c[i];
  out[0] -= c;
  return out;
}

std::vector<std::pair<double, bool>> cubic_roots_in(const std::array<double, 4>& c, double lo,
                                                    double hi) {
  const double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])});
  std::vector<std::pair<double, bool>> out;
  if (scale == 0.0) return out;  // identically zero: treated as no transversal crossing
  std::array<double, 4> a = c;
  for (double& v : a) v /= scale;

  std::vector<double> roots;
  auto push = [&](double r) { roots.push_back(r); };
  if (std::abs(a[3]) > 1e-13) {
    // depressed cubic s = u - b/(3a)
    const double A = a[3], B = a[2], C = a[1], D = a[0];
    const double shift = -B / (3 * A);
    const double p = (3 * A * C - B * B) / (3 * A * A);
    const double q = (2 * B * B * B - 9 * A * B * C + 27 * A * A * D) / (27 * A * A * A);
    const double disc = q * q / 4 + p * p * p / 27;
    if (disc > 1e-14) {
      const double sq = std::sqrt(disc);
      const double u = std::cbrt(-q / 2 + sq);
      const double v = std::cbrt(-q / 2 - sq);
      push(shift + u + v);
    } else if (disc < -1e-14) {
      const double r = std::sqrt(-p * p * p / 27);
      const double phi = std::acos(std::clamp(-q / (2 * r), -1.0, 1.0));
      const double m = 2 * std::sqrt(-p / 3);
      push(shift + m * std::cos(phi / 3));
      push(shift + m * std::cos((phi + 2 * M_PI) / 3));
      push(shift + m * std::cos((phi + 4 * M_PI) / 3));
    } else {
      // borderline: take the triple/double root candidates
      if (std::abs(q) < 1e-14 && std::abs(p) < 1e-14) {
        push(shift);
      } else {
        push(shift + 3 * q / p);
        push(shift - 3 * q / (2 * p));
      }
    }
  } else if (std::abs(a[2]) > 1e-13) {
    const double disc = a[1] * a[1] - 4 * a[2] * a[0];
    if (disc >= -1e-14) {
      const double sq = std::sqrt(std::max(disc, 0.0));
      push((-a[1] + sq) / (2 * a[2]));
      push((-a[1] - sq) / (2 * a[2]));
    }
  } else if (std::abs(a[1]) > 1e-13) {
    push(-a[0] / a[1]);
  }

  auto poly = [&](double s) { return a[0] + s * (a[1] + s * (a[2] + s * a[3])); };
  auto dpoly = [&](double s) { return a[1] + s * (2 * a[2] + s * 3 * a[3]); };

  std::vector<double> polished;
  for (double r : roots) {
    for (int it = 0; it < 4; ++it) {
      const double d = dpoly(r);
      if (std::abs(d) < 1e-14) break;
      r -= poly(r) / d;
    }
    // snap to the piece endpoints so knot crossings are claimed by exactly
    // one piece under the half-open filter
    if (std::abs(r) < 1e-9) r = 0.0;
    if (std::abs(r - 1.0) < 1e-9) r = 1.0;
    if (r < lo || r > hi) continue;
    if (std::abs(poly(r)) > 1e-9) continue;
    bool dup = false;
    for (double s : polished)
      if (std::abs(s - r) < 1e-9) dup = true;
    if (!dup) polished.push_back(r);
  }
  std::sort(polished.begin(), polished.end());
  for (double r : polished) out.push_back({r, std::abs(dpoly(r)) < 1e-6});
  return out;
}

std::vector<IntersectionRecord> SplineCurve::intersect_edge(const Vec2& e1, const Vec2& e2) const {
  std::vector<IntersectionRecord> records;
  const Vec2 d = e2 - e1;
  const double len = d.norm();
  if (len < 1e-14) return records;
  const Vec2 n(-d.y() / len, d.x() / len);
  const double c = n.dot(e1);
  const int np = piece_count();

  // bounding box of the edge, padded
  const double pad = 1e-9;
  const double ex0 = std::min(e1.x(), e2.x()) - pad, ex1 = std::max(e1.x(), e2.x()) + pad;
  const double ey0 = std::min(e1.y(), e2.y()) - pad, ey1 = std::max(e1.y(), e2.y()) + pad;

  for (int piece = 0; piece < np; ++piece) {
    // prune with the piece's value range (coefficient sum bounds on [0,1])
    const CubicPiece& px = x_.piece(piece);
    const CubicPiece& py = y_.piece(piece);
    const double rx = std::abs(px.c[1]) + std::abs(px.c[2]) + std::abs(px.c[3]);
    const double ry = std::abs(py.c[1]) + std::abs(py.c[2]) + std::abs(py.c[3]);
    if (px.c[0] + rx < ex0 || px.c[0] - rx > ex1 || py.c[0] + ry < ey0 || py.c[0] - ry > ey1)
      continue;

    const bool last = piece == np - 1;
    const double hi = (!closed_ && last) ? 1.0 : 1.0 - 1e-10;
    for (auto [s, tangential] : cubic_roots_in(piece_projection(piece, n, c), 0.0, hi)) {
      const Vec2 p(px.value(s), py.value(s));
      const double u = (p - e1).dot(d) / (len * len);
      if (u < -1e-12 / len || u > 1 + 1e-12 / len) continue;
      IntersectionRecord rec;
      rec.t_hat = (piece + s) / np;
      rec.point = p;
      rec.segment = piece;
      rec.edge_param = std::clamp(u, 0.0, 1.0);
      rec.tangential = tangential;
      records.push_back(rec);
    }
  }
  std::sort(records.begin(), records.end(),
            [](const IntersectionRecord& a, const IntersectionRecord& b) {
              return a.t_hat < b.t_hat;
            });
  return records;
}

double SplineCurve::signed_area() const {
  const auto gl = quad::gauss_legendre(4);
  double area = 0.0;
  for (int i = 0; i < piece_count(); ++i) {
    const CubicPiece& px = x_.piece(i);
    const CubicPiece& py = y_.piece(i);
    double piece_sum = 0.0;
    for (int g = 0; g < gl.n; ++g) {
      const double s = 0.5 * (gl.x[g] + 1.0);
      piece_sum += gl.w[g] * (px.value(s) * py.deriv(s) - py.value(s) * px.deriv(s));
    }
    area += 0.5 * piece_sum * 0.5;  // ds = 1/2 d(gauss), dt factors cancel
  }
  return area;
}

double SplineCurve::enclosed_area() const {
  if (!closed_) throw InvalidArgument("enclosed_area: open curve");
  if (self_intersects()) throw GeometryError("enclosed_area: curve self-intersects");
  return std::abs(signed_area());
}

std::vector<double> SplineCurve::enclosed_area_gradient() const {
  if (!closed_) throw InvalidArgument("enclosed_area_gradient: open curve");
  if (self_intersects()) throw GeometryError("enclosed_area_gradient: curve self-intersects");
  const double sign = signed_area() >= 0 ? 1.0 : -1.0;
  const auto gl = quad::gauss_legendre(4);
  std::vector<double> grad(design_map_.size(), 0.0);
  for (size_t j = 0; j < design_map_.size(); ++j) {
    const auto [k, axis] = design_map_[j];
    const Spline1D& other = axis == 0 ? y_ : x_;
    double s_total = 0.0;
    for (int i = 0; i < piece_count(); ++i) {
      const CubicPiece& b = cardinal_[k].piece(i);
      const CubicPiece& o = other.piece(i);
      double piece_sum = 0.0;
      for (int g = 0; g < gl.n; ++g) {
        const double s = 0.5 * (gl.x[g] + 1.0);
        piece_sum += gl.w[g] * (b.value(s) * o.deriv(s) - o.value(s) * b.deriv(s));
      }
      s_total += 0.5 * piece_sum * 0.5;
    }
    // d(x y' - y x')/d alpha with alpha an x (resp. y) coordinate
    grad[j] = sign * (axis == 0 ? s_total : -s_total);
  }
  return grad;
}

bool SplineCurve::self_intersects() const {
  const int per_piece = 8;
  const int np = piece_count();
  const int m = np * per_piece;
  std::vector<Vec2> pts(m + 1);
  for (int i = 0; i <= m; ++i) {
    double t = static_cast<double>(i) / m;
    if (closed_ && i == m) t = 0.0;
    pts[i] = eval(t);
  }
  auto seg_hit = [](const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
  };
  for (int i = 0; i < m; ++i) {
    for (int j = i + 2; j < m; ++j) {
      if (closed_ && i == 0 && j == m - 1) continue;  // wrap-adjacent
      if (seg_hit(pts[i], pts[i + 1], pts[j], pts[j + 1])) return true;
    }
  }
  return false;
}

int SplineCurve::orientation() const {
  if (closed_) return signed_area() >= 0 ? 1 : -1;
  // open curves: minus side is below; left of travel is below when x decreases
  return (eval(1.0).x() - eval(0.0).x()) >= 0 ? -1 : 1;
}

std::vector<Vec2> sample_circle(const Vec2& center, double radius, int n) {
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2 * M_PI * i / n;
    pts[i] = center + radius * Vec2(std::cos(a), std::sin(a));
  }
  return pts;
}

std::vector<Vec2> sample_ellipse(const Vec2& center, double rx, double ry, int n) {
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) {
    const double a = 2 * M_PI * i / n;
    pts[i] = center + Vec2(rx * std::cos(a), ry * std::sin(a));
  }
  return pts;
}

}  // namespace ifex
