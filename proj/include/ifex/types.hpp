#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace ifex {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// 2-D affine scalar field a + g.X; the building block for P1 and IFE pieces.
struct Affine2 {
  double a = 0.0;
  Vec2 g = Vec2::Zero();

  double operator()(const Vec2& x) const { return a + g.dot(x); }

  Affine2 operator+(const Affine2& o) const { return {a + o.a, g + o.g}; }
  Affine2 operator-(const Affine2& o) const { return {a - o.a, g - o.g}; }
  Affine2 operator*(double s) const { return {a * s, g * s}; }
  Affine2& operator+=(const Affine2& o) {
    a += o.a;
    g += o.g;
    return *this;
  }
};

inline double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Degenerate cut configurations: node hits, tangency, self-intersection.
// The optimizer treats these as rejectable trial points.
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Also a rejectable trial-point condition for the optimizer's line search.
struct MeshTooCoarseError : GeometryError {
  using GeometryError::GeometryError;
};

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Violated call contract (stale topology stamp, missing state, size mismatch).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace ifex
