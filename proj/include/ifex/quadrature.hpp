#pragma once

#include <array>

#include "ifex/types.hpp"

namespace ifex::quad {

struct TriPoint {
  double l1, l2, l3;  // barycentric
  double w;           // weight relative to triangle area
};

// 7-point rule, exact through degree 5.
inline const std::array<TriPoint, 7>& tri7() {
  static const std::array<TriPoint, 7> pts = [] {
    const double a1 = 0.0597158717897698, b1 = 0.4701420641051151;
    const double a2 = 0.7974269853530873, b2 = 0.1012865073234563;
    const double w0 = 0.225;
    const double w1 = 0.1323941527885062, w2 = 0.1259391805448271;
    return std::array<TriPoint, 7>{{{1.0 / 3, 1.0 / 3, 1.0 / 3, w0},
                                    {a1, b1, b1, w1},
                                    {b1, a1, b1, w1},
                                    {b1, b1, a1, w1},
                                    {a2, b2, b2, w2},
                                    {b2, a2, b2, w2},
                                    {b2, b2, a2, w2}}};
  }();
  return pts;
}

inline double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return 0.5 * std::abs(cross2(b - a, c - a));
}

// Integrate f over triangle (a,b,c) with the degree-5 rule.
template <class F>
double tri_integrate(const Vec2& a, const Vec2& b, const Vec2& c, F&& f) {
  const double area = tri_area(a, b, c);
  double s = 0.0;
  for (const auto& p : tri7()) {
    const Vec2 x = p.l1 * a + p.l2 * b + p.l3 * c;
    s += p.w * f(x);
  }
  return s * area;
}

// Gauss-Legendre abscissas/weights on [-1,1].
struct GL {
  const double* x;
  const double* w;
  int n;
};

inline GL gauss_legendre(int n) {
  static const double x4[] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                              0.8611363115940526};
  static const double w4[] = {0.3478548451374539, 0.6521451548625461, 0.6521451548625461,
                              0.3478548451374539};
  static const double x8[] = {-0.9602898564975362, -0.7966664774136267, -0.5255324099163290,
                              -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                              0.7966664774136267,  0.9602898564975362};
  static const double w8[] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                              0.2223810344533745, 0.1012285362903763};
  static const double x16[] = {
      -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
      -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
      0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
      0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
  static const double w16[] = {
      0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
      0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
      0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
      0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
  switch (n) {
    case 4:
      return {x4, w4, 4};
    case 8:
      return {x8, w8, 8};
    case 16:
      return {x16, w16, 16};
    default:
      throw InvalidArgument("gauss_legendre: unsupported point count");
  }
}

// Integrate f along segment [p,q].
template <class F>
double seg_integrate(const Vec2& p, const Vec2& q, F&& f, int n = 8) {
  const GL gl = gauss_legendre(n);
  const double half_len = 0.5 * (q - p).norm();
  double s = 0.0;
  for (int i = 0; i < gl.n; ++i) {
    const double u = 0.5 * (gl.x[i] + 1.0);
    const Vec2 x = p + u * (q - p);
    s += gl.w[i] * f(x);
  }
  return s * half_len;
}

}  // namespace ifex::quad
