#include "cavity/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cavity {

double signed_area(const Polygon& poly) {
  double a = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % n];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * a;
}

bool point_in_polygon(const Polygon& poly, const Vec2& p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

std::optional<Vec2> segment_crossing(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double d1 = orient(c, d, a);
  const double d2 = orient(c, d, b);
  const double d3 = orient(a, b, c);
  const double d4 = orient(a, b, d);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    const double t = d1 / (d1 - d2);
    return a + t * (b - a);
  }
  return std::nullopt;
}

bool is_simple_polygon(const Polygon& poly) {
  const std::size_t n = poly.size();
  if (n < 3) return false;
  const double scale = [&] {
    double s = 0.0;
    for (const auto& p : poly) s = std::max(s, p.cwiseAbs().maxCoeff());
    return std::max(s, 1e-300);
  }();
  const double tol = 1e-12 * scale;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    if ((b - a).norm() <= tol) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Vec2& c = poly[j];
      const Vec2& d = poly[(j + 1) % n];
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (segment_crossing(a, b, c, d)) return false;
      if (adjacent) continue;
      // Touching (vertex on a non-adjacent edge) is not allowed either.
      if (point_segment_distance(c, a, b) <= tol || point_segment_distance(d, a, b) <= tol ||
          point_segment_distance(a, c, d) <= tol || point_segment_distance(b, c, d) <= tol) {
        return false;
      }
    }
  }
  return true;
}

Polygon semicircle_polyline(double r, int n) {
  Polygon out(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double phi = std::numbers::pi * k / n;
    out[k] = Vec2(r * std::cos(phi), r * std::sin(phi));
  }
  // Exact endpoints on the ground line and the apex.
  out[0] = Vec2(r, 0.0);
  out[n] = Vec2(-r, 0.0);
  if (n % 2 == 0) out[n / 2] = Vec2(0.0, r);
  return out;
}

Polygon half_disc_polygon(double r, int n) { return semicircle_polyline(r, n); }

Vec2 polyline_point_at_angle(double r, int n, double phi) {
  const double step = std::numbers::pi / n;
  int k = std::clamp(int(std::floor(phi / step)), 0, n - 1);
  const double a0 = k * step;
  const double a1 = (k + 1) * step;
  const Vec2 p0(r * std::cos(a0), r * std::sin(a0));
  const Vec2 p1(r * std::cos(a1), r * std::sin(a1));
  const Vec2 dir(std::cos(phi), std::sin(phi));
  // Solve s*dir = p0 + t (p1 - p0).
  const Vec2 e = p1 - p0;
  const double den = dir.x() * e.y() - dir.y() * e.x();
  const double s = (p0.x() * e.y() - p0.y() * e.x()) / den;
  return s * dir;
}

}  // namespace cavity
