#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace cavity {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

/// Twice the signed area of (a, b, c); positive for counter-clockwise order.
inline double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

double signed_area(const Polygon& poly);

/// Even-odd rule; points on the boundary may go either way.
bool point_in_polygon(const Polygon& poly, const Vec2& p);

/// Distance from p to the closed segment [a, b].
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Proper crossing point of [a,b] and [c,d] (interiors intersect in one point).
std::optional<Vec2> segment_crossing(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// True when no two non-adjacent edges touch and adjacent edges only share their vertex.
bool is_simple_polygon(const Polygon& poly);

/// Vertices of a semicircle polyline of radius r from angle 0 to pi (n+1 points).
Polygon semicircle_polyline(double r, int n);

/// Closed half-disc polygon: semicircle polyline followed by the diameter.
Polygon half_disc_polygon(double r, int n);

/// Radial projection of the direction (cos phi, sin phi) onto the semicircle
/// polyline of radius r with n segments (the point of the polyline at angle phi).
Vec2 polyline_point_at_angle(double r, int n, double phi);

}  // namespace cavity
