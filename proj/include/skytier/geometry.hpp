#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace skytier::geometry {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
double distance(Point2 a, Point2 b);
double squared_distance(Point2 a, Point2 b);

// Convex polygon with counter-clockwise vertex order. Build through
// make_polygon, which canonicalizes and validates the invariants.
struct ConvexPolygon {
    std::vector<Point2> vertices;
};

// Throws std::invalid_argument unless the cleaned vertex list describes a
// non-degenerate convex polygon. Clockwise input is reversed; duplicate and
// collinear vertices are dropped.
ConvexPolygon make_polygon(std::vector<Point2> vertices);

double polygon_area(const ConvexPolygon& poly);
Point2 polygon_centroid(const ConvexPolygon& poly);

// Second polar moment of area about the polygon centroid.
double polygon_polar_moment(const ConvexPolygon& poly);

// Centroid of the density field restricted to the polygon, approximated on a
// fixed barycentric sample grid per fan triangle. The density must be
// non-negative and not identically zero over the polygon.
Point2 weighted_centroid(const ConvexPolygon& poly,
                         const std::function<double(Point2)>& density,
                         int samples_per_axis = 64);

bool polygon_contains(const ConvexPolygon& poly, Point2 p);

struct Aabb {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

Aabb make_aabb(double x_min, double x_max, double y_min, double y_max);
Aabb bounding_box(const ConvexPolygon& poly);

struct OverlapResult {
    double x_overlap = 0.0;
    double y_overlap = 0.0;
    bool overlapped = false;
};

// Axis-aligned overlap law: X_o = max(0, min(x_max) - max(x_min)) and the
// same on y; the boxes overlap exactly when both extents are positive.
OverlapResult aabb_overlap(const Aabb& a, const Aabb& b);

// Area of the intersection between a convex polygon and a box.
double clip_area(const ConvexPolygon& poly, const Aabb& box);

// Clipped Voronoi partition of the bounding polygon. Each returned cell is
// the set of points at least as close to its generator as to any other,
// intersected with bounds; cells[i] corresponds to generators[i]. Throws on
// duplicate generators and on generators outside the bounds.
std::vector<ConvexPolygon> voronoi_partition(std::span<const Point2> generators,
                                             const ConvexPolygon& bounds);

}  // namespace skytier::geometry
