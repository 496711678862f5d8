#include "skytier/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skytier::geometry {

namespace {

constexpr double kEpsMeters = 1e-9;  // absolute tolerance, meter-scale domain

double raw_signed_area(const std::vector<Point2>& v) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2& a = v[i];
        const Point2& b = v[(i + 1) % v.size()];
        acc += cross(a, b);
    }
    return 0.5 * acc;
}

// Distance from b to the line through a and c.
double deviation_from_line(Point2 a, Point2 b, Point2 c) {
    const double base = distance(a, c);
    if (base <= kEpsMeters) return distance(a, b);
    return std::abs(cross(b - a, c - a)) / base;
}

std::vector<Point2> clean_ring(std::vector<Point2> v) {
    // Drop consecutive duplicates (cyclically).
    std::vector<Point2> out;
    for (const Point2& p : v) {
        if (out.empty() || distance(out.back(), p) > kEpsMeters) out.push_back(p);
    }
    while (out.size() > 1 && distance(out.front(), out.back()) <= kEpsMeters) out.pop_back();
    // Drop vertices lying on the segment between their neighbours.
    bool changed = true;
    while (changed && out.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const Point2 a = out[(i + out.size() - 1) % out.size()];
            const Point2 b = out[i];
            const Point2 c = out[(i + 1) % out.size()];
            if (deviation_from_line(a, b, c) <= kEpsMeters) {
                out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return out;
}

// Clips a convex ring against the half-plane dot(n, p) <= c.
std::vector<Point2> clip_halfplane(const std::vector<Point2>& ring, Point2 n, double c) {
    std::vector<Point2> out;
    const std::size_t k = ring.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Point2 a = ring[i];
        const Point2 b = ring[(i + 1) % k];
        const double da = dot(n, a) - c;
        const double db = dot(n, b) - c;
        if (da <= 0.0) out.push_back(a);
        if ((da < 0.0 && db > 0.0) || (da > 0.0 && db <= 0.0)) {
            const double t = da / (da - db);
            out.push_back(a + t * (b - a));
        }
    }
    return out;
}

double ring_area(const std::vector<Point2>& ring) {
    if (ring.size() < 3) return 0.0;
    return raw_signed_area(ring);
}

}  // namespace

double distance(Point2 a, Point2 b) { return std::sqrt(squared_distance(a, b)); }

double squared_distance(Point2 a, Point2 b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

ConvexPolygon make_polygon(std::vector<Point2> vertices) {
    for (const Point2& p : vertices) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("polygon: non-finite vertex");
    }
    if (vertices.size() < 3) throw std::invalid_argument("polygon: fewer than 3 vertices");
    if (raw_signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    std::vector<Point2> ring = clean_ring(std::move(vertices));
    if (ring.size() < 3) throw std::invalid_argument("polygon: degenerate vertex ring");
    // Reflex vertices within a scale-relative band of their neighbours' chord
    // are clipping noise, not concavity; drop them rather than reject the ring.
    double scale = 0.0;
    for (const Point2& p : ring) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    const double flat_tol = std::max(kEpsMeters, scale * 1e-9);
    bool repaired = true;
    while (repaired && ring.size() >= 3) {
        repaired = false;
        for (std::size_t i = 0; i < ring.size(); ++i) {
            const Point2 a = ring[i];
            const Point2 b = ring[(i + 1) % ring.size()];
            const Point2 c = ring[(i + 2) % ring.size()];
            if (cross(b - a, c - b) > 0.0) continue;
            if (deviation_from_line(a, b, c) > flat_tol)
                throw std::invalid_argument("polygon: not strictly convex");
            ring.erase(ring.begin() + static_cast<std::ptrdiff_t>((i + 1) % ring.size()));
            repaired = true;
            break;
        }
    }
    if (ring.size() < 3) throw std::invalid_argument("polygon: degenerate vertex ring");
    return ConvexPolygon{std::move(ring)};
}

double polygon_area(const ConvexPolygon& poly) { return raw_signed_area(poly.vertices); }

Point2 polygon_centroid(const ConvexPolygon& poly) {
    const std::vector<Point2>& v = poly.vertices;
    double a6 = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % v.size()];
        const double w = cross(p, q);
        a6 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (3.0 * a6), cy / (3.0 * a6)};
}

double polygon_polar_moment(const ConvexPolygon& poly) {
    const std::vector<Point2>& v = poly.vertices;
    double j_origin = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2& p = v[i];
        const Point2& q = v[(i + 1) % v.size()];
        const double w = cross(p, q);
        j_origin += w * (p.x * p.x + p.x * q.x + q.x * q.x + p.y * p.y + p.y * q.y + q.y * q.y);
    }
    j_origin /= 12.0;
    const double area = polygon_area(poly);
    const Point2 c = polygon_centroid(poly);
    return j_origin - area * (c.x * c.x + c.y * c.y);
}

Point2 weighted_centroid(const ConvexPolygon& poly,
                         const std::function<double(Point2)>& density, int samples_per_axis) {
    if (samples_per_axis < 1) throw std::invalid_argument("weighted_centroid: bad sample count");
    const Point2 apex = polygon_centroid(poly);
    const int n = samples_per_axis;
    double mass = 0.0, mx = 0.0, my = 0.0;
    const std::vector<Point2>& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 b = v[i];
        const Point2 c = v[(i + 1) % v.size()];
        const double tri_area2 = cross(b - apex, c - apex);  // 2x triangle area
        for (int iu = 0; iu < n; ++iu) {
            const double u = (iu + 0.5) / n;
            for (int iv = 0; iv < n; ++iv) {
                const double w = (iv + 0.5) / n;
                const Point2 p = apex + u * ((b - apex) + w * (c - b));
                const double rho = density(p);
                if (rho < 0.0)
                    throw std::invalid_argument("weighted_centroid: negative density");
                const double dm = rho * u * tri_area2 / (static_cast<double>(n) * n);
                mass += dm;
                mx += dm * p.x;
                my += dm * p.y;
            }
        }
    }
    if (mass <= 0.0)
        throw std::invalid_argument("weighted_centroid: density is identically zero");
    return {mx / mass, my / mass};
}

bool polygon_contains(const ConvexPolygon& poly, Point2 p) {
    const std::vector<Point2>& v = poly.vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % v.size()];
        const double len = distance(a, b);
        if (cross(b - a, p - a) < -kEpsMeters * len) return false;
    }
    return true;
}

Aabb make_aabb(double x_min, double x_max, double y_min, double y_max) {
    if (!(x_min <= x_max) || !(y_min <= y_max))
        throw std::invalid_argument("aabb: min exceeds max");
    return Aabb{x_min, x_max, y_min, y_max};
}

Aabb bounding_box(const ConvexPolygon& poly) {
    Aabb box{poly.vertices[0].x, poly.vertices[0].x, poly.vertices[0].y, poly.vertices[0].y};
    for (const Point2& p : poly.vertices) {
        box.x_min = std::min(box.x_min, p.x);
        box.x_max = std::max(box.x_max, p.x);
        box.y_min = std::min(box.y_min, p.y);
        box.y_max = std::max(box.y_max, p.y);
    }
    return box;
}

OverlapResult aabb_overlap(const Aabb& a, const Aabb& b) {
    OverlapResult r;
    r.x_overlap = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
    r.y_overlap = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
    r.overlapped = r.x_overlap > 0.0 && r.y_overlap > 0.0;
    return r;
}

double clip_area(const ConvexPolygon& poly, const Aabb& box) {
    std::vector<Point2> ring = poly.vertices;
    ring = clip_halfplane(ring, {1.0, 0.0}, box.x_max);
    if (ring.size() < 3) return 0.0;
    ring = clip_halfplane(ring, {-1.0, 0.0}, -box.x_min);
    if (ring.size() < 3) return 0.0;
    ring = clip_halfplane(ring, {0.0, 1.0}, box.y_max);
    if (ring.size() < 3) return 0.0;
    ring = clip_halfplane(ring, {0.0, -1.0}, -box.y_min);
    return std::max(0.0, ring_area(ring));
}

std::vector<ConvexPolygon> voronoi_partition(std::span<const Point2> generators,
                                             const ConvexPolygon& bounds) {
    if (generators.empty()) throw std::invalid_argument("voronoi: no generators");
    for (std::size_t i = 0; i < generators.size(); ++i) {
        if (!polygon_contains(bounds, generators[i]))
            throw std::invalid_argument("voronoi: generator outside bounds");
        for (std::size_t j = i + 1; j < generators.size(); ++j) {
            if (distance(generators[i], generators[j]) <= kEpsMeters)
                throw std::invalid_argument("voronoi: duplicate generators");
        }
    }
    auto cell_ring = [&](std::size_t i, Point2 gi) {
        std::vector<Point2> ring = bounds.vertices;
        for (std::size_t j = 0; j < generators.size() && ring.size() >= 3; ++j) {
            if (j == i) continue;
            // Keep the side closer to generator i: dot(g_j - g_i, p) <= c.
            const Point2 n = generators[j] - gi;
            const double c = dot(n, 0.5 * (gi + generators[j]));
            ring = clip_halfplane(ring, n, c);
        }
        return ring;
    };
    std::vector<ConvexPolygon> cells;
    cells.reserve(generators.size());
    for (std::size_t i = 0; i < generators.size(); ++i) {
        std::vector<Point2> ring = cell_ring(i, generators[i]);
        if (ring.size() < 3) {
            // Near-degenerate layout: retry with a deterministic jitter keyed
            // to the generator index.
            const double angle = 2.399963229728653 * static_cast<double>(i + 1);
            const Point2 jittered = generators[i] +
                                    Point2{kEpsMeters * std::cos(angle), kEpsMeters * std::sin(angle)};
            ring = cell_ring(i, jittered);
        }
        if (ring.size() < 3) throw std::runtime_error("voronoi: degenerate cell");
        cells.push_back(make_polygon(std::move(ring)));
    }
    return cells;
}

}  // namespace skytier::geometry
