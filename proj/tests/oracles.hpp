#pragma once

// Independent reference implementations the tests compare against. These
// deliberately avoid the library's own formulas and code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "skytier/coverage.hpp"
#include "skytier/demand.hpp"
#include "skytier/geometry.hpp"
#include "skytier/rng.hpp"

namespace oracles {

using skytier::geometry::Aabb;
using skytier::geometry::ConvexPolygon;
using skytier::geometry::Point2;

// Brute-force box intersection on a 1 m grid: walks every unit cell of the
// union bounding box and tests whether the cell center falls strictly inside
// both boxes. Exact for integer-coordinate boxes.
struct RasterOverlap {
    bool overlapped = false;
    double x_extent = 0.0;
    double y_extent = 0.0;
};

inline RasterOverlap raster_overlap(const Aabb& a, const Aabb& b) {
    const int x0 = static_cast<int>(std::floor(std::min(a.x_min, b.x_min)));
    const int x1 = static_cast<int>(std::ceil(std::max(a.x_max, b.x_max)));
    const int y0 = static_cast<int>(std::floor(std::min(a.y_min, b.y_min)));
    const int y1 = static_cast<int>(std::ceil(std::max(a.y_max, b.y_max)));
    auto inside = [](const Aabb& box, double x, double y) {
        return x > box.x_min && x < box.x_max && y > box.y_min && y < box.y_max;
    };
    int x_cells = 0, y_cells = 0;
    bool any = false;
    for (int i = x0; i < x1; ++i) {
        const double cx = i + 0.5;
        bool column_hit = false;
        for (int j = y0; j < y1; ++j) {
            const double cy = j + 0.5;
            if (inside(a, cx, cy) && inside(b, cx, cy)) {
                any = true;
                column_hit = true;
            }
        }
        if (column_hit) ++x_cells;
    }
    for (int j = y0; j < y1; ++j) {
        const double cy = j + 0.5;
        for (int i = x0; i < x1; ++i) {
            if (inside(a, i + 0.5, cy) && inside(b, i + 0.5, cy)) {
                ++y_cells;
                break;
            }
        }
    }
    return RasterOverlap{any, static_cast<double>(x_cells), static_cast<double>(y_cells)};
}

// Monte-Carlo nearest-generator check: samples points inside the bounds and
// verifies each lies in the Voronoi cell of its nearest generator. Samples
// falling within `tie_eps` of a bisector are skipped (either cell is valid).
// Returns the number of violations.
inline int nearest_generator_violations(std::span<const Point2> generators,
                                        std::span<const ConvexPolygon> cells,
                                        const ConvexPolygon& bounds, int samples,
                                        std::uint64_t seed, double tie_eps = 1e-9) {
    skytier::rng::Stream stream(seed);
    const Aabb box = skytier::geometry::bounding_box(bounds);
    int violations = 0;
    int accepted = 0;
    while (accepted < samples) {
        const Point2 p{stream.uniform(box.x_min, box.x_max),
                       stream.uniform(box.y_min, box.y_max)};
        if (!skytier::geometry::polygon_contains(bounds, p)) continue;
        ++accepted;
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        double second = best;
        for (std::size_t g = 0; g < generators.size(); ++g) {
            const double d = skytier::geometry::distance(p, generators[g]);
            if (d < best) {
                second = best;
                best = d;
                nearest = g;
            } else if (d < second) {
                second = d;
            }
        }
        if (second - best <= tie_eps) continue;
        if (!skytier::geometry::polygon_contains(cells[nearest], p)) ++violations;
    }
    return violations;
}

// Quadrature on a dense grid over the bounding box, membership-tested per
// point. Independent of the library's fan-triangulation sampling.
struct GridMoments {
    double area = 0.0;
    Point2 centroid{};
    double polar_moment = 0.0;  // about the centroid
};

inline GridMoments grid_moments(const ConvexPolygon& poly,
                                const std::function<double(Point2)>& density,
                                int resolution) {
    const Aabb box = skytier::geometry::bounding_box(poly);
    const double dx = (box.x_max - box.x_min) / resolution;
    const double dy = (box.y_max - box.y_min) / resolution;
    double mass = 0.0, mx = 0.0, my = 0.0, second = 0.0;
    for (int i = 0; i < resolution; ++i) {
        for (int j = 0; j < resolution; ++j) {
            const Point2 p{box.x_min + (i + 0.5) * dx, box.y_min + (j + 0.5) * dy};
            if (!skytier::geometry::polygon_contains(poly, p)) continue;
            const double w = density ? density(p) : 1.0;
            mass += w;
            mx += w * p.x;
            my += w * p.y;
            second += w * (p.x * p.x + p.y * p.y);
        }
    }
    GridMoments m;
    const double cell = dx * dy;
    m.area = mass * cell;
    if (mass > 0.0) {
        m.centroid = Point2{mx / mass, my / mass};
        m.polar_moment =
            second * cell - m.area * (m.centroid.x * m.centroid.x + m.centroid.y * m.centroid.y);
    }
    return m;
}

// Exhaustive assignment search: walks cells in ascending index order, each
// taking an unused drone or none. The gain is accumulated as a running
// prefix sum in that same ascending order, which is exactly how the library
// folds an assignment score, so the maximum is bit-comparable with it.
inline double exhaustive_best_score(const std::vector<std::vector<double>>& weight) {
    const std::size_t rows = weight.size();
    const std::size_t cols = rows == 0 ? 0 : weight[0].size();
    std::vector<char> used(rows, 0);
    double best = 0.0;
    std::function<void(std::size_t, double)> recurse = [&](std::size_t c, double acc) {
        if (c == cols) {
            best = std::max(best, acc);
            return;
        }
        recurse(c + 1, acc);  // leave cell c unserved
        for (std::size_t r = 0; r < rows; ++r) {
            if (used[r]) continue;
            used[r] = 1;
            recurse(c + 1, acc + weight[r][c]);
            used[r] = 0;
        }
    };
    recurse(0, 0.0);
    return best;
}

// Weight matrix exactly as the matching sees it: footprint at the cell
// target, demand-weighted coverage gain.
inline std::vector<std::vector<double>> target_weight_matrix(
    std::span<const skytier::Drone> drones,
    std::span<const skytier::demand::DemandCell> cells, double tan_half_aperture) {
    std::vector<std::vector<double>> weight(drones.size(),
                                            std::vector<double>(cells.size(), 0.0));
    for (std::size_t r = 0; r < drones.size(); ++r) {
        const auto fp = skytier::coverage::footprint_of(drones[r], tan_half_aperture);
        for (std::size_t c = 0; c < cells.size(); ++c)
            weight[r][c] = skytier::coverage::pair_gain(fp, cells[c], cells[c].target);
    }
    return weight;
}

// Spearman rank correlation with average ranks on ties.
inline double spearman(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = xs.size();
    auto ranks = [n](std::span<const double> v) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> rank(n, 0.0);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = mean_rank;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> rx = ranks(xs);
    const std::vector<double> ry = ranks(ys);
    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_x += rx[i];
        mean_y += ry[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double cov = 0.0, var_x = 0.0, var_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ax = rx[i] - mean_x;
        const double ay = ry[i] - mean_y;
        cov += ax * ay;
        var_x += ax * ax;
        var_y += ay * ay;
    }
    if (var_x <= 0.0 || var_y <= 0.0) return 0.0;
    return cov / std::sqrt(var_x * var_y);
}

}  // namespace oracles
