#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "skytier/geometry.hpp"
#include "skytier/rng.hpp"

using namespace skytier;
using geometry::Aabb;
using geometry::ConvexPolygon;
using geometry::Point2;

namespace {

ConvexPolygon unit_square() {
    return geometry::make_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

ConvexPolygon square(double side) {
    return geometry::make_polygon({{0, 0}, {side, 0}, {side, side}, {0, side}});
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("aabb_overlap disjoint x extents") {
    const auto o = geometry::aabb_overlap(geometry::make_aabb(0, 10, 0, 10),
                                          geometry::make_aabb(20, 30, 0, 10));
    CHECK(o.x_overlap == 0.0);
    CHECK(o.y_overlap == 10.0);
    CHECK_FALSE(o.overlapped);
}

TEST_CASE("aabb_overlap partial") {
    const auto o = geometry::aabb_overlap(geometry::make_aabb(0, 10, 0, 10),
                                          geometry::make_aabb(5, 15, 5, 15));
    CHECK(o.x_overlap == 5.0);
    CHECK(o.y_overlap == 5.0);
    CHECK(o.overlapped);
}

TEST_CASE("aabb_overlap identity") {
    const auto box = geometry::make_aabb(0, 10, 0, 10);
    const auto o = geometry::aabb_overlap(box, box);
    CHECK(o.x_overlap == 10.0);
    CHECK(o.y_overlap == 10.0);
    CHECK(o.overlapped);
}

TEST_CASE("aabb_overlap symmetry and boolean invariant") {
    rng::Stream stream(11);
    for (int k = 0; k < 200; ++k) {
        auto random_box = [&] {
            const double x0 = stream.uniform(0.0, 50.0);
            const double y0 = stream.uniform(0.0, 50.0);
            return geometry::make_aabb(x0, x0 + stream.uniform(0.0, 30.0), y0,
                                       y0 + stream.uniform(0.0, 30.0));
        };
        const Aabb a = random_box();
        const Aabb b = random_box();
        const auto ab = geometry::aabb_overlap(a, b);
        const auto ba = geometry::aabb_overlap(b, a);
        CHECK(ab.x_overlap == ba.x_overlap);
        CHECK(ab.y_overlap == ba.y_overlap);
        CHECK(ab.overlapped == ba.overlapped);
        CHECK(ab.overlapped == (ab.x_overlap > 0.0 && ab.y_overlap > 0.0));
        CHECK(ab.x_overlap >= 0.0);
        CHECK(ab.y_overlap >= 0.0);
    }
}

TEST_CASE("aabb_overlap boolean matches raster oracle on integer boxes") {
    rng::Stream stream(12);
    for (int k = 0; k < 50; ++k) {
        auto random_box = [&] {
            const double x0 = static_cast<double>(stream.uniform_int(40));
            const double y0 = static_cast<double>(stream.uniform_int(40));
            return geometry::make_aabb(x0, x0 + 1.0 + static_cast<double>(stream.uniform_int(20)),
                                       y0, y0 + 1.0 + static_cast<double>(stream.uniform_int(20)));
        };
        const Aabb a = random_box();
        const Aabb b = random_box();
        const auto fast = geometry::aabb_overlap(a, b);
        const auto slow = oracles::raster_overlap(a, b);
        CHECK(fast.overlapped == slow.overlapped);
        if (fast.overlapped) {
            CHECK(fast.x_overlap == doctest::Approx(slow.x_extent).epsilon(1e-12));
            CHECK(fast.y_overlap == doctest::Approx(slow.y_extent).epsilon(1e-12));
        }
    }
}

TEST_CASE("voronoi single generator returns the bounds") {
    const auto cells = geometry::voronoi_partition(std::vector<Point2>{{0.4, 0.6}},
                                                   unit_square());
    REQUIRE(cells.size() == 1);
    CHECK(geometry::polygon_area(cells[0]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("voronoi bisector split of the unit square") {
    const std::vector<Point2> gens{{0.25, 0.5}, {0.75, 0.5}};
    const auto cells = geometry::voronoi_partition(gens, unit_square());
    REQUIRE(cells.size() == 2);
    CHECK(geometry::polygon_area(cells[0]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(geometry::polygon_area(cells[1]) == doctest::Approx(0.5).epsilon(1e-12));
    for (const Point2& v : cells[0].vertices) CHECK(v.x <= 0.5 + 1e-12);
    for (const Point2& v : cells[1].vertices) CHECK(v.x >= 0.5 - 1e-12);
}

TEST_CASE("voronoi nearest-generator membership, union area and errors") {
    rng::Stream stream(21);
    const ConvexPolygon bounds = unit_square();
    std::vector<Point2> gens;
    for (int i = 0; i < 5; ++i)
        gens.push_back({stream.uniform(0.05, 0.95), stream.uniform(0.05, 0.95)});
    const auto cells = geometry::voronoi_partition(gens, bounds);
    REQUIRE(cells.size() == gens.size());
    CHECK(oracles::nearest_generator_violations(gens, cells, bounds, 10000, 99) == 0);
    double total = 0.0;
    for (const auto& cell : cells) total += geometry::polygon_area(cell);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(geometry::voronoi_partition(std::vector<Point2>{{0.5, 0.5}, {0.5, 0.5}},
                                                bounds),
                    std::invalid_argument);
    CHECK_THROWS_AS(geometry::voronoi_partition(std::vector<Point2>{{2.0, 2.0}}, bounds),
                    std::invalid_argument);
}

TEST_CASE("polygon_area closed forms") {
    CHECK(geometry::polygon_area(unit_square()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(geometry::polygon_area(geometry::make_polygon({{0, 0}, {1, 0}, {0, 1}})) ==
          doctest::Approx(0.5).epsilon(1e-12));
    std::vector<Point2> hex;
    for (int k = 0; k < 6; ++k) {
        const double a = 3.14159265358979323846 * static_cast<double>(k) / 3.0;
        hex.push_back({std::cos(a), std::sin(a)});
    }
    CHECK(geometry::polygon_area(geometry::make_polygon(hex)) ==
          doctest::Approx(3.0 * std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("polygon_centroid closed forms and translation equivariance") {
    const Point2 cs = geometry::polygon_centroid(unit_square());
    CHECK(cs.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cs.y == doctest::Approx(0.5).epsilon(1e-12));
    const Point2 ct = geometry::polygon_centroid(geometry::make_polygon({{0, 0}, {1, 0}, {0, 1}}));
    CHECK(ct.x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(ct.y == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    rng::Stream stream(31);
    std::vector<Point2> pent{{0, 0}, {2, -0.3}, {2.8, 1}, {1.4, 2.2}, {-0.4, 1.2}};
    const ConvexPolygon p = geometry::make_polygon(pent);
    const Point2 c0 = geometry::polygon_centroid(p);
    const Point2 shift{stream.uniform(-20.0, 20.0), stream.uniform(-20.0, 20.0)};
    std::vector<Point2> moved;
    for (const Point2& v : pent) moved.push_back(v + shift);
    const Point2 c1 = geometry::polygon_centroid(geometry::make_polygon(moved));
    CHECK(c1.x == doctest::Approx(c0.x + shift.x).epsilon(1e-9));
    CHECK(c1.y == doctest::Approx(c0.y + shift.y).epsilon(1e-9));
}

TEST_CASE("polar moment closed form, invariance and quadrature oracle") {
    CHECK(geometry::polygon_polar_moment(unit_square()) ==
          doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    const ConvexPolygon shifted =
        geometry::make_polygon({{5, 7}, {6, 7}, {6, 8}, {5, 8}});
    CHECK(geometry::polygon_polar_moment(shifted) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));

    const ConvexPolygon pent =
        geometry::make_polygon({{0, 0}, {2, -0.3}, {2.8, 1}, {1.4, 2.2}, {-0.4, 1.2}});
    const auto m = oracles::grid_moments(pent, nullptr, 2000);
    CHECK(geometry::polygon_polar_moment(pent) ==
          doctest::Approx(m.polar_moment).epsilon(1e-4));
    CHECK(geometry::polygon_area(pent) == doctest::Approx(m.area).epsilon(1e-4));
}

TEST_CASE("weighted_centroid uniform, spike, Gaussian oracle and errors") {
    const ConvexPolygon sq = unit_square();
    const Point2 uniform = geometry::weighted_centroid(sq, [](Point2) { return 1.0; });
    CHECK(uniform.x == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(uniform.y == doctest::Approx(0.5).epsilon(1e-9));

    auto spike = [](Point2 p) {
        const double dx = p.x - 0.9, dy = p.y - 0.9;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * 0.01 * 0.01));
    };
    const Point2 near_spike = geometry::weighted_centroid(sq, spike);
    CHECK(std::abs(near_spike.x - 0.9) < 0.05);
    CHECK(std::abs(near_spike.y - 0.9) < 0.05);

    auto gauss = [](Point2 p) {
        const double dx = p.x - 0.3, dy = p.y - 0.7;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * 0.1 * 0.1));
    };
    const Point2 wc = geometry::weighted_centroid(sq, gauss);
    const auto oracle = oracles::grid_moments(sq, gauss, 1200);
    CHECK(std::abs(wc.x - oracle.centroid.x) < 1e-4);
    CHECK(std::abs(wc.y - oracle.centroid.y) < 1e-4);

    CHECK_THROWS_AS(geometry::weighted_centroid(sq, [](Point2) { return 0.0; }),
                    std::invalid_argument);
}

TEST_CASE("make_polygon canonicalization and rejection") {
    const ConvexPolygon cw = geometry::make_polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    CHECK(geometry::polygon_area(cw) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(geometry::make_polygon({{0, 0}, {1, 0}}), std::invalid_argument);
    // Genuinely concave quad: reflex vertex far off the chord.
    CHECK_THROWS_AS(geometry::make_polygon({{0, 0}, {4, 0}, {4, 4}, {2, 1}, {0, 4}}),
                    std::invalid_argument);
    // A nearly-collinear vertex is absorbed, not rejected.
    const ConvexPolygon absorbed = geometry::make_polygon(
        {{0, 0}, {2, 1e-12}, {4, 0}, {4, 4}, {0, 4}});
    CHECK(geometry::polygon_area(absorbed) == doctest::Approx(16.0).epsilon(1e-9));
}

TEST_CASE("clip_area box against polygon") {
    const ConvexPolygon sq = square(10.0);
    CHECK(geometry::clip_area(sq, geometry::make_aabb(2, 4, 2, 4)) ==
          doctest::Approx(4.0).epsilon(1e-12));
    CHECK(geometry::clip_area(sq, geometry::make_aabb(8, 12, 8, 12)) ==
          doctest::Approx(4.0).epsilon(1e-12));
    CHECK(geometry::clip_area(sq, geometry::make_aabb(20, 30, 20, 30)) == 0.0);
}

TEST_CASE("polygon_contains boundary behaviour") {
    const ConvexPolygon sq = unit_square();
    CHECK(geometry::polygon_contains(sq, {0.5, 0.5}));
    CHECK(geometry::polygon_contains(sq, {0.0, 0.5}));
    CHECK_FALSE(geometry::polygon_contains(sq, {1.5, 0.5}));
}

}  // TEST_SUITE
