#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "skytier/geometry.hpp"
#include "skytier/mobility.hpp"
#include "skytier/rng.hpp"

using namespace skytier;
using mobility::MovePlan;
using mobility::Pose;
using geometry::Point2;

namespace {

geometry::Aabb box_at(Point2 center, double side) {
    const double h = side / 2.0;
    return geometry::make_aabb(center.x - h, center.x + h, center.y - h, center.y + h);
}

bool plans_equal(const MovePlan& a, const MovePlan& b) {
    if (a.drone_id != b.drone_id || a.waypoints.size() != b.waypoints.size()) return false;
    for (std::size_t i = 0; i < a.waypoints.size(); ++i) {
        const auto& wa = a.waypoints[i];
        const auto& wb = b.waypoints[i];
        if (wa.position.x != wb.position.x || wa.position.y != wb.position.y ||
            wa.altitude_m != wb.altitude_m || wa.time_s != wb.time_s)
            return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("mobility") {

TEST_CASE("plan_waypoints sampling and endpoints") {
    const Pose start{{0.0, 0.0}, 100.0};

    const MovePlan still = mobility::plan_waypoints(3, start, start, 15.0, 1.0);
    REQUIRE(still.waypoints.size() == 1);
    CHECK(still.waypoints[0].time_s == 0.0);
    CHECK(still.waypoints[0].position.x == 0.0);
    CHECK(mobility::plan_duration(still) == 0.0);

    // 100 m at 10 m/s sampled every second: 11 waypoints, 10 m per step.
    const Pose east{{100.0, 0.0}, 100.0};
    const MovePlan run = mobility::plan_waypoints(1, start, east, 10.0, 1.0);
    REQUIRE(run.waypoints.size() == 11);
    for (std::size_t i = 0; i < run.waypoints.size(); ++i) {
        CHECK(run.waypoints[i].time_s == doctest::Approx(static_cast<double>(i)));
        CHECK(run.waypoints[i].position.x ==
              doctest::Approx(10.0 * static_cast<double>(i)).epsilon(1e-12));
        CHECK(run.waypoints[i].altitude_m == 100.0);
    }
    CHECK(run.waypoints.back().position.x == 100.0);
    CHECK(mobility::plan_duration(run) == 10.0);

    CHECK_THROWS_AS(mobility::plan_waypoints(0, start, east, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(mobility::plan_waypoints(0, start, east, 10.0, 0.0), std::invalid_argument);
}

TEST_CASE("plan_waypoints random paths respect speed and land exactly") {
    rng::Stream stream(17);
    for (int k = 0; k < 50; ++k) {
        const Pose from{{stream.uniform(0.0, 1000.0), stream.uniform(0.0, 1000.0)},
                        stream.uniform(60.0, 120.0)};
        const Pose to{{stream.uniform(0.0, 1000.0), stream.uniform(0.0, 1000.0)},
                      stream.uniform(60.0, 120.0)};
        const double v_max = stream.uniform(5.0, 20.0);
        const double dt = stream.uniform(0.5, 2.0);
        const MovePlan plan = mobility::plan_waypoints(k, from, to, v_max, dt);
        REQUIRE(!plan.waypoints.empty());

        CHECK(plan.waypoints.front().time_s == 0.0);
        CHECK(plan.waypoints.back().position.x == to.position.x);
        CHECK(plan.waypoints.back().position.y == to.position.y);
        CHECK(plan.waypoints.back().altitude_m == to.altitude_m);

        double travelled = 0.0;
        for (std::size_t i = 1; i < plan.waypoints.size(); ++i) {
            const auto& a = plan.waypoints[i - 1];
            const auto& b = plan.waypoints[i];
            CHECK(b.time_s > a.time_s);
            const double dz = b.altitude_m - a.altitude_m;
            const double step = std::sqrt(geometry::squared_distance(a.position, b.position) +
                                          dz * dz);
            CHECK(step <= v_max * (b.time_s - a.time_s) + 1e-9);
            travelled += step;
        }
        const double dz = to.altitude_m - from.altitude_m;
        const double direct = std::sqrt(
            geometry::squared_distance(from.position, to.position) + dz * dz);
        CHECK(travelled == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("plan_pose_at holds the governing waypoint") {
    const Pose from{{0.0, 0.0}, 80.0};
    const Pose to{{30.0, 0.0}, 80.0};
    const MovePlan plan = mobility::plan_waypoints(0, from, to, 10.0, 1.0);
    REQUIRE(plan.waypoints.size() == 4);
    CHECK(mobility::plan_pose_at(plan, 0.0).position.x == 0.0);
    CHECK(mobility::plan_pose_at(plan, 0.5).position.x == 0.0);
    CHECK(mobility::plan_pose_at(plan, 1.0).position.x == doctest::Approx(10.0));
    CHECK(mobility::plan_pose_at(plan, 2.7).position.x == doctest::Approx(20.0));
    CHECK(mobility::plan_pose_at(plan, 50.0).position.x == 30.0);  // holds after the end
    CHECK_THROWS_AS(mobility::plan_pose_at(MovePlan{}, 0.0), std::invalid_argument);
}

TEST_CASE("enforce_separation leaves disjoint plans untouched") {
    const Pose a0{{0.0, 0.0}, 80.0};
    const Pose a1{{50.0, 0.0}, 80.0};
    const Pose b0{{500.0, 500.0}, 80.0};
    const Pose b1{{540.0, 500.0}, 80.0};
    std::vector<MovePlan> plans{mobility::plan_waypoints(0, a0, a1, 10.0, 1.0),
                                mobility::plan_waypoints(1, b0, b1, 10.0, 1.0)};
    const std::vector<double> sides{10.0, 10.0};
    const auto repaired = mobility::enforce_separation(plans, sides);
    REQUIRE(repaired.size() == 2);
    CHECK(plans_equal(repaired[0], plans[0]));
    CHECK(plans_equal(repaired[1], plans[1]));
}

TEST_CASE("enforce_separation pushes the later id clear") {
    const Pose spot{{100.0, 100.0}, 80.0};
    std::vector<MovePlan> plans{mobility::plan_waypoints(0, spot, spot, 10.0, 1.0),
                                mobility::plan_waypoints(1, spot, spot, 10.0, 1.0)};
    const std::vector<double> sides{10.0, 10.0};
    const auto repaired = mobility::enforce_separation(plans, sides);
    CHECK(plans_equal(repaired[0], plans[0]));  // the earlier id never moves
    const Point2 c0 = repaired[0].waypoints[0].position;
    const Point2 c1 = repaired[1].waypoints[0].position;
    CHECK(geometry::distance(c0, c1) >= 10.0);
    CHECK_FALSE(geometry::aabb_overlap(box_at(c0, 10.0), box_at(c1, 10.0)).overlapped);
}

TEST_CASE("enforce_separation clears every sampled instant and is idempotent") {
    rng::Stream stream(23);
    for (int round = 0; round < 5; ++round) {
        std::vector<MovePlan> plans;
        std::vector<double> sides;
        for (int i = 0; i < 5; ++i) {
            const Pose from{{stream.uniform(0.0, 200.0), stream.uniform(0.0, 200.0)}, 80.0};
            const Pose to{{stream.uniform(0.0, 200.0), stream.uniform(0.0, 200.0)}, 80.0};
            plans.push_back(mobility::plan_waypoints(i, from, to, 15.0, 1.0));
            sides.push_back(20.0 + 5.0 * i);
        }
        const auto repaired = mobility::enforce_separation(plans, sides);

        std::set<double> times;
        for (const auto& plan : repaired)
            for (const auto& w : plan.waypoints) times.insert(w.time_s);
        for (double t : times) {
            for (std::size_t i = 0; i < repaired.size(); ++i) {
                for (std::size_t j = i + 1; j < repaired.size(); ++j) {
                    const Point2 pi = mobility::plan_pose_at(repaired[i], t).position;
                    const Point2 pj = mobility::plan_pose_at(repaired[j], t).position;
                    CHECK_FALSE(geometry::aabb_overlap(box_at(pi, sides[i]),
                                                       box_at(pj, sides[j])).overlapped);
                }
            }
        }

        const auto again = mobility::enforce_separation(repaired, sides);
        REQUIRE(again.size() == repaired.size());
        for (std::size_t i = 0; i < again.size(); ++i)
            CHECK(plans_equal(again[i], repaired[i]));
    }
}

TEST_CASE("enforce_separation names the infeasible pair") {
    const Pose spot{{0.0, 0.0}, 80.0};
    std::vector<MovePlan> plans{mobility::plan_waypoints(4, spot, spot, 10.0, 1.0),
                                mobility::plan_waypoints(9, spot, spot, 10.0, 1.0)};
    const std::vector<double> sides{10.0, 10.0};
    // Combined footprint area 200 against a 150 zone: infeasible packing.
    try {
        mobility::enforce_separation(plans, sides, 150.0);
        FAIL("expected an infeasible packing error");
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        CHECK(what.find("4") != std::string::npos);
        CHECK(what.find("9") != std::string::npos);
    }
    // With enough room the same plans are repaired instead.
    CHECK_NOTHROW(mobility::enforce_separation(plans, sides, 10000.0));

    const std::vector<double> wrong{10.0};
    CHECK_THROWS_AS(mobility::enforce_separation(plans, wrong), std::invalid_argument);
}

TEST_CASE("coordinator_for prefers in-range relays") {
    mobility::TierTopology topology;
    topology.tier1.push_back({0, {0.0, 0.0}, 300.0, 400.0});
    topology.tier1.push_back({1, {1000.0, 0.0}, 300.0, 400.0});
    topology.mbs.push_back({0, {500.0, -2000.0}, 0.0, 0.0});

    Drone d;
    d.tier = 2;
    d.altitude_m = 100.0;

    d.position = {50.0, 0.0};
    auto ref = mobility::coordinator_for(d, topology);
    CHECK(ref.kind == mobility::CoordinatorRef::Kind::Tier1);
    CHECK(ref.index == 0);
    CHECK(ref.in_range);

    d.position = {950.0, 0.0};
    ref = mobility::coordinator_for(d, topology);
    CHECK(ref.kind == mobility::CoordinatorRef::Kind::Tier1);
    CHECK(ref.index == 1);

    // Out of every relay's range: fall back to the MBS.
    d.position = {500.0, 5000.0};
    ref = mobility::coordinator_for(d, topology);
    CHECK(ref.kind == mobility::CoordinatorRef::Kind::Mbs);
    CHECK(ref.index == 0);
    CHECK(ref.in_range);  // range 0 means unlimited

    // Tier-1 drones answer to the MBS even with relays around.
    Drone relay;
    relay.tier = 1;
    relay.position = {0.0, 0.0};
    relay.altitude_m = 300.0;
    ref = mobility::coordinator_for(relay, topology);
    CHECK(ref.kind == mobility::CoordinatorRef::Kind::Mbs);

    CHECK_THROWS_AS(mobility::coordinator_for(d, mobility::TierTopology{}),
                    std::runtime_error);
}

TEST_CASE("coordinator_for accounts for altitude in distance") {
    mobility::TierTopology topology;
    // Ground distance 0 but 200 m above the drone; range 150 must miss it.
    topology.tier1.push_back({0, {0.0, 0.0}, 300.0, 150.0});
    topology.mbs.push_back({0, {0.0, 0.0}, 0.0, 0.0});
    Drone d;
    d.tier = 2;
    d.position = {0.0, 0.0};
    d.altitude_m = 100.0;
    auto ref = mobility::coordinator_for(d, topology);
    CHECK(ref.kind == mobility::CoordinatorRef::Kind::Mbs);

    // Raising the range brings the relay back.
    topology.tier1[0].range_m = 250.0;
    ref = mobility::coordinator_for(d, topology);
    CHECK(ref.kind == mobility::CoordinatorRef::Kind::Tier1);
}

}  // TEST_SUITE
