#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "skytier/drone.hpp"
#include "skytier/rng.hpp"
#include "skytier/survivability.hpp"

using namespace skytier;
using surv::ConnectionCensus;
using surv::LayerDrone;
using surv::LayerSummary;

namespace {

Drone make_drone(double memory, double energy, double range, double tx_time) {
    Drone d;
    d.id = 0;
    d.position = {0.0, 0.0};
    d.altitude_m = 0.0;
    d.resources = DroneResources{memory, energy, range, tx_time};
    d.initial = d.resources;
    return d;
}

}  // namespace

TEST_SUITE("survivability") {

TEST_CASE("resource_index closed forms") {
    const DroneResources full{1.0, 400e3, 500.0, 10.0};
    CHECK(surv::resource_index(full, full, 5.0) == doctest::Approx(1.0).epsilon(1e-15));

    DroneResources drained = full;
    drained.energy_j = 0.0;
    CHECK(surv::resource_index(drained, full, 5.0) == 0.0);

    DroneResources half = full;
    half.memory = 0.5;
    half.energy_j = 200e3;
    CHECK(surv::resource_index(half, full, 5.0) ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    // Request pressure above the reference rate damps the index linearly.
    CHECK(surv::resource_index(full, full, 10.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(surv::resource_index(full, full, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

    DroneResources slow = full;
    slow.transmission_time_s = 20.0;
    CHECK(surv::resource_index(slow, full, 5.0) ==
          doctest::Approx(std::pow(0.5, 0.25)).epsilon(1e-12));

    DroneResources bad_initial = full;
    bad_initial.energy_j = 0.0;
    CHECK_THROWS_AS(surv::resource_index(full, bad_initial, 5.0), std::invalid_argument);
    CHECK_THROWS_AS(surv::resource_index(full, full, 0.0), std::invalid_argument);
}

TEST_CASE("drone_survivability decay rates") {
    CHECK(surv::drone_survivability(0.8, 0.8, 10.0) == 0.0);
    CHECK(surv::drone_survivability(std::exp(-2.0), 1.0, 2.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(surv::drone_survivability(0.5, 1.0, 1.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(surv::drone_survivability(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(surv::drone_survivability(0.5, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(surv::drone_survivability(1.1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(surv::drone_survivability(0.5, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("layer_survivability series product") {
    const std::vector<LayerDrone> perfect{{1.0, {4, 4}}, {1.0, {2, 2}}};
    CHECK(surv::layer_survivability(perfect) == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<LayerDrone> pair{{0.9, {1, 1}}, {0.9, {1, 1}}};
    CHECK(surv::layer_survivability(pair) == doctest::Approx(0.81).epsilon(1e-12));

    const std::vector<LayerDrone> partial{{1.0, {4, 3}}};
    CHECK(surv::layer_survivability(partial) == doctest::Approx(0.75).epsilon(1e-15));

    rng::Stream stream(5);
    std::vector<LayerDrone> randoms;
    double oracle = 1.0;
    for (int i = 0; i < 5; ++i) {
        const double term = stream.uniform(0.1, 1.0);
        const int total = 1 + stream.uniform_int(8);
        const int active = stream.uniform_int(total + 1);
        randoms.push_back({term, {total, active}});
        oracle *= term * static_cast<double>(active) / static_cast<double>(total);
    }
    CHECK(surv::layer_survivability(randoms) == doctest::Approx(oracle).epsilon(1e-12));

    CHECK_THROWS_AS(surv::layer_survivability(std::vector<LayerDrone>{}),
                    std::invalid_argument);
    const std::vector<LayerDrone> bad_total{{1.0, {0, 0}}};
    CHECK_THROWS_AS(surv::layer_survivability(bad_total), std::invalid_argument);
    const std::vector<LayerDrone> bad_active{{1.0, {2, 3}}};
    CHECK_THROWS_AS(surv::layer_survivability(bad_active), std::invalid_argument);
}

TEST_CASE("total_survivability across layers") {
    const std::vector<LayerSummary> intact{{1.0, 4, 4}, {1.0, 4, 4}};
    CHECK(surv::total_survivability(intact, 4) == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<LayerSummary> degraded{{0.9, 5, 6}, {0.9, 5, 6}};
    CHECK(surv::total_survivability(degraded, 10) == doctest::Approx(0.2025).epsilon(1e-12));

    rng::Stream stream(6);
    std::vector<LayerSummary> layers;
    double oracle = 1.0;
    const int fleet = 12;
    for (int i = 0; i < 3; ++i) {
        const double s_l = stream.uniform(0.2, 1.0);
        const int size = 1 + stream.uniform_int(fleet);
        const int active = stream.uniform_int(size + 1);
        layers.push_back({s_l, active, size});
        oracle *= s_l * static_cast<double>(active) / static_cast<double>(fleet);
    }
    CHECK(surv::total_survivability(layers, fleet) == doctest::Approx(oracle).epsilon(1e-12));

    CHECK_THROWS_AS(surv::total_survivability(intact, 0), std::invalid_argument);
    const std::vector<LayerSummary> overfull{{1.0, 5, 5}};
    CHECK_THROWS_AS(surv::total_survivability(overfull, 4), std::invalid_argument);
    const std::vector<LayerSummary> inconsistent{{1.0, 3, 2}};
    CHECK_THROWS_AS(surv::total_survivability(inconsistent, 4), std::invalid_argument);
}

TEST_CASE("census_active gating") {
    Drone d = make_drone(1.0, 400e3, 100.0, 10.0);
    std::vector<demand::User> users;
    for (int i = 0; i < 10; ++i)
        users.push_back({{static_cast<double>(i) * 5.0, 0.0}, 3});

    const ConnectionCensus all = surv::census_active(d, users);
    CHECK(all.total == 10);
    CHECK(all.active == 10);

    // Push three users beyond radio range.
    auto spread = users;
    for (int i = 0; i < 3; ++i) spread[i].position.x = 500.0 + i;
    const ConnectionCensus partial = surv::census_active(d, spread);
    CHECK(partial.total == 10);
    CHECK(partial.active == 7);

    // Altitude counts toward the link distance.
    Drone high = d;
    high.altitude_m = 99.0;
    std::vector<demand::User> near{{{20.0, 0.0}, 1}};
    CHECK(surv::census_active(high, near).active == 0);
    high.altitude_m = 10.0;
    CHECK(surv::census_active(high, near).active == 1);

    // Energy below one transmission zeroes the census.
    Drone flat = d;
    flat.resources.energy_j = 49.0;  // one transmission needs 5 W * 10 s
    const ConnectionCensus dead = surv::census_active(flat, users);
    CHECK(dead.total == 10);
    CHECK(dead.active == 0);

    // Buffered load above the memory-scaled capacity also zeroes it.
    std::vector<demand::User> heavy{{{1.0, 0.0}, 600}, {{2.0, 0.0}, 600}};
    surv::CensusParams params;
    params.buffer_capacity_requests = 1000.0;
    CHECK(surv::census_active(d, heavy, params).active == 0);
    Drone cramped = d;
    cramped.resources.memory = 0.5;
    std::vector<demand::User> modest{{{1.0, 0.0}, 600}};
    CHECK(surv::census_active(cramped, modest, params).active == 0);
    CHECK(surv::census_active(d, modest, params).active == 1);

    // No assigned users: the coordinator uplink is the whole census.
    const ConnectionCensus idle = surv::census_active(d, {});
    CHECK(idle.total == 1);
    CHECK(idle.active == 1);
    const ConnectionCensus idle_flat = surv::census_active(flat, {});
    CHECK(idle_flat.total == 1);
    CHECK(idle_flat.active == 0);

    Drone broken = d;
    broken.resources.radio_range_m = 0.0;
    CHECK_THROWS_AS(surv::census_active(broken, users), std::invalid_argument);
}

TEST_CASE("make_report composes the layer and fleet products") {
    std::vector<surv::LayerSnapshot> layers(2);
    layers[0].drones = {{0.95, 1.0, {3, 3}}, {0.90, 1.0, {2, 2}}};
    layers[0].active_count = 2;
    layers[1].drones = {{0.80, 1.0, {4, 3}}};
    layers[1].active_count = 1;

    const auto report = surv::make_report(layers, 3, 40.0, 600.0, surv::Mode::Normalized);
    REQUIRE(report.per_layer.size() == 2);
    REQUIRE(report.per_drone.size() == 2);
    CHECK(report.per_drone[0][0] == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(report.per_layer[0] == doctest::Approx(0.95 * 0.90).epsilon(1e-12));
    CHECK(report.per_layer[1] == doctest::Approx(0.80 * 0.75).epsilon(1e-12));
    const double expected_total =
        (0.95 * 0.90) * (2.0 / 3.0) * (0.80 * 0.75) * (1.0 / 3.0);
    CHECK(report.total == doctest::Approx(expected_total).epsilon(1e-12));
    for (const auto& layer_terms : report.per_drone)
        for (double term : layer_terms) {
            CHECK(term >= 0.0);
            CHECK(term <= 1.0);
        }

    // Literal mode reports decay rates; t = 0 pins them to zero.
    const auto lit = surv::make_report(layers, 3, 40.0, 600.0, surv::Mode::Literal);
    CHECK(lit.per_drone[0][0] ==
          doctest::Approx(surv::drone_survivability(0.95, 1.0, 40.0)).epsilon(1e-12));
    const auto at_zero = surv::make_report(layers, 3, 0.0, 600.0, surv::Mode::Literal);
    CHECK(at_zero.per_drone[0][0] == 0.0);

    // An exhausted drone contributes a zero term.
    layers[0].drones[0].f_t = 0.0;
    const auto dead = surv::make_report(layers, 3, 40.0, 600.0, surv::Mode::Normalized);
    CHECK(dead.per_drone[0][0] == 0.0);
    CHECK(dead.total == 0.0);

    CHECK_THROWS_AS(surv::make_report(layers, 3, 700.0, 600.0, surv::Mode::Normalized),
                    std::invalid_argument);
}

TEST_CASE("make_report depletion is monotone under exponential decay") {
    double previous = 1.1;
    for (int step = 0; step <= 100; ++step) {
        const double t = 6.0 * step;
        std::vector<surv::LayerSnapshot> layers(1);
        layers[0].drones = {{std::exp(-0.001 * t), 1.0, {2, 2}},
                            {std::exp(-0.002 * t), 1.0, {3, 3}}};
        layers[0].active_count = 2;
        const auto report = surv::make_report(layers, 2, t, 600.0, surv::Mode::Normalized);
        CHECK(report.total <= previous + 1e-15);
        CHECK(report.total >= 0.0);
        CHECK(report.total <= 1.0);
        previous = report.total;
    }
}

TEST_CASE("survivability matrix updates, means and support flags") {
    surv::SurvivabilityMatrix matrix(3, 3);
    matrix.update(0, 1, 10.0, 0.8, true);
    CHECK(matrix.at(0, 1).resource_index == 0.8);
    CHECK(matrix.at(0, 1).timestamp_s == 10.0);
    CHECK(matrix.at(0, 1).active);
    CHECK(matrix.at(0, 2).resource_index == 1.0);  // untouched default

    // Healthy rows raise no support requests.
    CHECK(matrix.support_requests().empty());

    // Drive row 1 below the 0.2 threshold.
    matrix.update(1, 0, 5.0, 0.1, true);
    matrix.update(1, 1, 5.0, 0.15, true);
    matrix.update(1, 2, 5.0, 0.2, false);
    CHECK(matrix.row_mean(1) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(matrix.support_requests() == std::vector<std::size_t>{1});

    // Timestamps may repeat but never regress.
    matrix.update(0, 1, 10.0, 0.7, true);
    CHECK_THROWS_AS(matrix.update(0, 1, 9.0, 0.6, true), std::invalid_argument);
    CHECK_THROWS_AS(matrix.at(3, 0), std::out_of_range);
    CHECK_THROWS_AS(surv::SurvivabilityMatrix(0, 3), std::invalid_argument);
}

}  // TEST_SUITE
