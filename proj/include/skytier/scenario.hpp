#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skytier/demand.hpp"
#include "skytier/drone.hpp"
#include "skytier/geometry.hpp"
#include "skytier/mobility.hpp"

namespace skytier::harness {

// Deployment-level knobs, loaded from JSON. Field names match the file
// format one-to-one; unknown keys are rejected.
struct ScenarioConfig {
    double area_side = 2500.0;
    int mbs_count = 1;
    int tier1_per_mbs = 1;
    double tier1_range = 1000.0;
    int max_tier2 = 20;
    double initial_uav_area = 1000.0;
    int users_min = 1000;
    int users_max = 2000;
    double lambda_min = 5.0;
    double lambda_max = 10.0;
    double altitude_band[2] = {60.96, 152.4};
    int tiers = 2;
    std::string propagation = "free_space";
    double tx_power_dbm = 20.0;
    double rx_sensitivity_dbm = -90.0;
    double frequency_hz = 2.4e9;
};

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);
void validate_config(const ScenarioConfig& cfg);

// Simulation-level constants kept apart from the deployment config.
struct SimParams {
    double epoch_seconds = 20.0;
    double service_seconds = 10.0;
    double v_max_mps = 15.0;
    double waypoint_dt_s = 1.0;
    double epsilon_base_m = 1.0;
    double epsilon_degraded_m = 3.0;
    double flight_power_w = 150.0;
    double tx_power_w = 5.0;
    double initial_energy_j = 400e3;
    double tier2_radio_range_m = 500.0;
    double transmission_time_s = 0.05;
    double buffer_capacity_requests = 1000.0;
    double tier1_altitude_m = 300.0;
    demand::ClusterSpec clusters{};
};

// A fully instantiated deployment: bounds, population, fleet and topology.
struct Scenario {
    ScenarioConfig cfg{};
    SimParams sim{};
    std::uint64_t seed = 0;
    double lambda = 5.0;
    int user_count = 0;
    double tan_half_aperture = 0.0;
    geometry::ConvexPolygon bounds;
    std::vector<demand::User> users;
    std::vector<Drone> tier1;
    std::vector<Drone> tier2;
    mobility::TierTopology topology;
};

Scenario build_scenario(const ScenarioConfig& cfg, const SimParams& sim, std::uint64_t seed);

// Free-space link feasibility: P_tx - FSPL(d, f) >= rx sensitivity, with
// unit antenna gains over the 3-D distance. Throws on zero distance.
bool friis_link_ok(const Drone& tx, const demand::User& rx, const ScenarioConfig& cfg);

double fspl_db(double distance_m, double frequency_hz);

struct MetricsRecord {
    int iteration = 0;
    double accuracy = 0.0;
    double likelihood = 0.0;
    double users_handled = 0.0;
    double total_survivability = 0.0;
};

struct MetricsSeries {
    std::string algorithm;
    std::uint64_t seed = 0;
    double lambda = 0.0;
    int tier1_count = 0;
    std::vector<MetricsRecord> records;
    int iterations_to_converge = 0;
    bool converged = false;
};

struct SurvivabilityRow {
    double t_s = 0.0;
    int layer = 0;
    int drone_id = 0;
    double f_t = 0.0;
    double s_d = 0.0;
    double s_l = 0.0;
    double s_t = 0.0;
    const char* mode = "normalized";
};

struct MobilityRow {
    double t_s = 0.0;
    int drone_id = 0;
    int tier = 0;
    double x_m = 0.0;
    double y_m = 0.0;
    double alt_m = 0.0;
};

struct ScoreRow {
    int iteration = 0;
    double best_score = 0.0;
    double mean_score = 0.0;
};

// Voronoi generator cleanup shared by the optimizers: positions clamped
// strictly inside bounds and nudged apart deterministically when coincident.
std::vector<geometry::Point2> distinct_generators(std::span<const geometry::Point2> positions,
                                                  const geometry::ConvexPolygon& bounds);

}  // namespace skytier::harness
