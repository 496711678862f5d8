#include "skytier/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "skytier/coverage.hpp"
#include "skytier/rng.hpp"

namespace skytier::harness {

namespace {

using nlohmann::json;

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("config: ") + name +
                                                " must be positive");
}

}  // namespace

void validate_config(const ScenarioConfig& cfg) {
    require_positive(cfg.area_side, "area_side");
    if (cfg.mbs_count < 1) throw std::invalid_argument("config: mbs_count must be >= 1");
    if (cfg.tier1_per_mbs < 0)
        throw std::invalid_argument("config: tier1_per_mbs must be >= 0");
    require_positive(cfg.tier1_range, "tier1_range");
    if (cfg.max_tier2 < 1) throw std::invalid_argument("config: max_tier2 must be >= 1");
    require_positive(cfg.initial_uav_area, "initial_uav_area");
    if (cfg.users_min < 0 || cfg.users_max < cfg.users_min)
        throw std::invalid_argument("config: need 0 <= users_min <= users_max");
    require_positive(cfg.lambda_min, "lambda_min");
    if (cfg.lambda_max < cfg.lambda_min)
        throw std::invalid_argument("config: lambda_max below lambda_min");
    require_positive(cfg.altitude_band[0], "altitude_band lower edge");
    if (cfg.altitude_band[1] < cfg.altitude_band[0])
        throw std::invalid_argument("config: altitude band inverted");
    if (cfg.tiers < 1) throw std::invalid_argument("config: tiers must be >= 1");
    if (cfg.propagation != "free_space")
        throw std::invalid_argument("config: unsupported propagation model '" +
                                    cfg.propagation + "'");
    require_positive(cfg.frequency_hz, "frequency_hz");
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: parse error in " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: root must be an object");

    ScenarioConfig cfg;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "area_side") cfg.area_side = value.get<double>();
            else if (key == "mbs_count") cfg.mbs_count = value.get<int>();
            else if (key == "tier1_per_mbs") cfg.tier1_per_mbs = value.get<int>();
            else if (key == "tier1_range") cfg.tier1_range = value.get<double>();
            else if (key == "max_tier2") cfg.max_tier2 = value.get<int>();
            else if (key == "initial_uav_area") cfg.initial_uav_area = value.get<double>();
            else if (key == "users_min") cfg.users_min = value.get<int>();
            else if (key == "users_max") cfg.users_max = value.get<int>();
            else if (key == "lambda_min") cfg.lambda_min = value.get<double>();
            else if (key == "lambda_max") cfg.lambda_max = value.get<double>();
            else if (key == "altitude_band") {
                if (!value.is_array() || value.size() != 2)
                    throw std::invalid_argument("config: altitude_band must be [low, high]");
                cfg.altitude_band[0] = value[0].get<double>();
                cfg.altitude_band[1] = value[1].get<double>();
            } else if (key == "tiers") cfg.tiers = value.get<int>();
            else if (key == "propagation") cfg.propagation = value.get<std::string>();
            else if (key == "tx_power_dbm") cfg.tx_power_dbm = value.get<double>();
            else if (key == "rx_sensitivity_dbm") cfg.rx_sensitivity_dbm = value.get<double>();
            else if (key == "frequency_hz") cfg.frequency_hz = value.get<double>();
            else throw std::invalid_argument("config: unknown key '" + key + "'");
        } catch (const json::exception& e) {
            throw std::invalid_argument("config: bad value for '" + key + "': " + e.what());
        }
    }
    validate_config(cfg);
    return cfg;
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
    json j{{"area_side", cfg.area_side},
           {"mbs_count", cfg.mbs_count},
           {"tier1_per_mbs", cfg.tier1_per_mbs},
           {"tier1_range", cfg.tier1_range},
           {"max_tier2", cfg.max_tier2},
           {"initial_uav_area", cfg.initial_uav_area},
           {"users_min", cfg.users_min},
           {"users_max", cfg.users_max},
           {"lambda_min", cfg.lambda_min},
           {"lambda_max", cfg.lambda_max},
           {"altitude_band", {cfg.altitude_band[0], cfg.altitude_band[1]}},
           {"tiers", cfg.tiers},
           {"propagation", cfg.propagation},
           {"tx_power_dbm", cfg.tx_power_dbm},
           {"rx_sensitivity_dbm", cfg.rx_sensitivity_dbm},
           {"frequency_hz", cfg.frequency_hz}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("config: cannot write " + path);
    out << j.dump(2) << "\n";
}

double fspl_db(double distance_m, double frequency_hz) {
    if (!(distance_m > 0.0)) throw std::invalid_argument("fspl: distance must be positive");
    if (!(frequency_hz > 0.0)) throw std::invalid_argument("fspl: frequency must be positive");
    constexpr double c = 299792458.0;
    constexpr double four_pi = 4.0 * 3.14159265358979323846;
    return 20.0 * std::log10(distance_m) + 20.0 * std::log10(frequency_hz) +
           20.0 * std::log10(four_pi / c);
}

bool friis_link_ok(const Drone& tx, const demand::User& rx, const ScenarioConfig& cfg) {
    const double d2 = geometry::squared_distance(tx.position, rx.position) +
                      tx.altitude_m * tx.altitude_m;
    const double d = std::sqrt(d2);
    return cfg.tx_power_dbm - fspl_db(d, cfg.frequency_hz) >= cfg.rx_sensitivity_dbm;
}

Scenario build_scenario(const ScenarioConfig& cfg, const SimParams& sim, std::uint64_t seed) {
    validate_config(cfg);
    if (cfg.tiers != 2)
        throw std::invalid_argument("config: only the two-tier hierarchy is supported");

    Scenario s;
    s.cfg = cfg;
    s.sim = sim;
    s.seed = seed;
    s.tan_half_aperture = (std::sqrt(cfg.initial_uav_area) / 2.0) / cfg.altitude_band[0];
    s.bounds = geometry::make_polygon({{0.0, 0.0},
                                       {cfg.area_side, 0.0},
                                       {cfg.area_side, cfg.area_side},
                                       {0.0, cfg.area_side}});

    rng::Stream root(seed);
    rng::Stream draw = root.fork(1);
    s.user_count = cfg.users_min +
                   static_cast<int>(cfg.users_max > cfg.users_min
                                        ? draw.uniform_int(static_cast<std::uint64_t>(
                                              cfg.users_max - cfg.users_min + 1))
                                        : 0);
    s.lambda = cfg.lambda_max > cfg.lambda_min
                   ? draw.uniform(cfg.lambda_min, cfg.lambda_max)
                   : cfg.lambda_min;
    s.users = demand::generate_users(s.user_count, s.lambda, s.bounds, sim.clusters,
                                     root.fork(2).seed());

    // MBS grid placement.
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.mbs_count))));
    const int rows = (cfg.mbs_count + cols - 1) / cols;
    std::vector<geometry::Point2> mbs_positions;
    for (int m = 0; m < cfg.mbs_count; ++m) {
        const int cx = m % cols;
        const int cy = m / cols;
        mbs_positions.push_back({(cx + 0.5) * cfg.area_side / cols,
                                 (cy + 0.5) * cfg.area_side / static_cast<double>(rows)});
    }
    for (int m = 0; m < cfg.mbs_count; ++m) {
        s.topology.mbs.push_back(
            mobility::CoordinatorNode{2000 + m, mbs_positions[m], 0.0, 0.0});
    }

    // Tier-1 relays hover at their MBS (ring layout when several per MBS).
    const double ring_radius = std::min(cfg.tier1_range / 4.0, cfg.area_side / (4.0 * cols));
    int tier1_id = 1000;
    for (int m = 0; m < cfg.mbs_count; ++m) {
        for (int k = 0; k < cfg.tier1_per_mbs; ++k) {
            geometry::Point2 pos = mbs_positions[m];
            if (cfg.tier1_per_mbs > 1) {
                const double angle = 2.0 * 3.14159265358979323846 * k / cfg.tier1_per_mbs;
                pos = pos + geometry::Point2{ring_radius * std::cos(angle),
                                             ring_radius * std::sin(angle)};
            }
            Drone d;
            d.id = tier1_id++;
            d.tier = 1;
            d.position = pos;
            d.altitude_m = sim.tier1_altitude_m;
            d.resources = DroneResources{1.0, sim.initial_energy_j, cfg.tier1_range,
                                         sim.transmission_time_s};
            d.initial = d.resources;
            s.tier1.push_back(d);
            s.topology.tier1.push_back(mobility::CoordinatorNode{
                d.id, d.position, d.altitude_m, cfg.tier1_range});
        }
    }

    // Tier-2 fleet: seeded positions rejected until initial footprints are
    // pairwise clear of each other (so the separation invariant holds at t=0).
    rng::Stream deploy = root.fork(3);
    const double side = coverage::footprint_side(cfg.altitude_band[0], s.tan_half_aperture);
    const double margin = side / 2.0 + 1.0;
    for (int k = 0; k < cfg.max_tier2; ++k) {
        geometry::Point2 pos;
        bool clear = false;
        for (int attempt = 0; attempt < 10000 && !clear; ++attempt) {
            pos = {deploy.uniform(margin, cfg.area_side - margin),
                   deploy.uniform(margin, cfg.area_side - margin)};
            clear = true;
            for (const Drone& other : s.tier2) {
                if (std::abs(pos.x - other.position.x) <= side + 0.1 &&
                    std::abs(pos.y - other.position.y) <= side + 0.1) {
                    clear = false;
                    break;
                }
            }
        }
        if (!clear)
            throw std::runtime_error("build_scenario: cannot place tier-2 fleet without overlap");
        Drone d;
        d.id = k;
        d.tier = 2;
        d.position = pos;
        d.altitude_m = cfg.altitude_band[0];
        d.resources = DroneResources{1.0, sim.initial_energy_j, sim.tier2_radio_range_m,
                                     sim.transmission_time_s};
        d.initial = d.resources;
        s.tier2.push_back(d);
    }
    return s;
}

std::vector<geometry::Point2> distinct_generators(std::span<const geometry::Point2> positions,
                                                  const geometry::ConvexPolygon& bounds) {
    const geometry::Aabb box = geometry::bounding_box(bounds);
    // Generators closer than this produce ill-conditioned Voronoi slivers, so
    // coincident drones get spread by a millimetre before partitioning.
    const double min_separation = 1e-4;
    const double nudge = 1e-3;
    const double inset = nudge;
    auto clamp_into = [&](geometry::Point2 p) {
        return geometry::Point2{std::clamp(p.x, box.x_min + inset, box.x_max - inset),
                                std::clamp(p.y, box.y_min + inset, box.y_max - inset)};
    };
    std::vector<geometry::Point2> gens;
    gens.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        geometry::Point2 g = clamp_into(positions[i]);
        bool clash = true;
        int round = 0;
        while (clash && round < 64) {
            clash = false;
            for (const geometry::Point2& other : gens) {
                if (geometry::distance(g, other) <= min_separation) {
                    const double angle = 2.399963229728653 * static_cast<double>(i + round + 1);
                    const double radius = nudge * static_cast<double>(round + 1);
                    g = clamp_into(g + geometry::Point2{radius * std::cos(angle),
                                                        radius * std::sin(angle)});
                    clash = true;
                    ++round;
                    break;
                }
            }
        }
        gens.push_back(g);
    }
    return gens;
}

}  // namespace skytier::harness
