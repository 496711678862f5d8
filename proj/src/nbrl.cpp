#include "skytier/nbrl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skytier/harness.hpp"
#include "skytier/mobility.hpp"
#include "skytier/rng.hpp"

namespace skytier::nbrl {

namespace {

geometry::Point2 clamp_into(const geometry::Aabb& box, geometry::Point2 p, double inset) {
    return {std::clamp(p.x, box.x_min + inset, box.x_max - inset),
            std::clamp(p.y, box.y_min + inset, box.y_max - inset)};
}

std::vector<geometry::Point2> generators_for(std::span<const Drone> drones,
                                             const harness::Scenario& scenario) {
    std::vector<geometry::Point2> positions;
    positions.reserve(drones.size());
    for (const Drone& d : drones) positions.push_back(d.position);
    return harness::distinct_generators(positions, scenario.bounds);
}

mobility::TierTopology current_topology(const NbrlState& state,
                                        const harness::Scenario& scenario) {
    mobility::TierTopology topo = scenario.topology;
    topo.tier1.clear();
    for (const Drone& d : state.tiers[0]) {
        topo.tier1.push_back(
            mobility::CoordinatorNode{d.id, d.position, d.altitude_m,
                                      d.resources.radio_range_m});
    }
    return topo;
}

std::vector<demand::User> cell_users(const demand::DemandCell& cell,
                                     std::span<const demand::User> population) {
    std::vector<demand::User> users;
    users.reserve(cell.users.size());
    for (std::size_t idx : cell.users) users.push_back(population[idx]);
    return users;
}

surv::SurvivabilityReport build_report(const NbrlState& state,
                                       const harness::Scenario& scenario, double t,
                                       double horizon) {
    std::vector<surv::LayerSnapshot> layers;
    int fleet = 0;
    for (std::size_t ti = 0; ti < state.tiers.size(); ++ti) {
        surv::LayerSnapshot layer;
        for (std::size_t di = 0; di < state.tiers[ti].size(); ++di) {
            const Drone& d = state.tiers[ti][di];
            surv::DroneSnapshot snap;
            snap.f_t = surv::resource_index(d.resources, d.initial, scenario.lambda,
                                            scenario.cfg.lambda_min);
            snap.f_0 = 1.0;
            snap.census = state.censuses[ti][di];
            if (snap.census.active > 0 && snap.f_t > 0.0) ++layer.active_count;
            layer.drones.push_back(snap);
        }
        fleet += static_cast<int>(state.tiers[ti].size());
        layers.push_back(std::move(layer));
    }
    return surv::make_report(layers, fleet, t, horizon, surv::Mode::Normalized);
}

struct PairStatus {
    int drone_id = 0;
    std::size_t cell_index = 0;
    double gain = 0.0;
    bool operational = false;
};

}  // namespace

NbrlState nbrl_init(const harness::Scenario& scenario) {
    NbrlState state;
    state.tiers.push_back(scenario.tier1);
    state.tiers.push_back(scenario.tier2);
    if (state.tiers.back().empty()) throw std::invalid_argument("nbrl: empty serving tier");
    state.censuses.resize(state.tiers.size());
    for (std::size_t ti = 0; ti < state.tiers.size(); ++ti) {
        for (const Drone& d : state.tiers[ti]) {
            state.censuses[ti].push_back(surv::census_active(
                d, {}, surv::CensusParams{scenario.sim.tx_power_w,
                                          scenario.sim.buffer_capacity_requests}));
        }
    }
    state.best_serving = scenario.tier2;
    return state;
}

NbrlState nbrl_iteration(NbrlState state, const harness::Scenario& scenario,
                         const NbrlConfig& config, std::vector<TraceRow>* trace) {
    if (state.converged) throw std::invalid_argument("nbrl_iteration: state already converged");
    if (!(config.tolerance >= 0.0 && config.tolerance < 1.0))
        throw std::invalid_argument("nbrl: tolerance must be in [0,1)");
    if (config.max_iterations < 1)
        throw std::invalid_argument("nbrl: max_iterations must be >= 1");
    if (!(config.reshuffle_fraction > 0.0 && config.reshuffle_fraction <= 1.0))
        throw std::invalid_argument("nbrl: reshuffle_fraction must be in (0,1]");

    state.iteration += 1;
    const harness::SimParams& sim = scenario.sim;
    const double step_seconds = sim.epoch_seconds + sim.service_seconds;
    const double horizon =
        std::max(config.max_iterations, state.iteration) * step_seconds;
    const std::size_t serving = state.tiers.size() - 1;
    const double zone_area = geometry::polygon_area(scenario.bounds);
    const rng::Stream root(scenario.seed);

    double serving_likelihood = 1.0;
    std::vector<PairStatus> serving_pairs;
    std::vector<TraceRow> rows;

    for (std::size_t ti = state.tiers.size(); ti-- > 0;) {
        std::vector<Drone>& drones = state.tiers[ti];
        if (drones.empty()) continue;

        const std::vector<geometry::Point2> gens = generators_for(drones, scenario);
        const std::vector<geometry::ConvexPolygon> regions =
            geometry::voronoi_partition(gens, scenario.bounds);
        std::vector<demand::DemandCell> cells =
            demand::populate_cells(regions, gens, scenario.users);
        demand::classify_demand(cells);

        coverage::LocationAssignment ideal =
            coverage::assign_drones(drones, cells, scenario.tan_half_aperture);
        ideal = coverage::centroidal_step(ideal, cells);

        const mobility::TierTopology topo = current_topology(state, scenario);
        std::vector<mobility::MovePlan> plans;
        std::vector<double> sides;
        plans.reserve(drones.size());
        sides.reserve(drones.size());
        for (const Drone& d : drones) {
            geometry::Point2 target = d.position;
            for (const coverage::AssignedPair& pair : ideal.pairs) {
                if (pair.drone_id == d.id) target = pair.target;
            }
            if (ti == serving) {
                auto forced = state.forced_targets.find(d.id);
                if (forced != state.forced_targets.end()) target = forced->second;
            }
            const mobility::CoordinatorRef coord = mobility::coordinator_for(d, topo);
            const double epsilon = (d.tier >= 2 && coord.kind == mobility::CoordinatorRef::Kind::Mbs)
                                       ? sim.epsilon_degraded_m
                                       : sim.epsilon_base_m;
            const std::uint64_t jitter_seed =
                root.fork(1000003ULL * static_cast<std::uint64_t>(state.iteration) +
                          8191ULL * ti + static_cast<std::uint64_t>(d.id))
                    .seed();
            target = coverage::apply_placement_error(target, epsilon, jitter_seed);
            target = clamp_into(geometry::bounding_box(scenario.bounds), target, 0.0);
            plans.push_back(mobility::plan_waypoints(d.id, {d.position, d.altitude_m},
                                                     {target, d.altitude_m}, sim.v_max_mps,
                                                     sim.waypoint_dt_s));
            sides.push_back(
                coverage::footprint_side(d.altitude_m, scenario.tan_half_aperture));
        }
        plans = mobility::enforce_separation(std::move(plans), sides, zone_area);

        for (std::size_t di = 0; di < drones.size(); ++di) {
            Drone& d = drones[di];
            const double flight = std::min(mobility::plan_duration(plans[di]),
                                           sim.epoch_seconds);
            d.position = mobility::plan_pose_at(plans[di], sim.epoch_seconds).position;
            const double drain =
                sim.flight_power_w * flight + sim.tx_power_w * sim.service_seconds;
            d.resources.energy_j = std::max(0.0, d.resources.energy_j - drain);
        }

        // Census refresh and per-tier evaluation at the end-of-epoch poses.
        const surv::CensusParams census_params{sim.tx_power_w, sim.buffer_capacity_requests};
        std::vector<PairStatus> statuses;
        coverage::LocationAssignment achieved = ideal;
        std::vector<char> assigned(drones.size(), 0);
        for (coverage::AssignedPair& pair : achieved.pairs) {
            for (std::size_t di = 0; di < drones.size(); ++di) {
                if (drones[di].id != pair.drone_id) continue;
                assigned[di] = 1;
                pair.target = drones[di].position;
                if (ti == serving) {
                    const std::vector<demand::User> members =
                        cell_users(cells[pair.cell_index], scenario.users);
                    state.censuses[ti][di] =
                        surv::census_active(drones[di], members, census_params);
                }
                PairStatus status;
                status.drone_id = pair.drone_id;
                status.cell_index = pair.cell_index;
                status.gain = coverage::pair_gain(
                    coverage::footprint_of(drones[di], scenario.tan_half_aperture),
                    cells[pair.cell_index], drones[di].position);
                const bool in_cell =
                    geometry::polygon_contains(cells[pair.cell_index].region,
                                               drones[di].position);
                const bool energy_ok = drones[di].resources.energy_j >=
                                       sim.tx_power_w * drones[di].resources.transmission_time_s;
                long long load = 0;
                for (std::size_t u : cells[pair.cell_index].users)
                    load += scenario.users[u].request_count;
                const bool buffer_ok =
                    static_cast<double>(load) <=
                    sim.buffer_capacity_requests * drones[di].resources.memory;
                status.operational = in_cell && energy_ok && buffer_ok;
                statuses.push_back(status);
            }
        }
        for (std::size_t di = 0; di < drones.size(); ++di) {
            if (assigned[di]) continue;
            if (ti == serving)
                state.censuses[ti][di] = surv::census_active(drones[di], {}, census_params);
            if (ti == serving) {
                PairStatus idle;
                idle.drone_id = drones[di].id;
                idle.cell_index = cells.size();  // sentinel: not serving any cell
                statuses.push_back(idle);
            }
        }
        if (ti != serving) {
            // Relay tiers census their child links, not ground users.
            const mobility::TierTopology post = current_topology(state, scenario);
            const std::vector<Drone>& children = state.tiers[ti + 1];
            for (std::size_t di = 0; di < drones.size(); ++di) {
                std::vector<demand::User> links;
                for (const Drone& child : children) {
                    const mobility::CoordinatorRef ref =
                        mobility::coordinator_for(child, post);
                    if (ref.kind == mobility::CoordinatorRef::Kind::Tier1 &&
                        ref.index == di && ref.in_range)
                        links.push_back(demand::User{child.position, 1});
                }
                Drone relay = drones[di];
                if (!children.empty())
                    relay.altitude_m =
                        std::abs(relay.altitude_m - children.front().altitude_m);
                state.censuses[ti][di] =
                    surv::census_active(relay, links, census_params);
            }
        }

        const double likelihood = coverage::mapping_likelihood(achieved, cells, drones,
                                                               scenario.tan_half_aperture);
        coverage::LocationAssignment operational;
        for (const PairStatus& s : statuses) {
            if (s.operational)
                operational.pairs.push_back(
                    coverage::AssignedPair{s.drone_id, s.cell_index, {}});
        }
        const double accuracy = harness::allocation_accuracy(operational, ideal);
        const double coverage_value = coverage::coverage_fraction(
            drones, scenario.users, scenario.tan_half_aperture,
            [&](const Drone& d, geometry::Point2 p) {
                return harness::friis_link_ok(d, demand::User{p, 0}, scenario.cfg);
            });
        state.report = build_report(state, scenario, state.sim_time_s + step_seconds,
                                    std::max(horizon, state.sim_time_s + step_seconds));

        TraceRow row;
        row.iteration = state.iteration;
        row.tier = static_cast<int>(ti) + 1;
        row.likelihood = likelihood;
        row.accuracy = accuracy;
        row.coverage = coverage_value;
        row.total_survivability = state.report.total;
        rows.push_back(row);

        if (ti == serving) {
            serving_likelihood = likelihood;
            serving_pairs = statuses;
            state.cells = std::move(cells);
            state.assignment = std::move(achieved);
        }
    }

    state.forced_targets.clear();
    state.sim_time_s += step_seconds;
    state.current_likelihood = serving_likelihood;
    if (serving_likelihood >= state.likelihood) {
        state.likelihood = serving_likelihood;
        state.best_serving = state.tiers[serving];
        state.best_cells = state.cells;
        state.best_assignment = state.assignment;
    }

    int reshuffled = 0;
    if (state.likelihood >= 1.0 - config.tolerance) {
        state.converged = true;
    } else {
        // Redirect the worst-scoring serving drones toward the best unserved
        // High/Medium cells for the next epoch.
        std::vector<std::size_t> unserved;
        std::vector<char> served(state.cells.size(), 0);
        for (const PairStatus& s : serving_pairs)
            if (s.gain > 0.0) served[s.cell_index] = 1;
        for (std::size_t c = 0; c < state.cells.size(); ++c) {
            const int w = coverage::demand_weight(state.cells[c].demand_class);
            if (w >= 2 && !served[c]) unserved.push_back(c);
        }
        std::sort(unserved.begin(), unserved.end(), [&](std::size_t a, std::size_t b) {
            const int wa = coverage::demand_weight(state.cells[a].demand_class);
            const int wb = coverage::demand_weight(state.cells[b].demand_class);
            if (wa != wb) return wa > wb;
            return a < b;
        });
        std::vector<PairStatus> worst = serving_pairs;
        std::sort(worst.begin(), worst.end(), [](const PairStatus& a, const PairStatus& b) {
            if (a.gain != b.gain) return a.gain < b.gain;
            return a.drone_id < b.drone_id;
        });
        const std::size_t quota = static_cast<std::size_t>(
            std::ceil(config.reshuffle_fraction * static_cast<double>(worst.size())));
        const std::size_t count = std::min(unserved.size(), quota);
        for (std::size_t k = 0; k < count; ++k) {
            state.forced_targets[worst[k].drone_id] = state.cells[unserved[k]].target;
            ++reshuffled;
        }
    }
    if (!rows.empty()) rows.front().reshuffled = reshuffled;  // serving tier row
    if (trace != nullptr)
        for (const TraceRow& row : rows) trace->push_back(row);
    return state;
}

NbrlRun nbrl_run(const harness::Scenario& scenario, const NbrlConfig& config) {
    NbrlRun run;
    NbrlState state = nbrl_init(scenario);
    run.series.algorithm = "nbrl";
    run.series.seed = scenario.seed;
    run.series.lambda = scenario.lambda;
    run.series.tier1_count = static_cast<int>(scenario.tier1.size());

    const std::size_t serving = state.tiers.size() - 1;
    for (const std::vector<Drone>& tier : state.tiers) {
        for (const Drone& d : tier) {
            run.mobility_rows.push_back(harness::MobilityRow{
                0.0, d.id, d.tier, d.position.x, d.position.y, d.altitude_m});
        }
    }
    while (!state.converged && state.iteration < config.max_iterations) {
        state = nbrl_iteration(std::move(state), scenario, config, &run.trace);
        harness::MetricsRecord record;
        record.iteration = state.iteration;
        record.likelihood = state.likelihood;
        record.total_survivability = state.report.total;
        for (const TraceRow& row : run.trace) {
            if (row.iteration == state.iteration &&
                row.tier == static_cast<int>(serving) + 1) {
                record.accuracy = row.accuracy;
            }
        }
        // Handled fraction over the accurate serving drones.
        std::vector<Drone> accurate;
        for (const coverage::AssignedPair& pair : state.assignment.pairs) {
            for (const Drone& d : state.tiers[serving]) {
                if (d.id != pair.drone_id) continue;
                const bool in_cell = pair.cell_index < state.cells.size() &&
                                     geometry::polygon_contains(
                                         state.cells[pair.cell_index].region, d.position);
                long long load = 0;
                if (pair.cell_index < state.cells.size())
                    for (std::size_t u : state.cells[pair.cell_index].users)
                        load += scenario.users[u].request_count;
                const bool buffer_ok = static_cast<double>(load) <=
                                       scenario.sim.buffer_capacity_requests *
                                           d.resources.memory;
                const bool energy_ok =
                    d.resources.energy_j >=
                    scenario.sim.tx_power_w * d.resources.transmission_time_s;
                if (in_cell && buffer_ok && energy_ok) accurate.push_back(d);
            }
        }
        record.users_handled = harness::users_handled_fraction(
            accurate, scenario.users, scenario.cfg, scenario.tan_half_aperture);
        run.series.records.push_back(record);

        for (std::size_t ti = 0; ti < state.tiers.size(); ++ti) {
            for (std::size_t di = 0; di < state.tiers[ti].size(); ++di) {
                const Drone& d = state.tiers[ti][di];
                run.mobility_rows.push_back(harness::MobilityRow{
                    state.sim_time_s, d.id, d.tier, d.position.x, d.position.y,
                    d.altitude_m});
                harness::SurvivabilityRow s;
                s.t_s = state.sim_time_s;
                s.layer = static_cast<int>(ti) + 1;
                s.drone_id = d.id;
                const double term = state.report.per_drone[ti][di];
                s.f_t = term;
                s.s_d = (term > 0.0 && state.sim_time_s > 0.0)
                            ? -std::log(term) / state.sim_time_s
                            : 0.0;
                s.s_l = state.report.per_layer[ti];
                s.s_t = state.report.total;
                s.mode = surv::to_string(state.report.mode);
                run.survivability_rows.push_back(s);
            }
        }
        // Score files use the minimized objective 1 - likelihood across all
        // algorithms so the curves are directly comparable.
        run.score_history.push_back(harness::ScoreRow{
            state.iteration, 1.0 - state.likelihood, 1.0 - state.current_likelihood});
    }
    run.series.converged = state.converged;
    run.series.iterations_to_converge = state.iteration;

    // Surface the incumbent as the final placement.
    state.tiers[serving] = state.best_serving;
    state.cells = state.best_cells;
    state.assignment = state.best_assignment;
    run.final_state = std::move(state);
    return run;
}

}  // namespace skytier::nbrl
