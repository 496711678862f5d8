#include "skytier/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "skytier/mobility.hpp"
#include "skytier/rng.hpp"
#include "skytier/survivability.hpp"

namespace skytier::harness {

namespace {

using nlohmann::json;

struct TierCells {
    std::vector<demand::DemandCell> cells;
    coverage::LocationAssignment ideal;
};

TierCells partition_tier(std::span<const Drone> drones, const Scenario& scenario) {
    std::vector<geometry::Point2> positions;
    positions.reserve(drones.size());
    for (const Drone& d : drones) positions.push_back(d.position);
    const std::vector<geometry::Point2> gens =
        distinct_generators(positions, scenario.bounds);
    const std::vector<geometry::ConvexPolygon> regions =
        geometry::voronoi_partition(gens, scenario.bounds);
    TierCells out;
    out.cells = demand::populate_cells(regions, gens, scenario.users);
    demand::classify_demand(out.cells);
    out.ideal = coverage::assign_drones(drones, out.cells, scenario.tan_half_aperture);
    return out;
}

std::vector<demand::User> cell_members(const demand::DemandCell& cell,
                                       std::span<const demand::User> population) {
    std::vector<demand::User> users;
    users.reserve(cell.users.size());
    for (std::size_t idx : cell.users) users.push_back(population[idx]);
    return users;
}

struct FleetEval {
    double accuracy = 0.0;
    double likelihood = 0.0;
    double handled = 0.0;
    double total_survivability = 0.0;
    surv::SurvivabilityReport report;
    coverage::LocationAssignment assignment;       // serving tier, end targets
    std::vector<demand::DemandCell> serving_cells;
};

// Static snapshot evaluation used by the swarm baselines: the same demand
// partition, mapping, census and survivability chain the negotiation loop
// applies after each epoch, minus the movement laws.
FleetEval evaluate_fleet(const Scenario& scenario,
                         const std::vector<std::vector<Drone>>& tiers, double t,
                         double horizon) {
    const surv::CensusParams census_params{scenario.sim.tx_power_w,
                                           scenario.sim.buffer_capacity_requests};
    const std::size_t serving = tiers.size() - 1;

    mobility::TierTopology topo = scenario.topology;
    topo.tier1.clear();
    for (const Drone& d : tiers[0])
        topo.tier1.push_back(mobility::CoordinatorNode{d.id, d.position, d.altitude_m,
                                                       d.resources.radio_range_m});

    FleetEval eval;
    std::vector<surv::LayerSnapshot> layers(tiers.size());
    int fleet = 0;
    std::vector<Drone> accurate;

    for (std::size_t ti = 0; ti < tiers.size(); ++ti) {
        const std::vector<Drone>& drones = tiers[ti];
        fleet += static_cast<int>(drones.size());
        if (drones.empty()) continue;
        TierCells tc = partition_tier(drones, scenario);

        std::vector<surv::ConnectionCensus> censuses(drones.size());
        if (ti == serving) {
            std::vector<char> assigned(drones.size(), 0);
            coverage::LocationAssignment achieved = tc.ideal;
            int hits = 0;
            for (coverage::AssignedPair& pair : achieved.pairs) {
                for (std::size_t di = 0; di < drones.size(); ++di) {
                    if (drones[di].id != pair.drone_id) continue;
                    assigned[di] = 1;
                    pair.target = drones[di].position;
                    const std::vector<demand::User> members =
                        cell_members(tc.cells[pair.cell_index], scenario.users);
                    censuses[di] =
                        surv::census_active(drones[di], members, census_params);
                    const bool in_cell = geometry::polygon_contains(
                        tc.cells[pair.cell_index].region, drones[di].position);
                    const bool energy_ok =
                        drones[di].resources.energy_j >=
                        scenario.sim.tx_power_w * drones[di].resources.transmission_time_s;
                    long long load = 0;
                    for (std::size_t u : tc.cells[pair.cell_index].users)
                        load += scenario.users[u].request_count;
                    const bool buffer_ok =
                        static_cast<double>(load) <=
                        scenario.sim.buffer_capacity_requests * drones[di].resources.memory;
                    if (in_cell && energy_ok && buffer_ok) {
                        ++hits;
                        accurate.push_back(drones[di]);
                    }
                }
            }
            for (std::size_t di = 0; di < drones.size(); ++di)
                if (!assigned[di])
                    censuses[di] = surv::census_active(drones[di], {}, census_params);
            eval.accuracy = tc.ideal.pairs.empty()
                                ? 1.0
                                : static_cast<double>(hits) /
                                      static_cast<double>(tc.ideal.pairs.size());
            eval.likelihood = coverage::mapping_likelihood(achieved, tc.cells, drones,
                                                           scenario.tan_half_aperture);
            eval.assignment = std::move(achieved);
            eval.serving_cells = std::move(tc.cells);
        } else {
            const std::vector<Drone>& children = tiers[ti + 1];
            for (std::size_t di = 0; di < drones.size(); ++di) {
                std::vector<demand::User> links;
                for (const Drone& child : children) {
                    const mobility::CoordinatorRef ref =
                        mobility::coordinator_for(child, topo);
                    if (ref.kind == mobility::CoordinatorRef::Kind::Tier1 &&
                        ref.index == di && ref.in_range)
                        links.push_back(demand::User{child.position, 1});
                }
                Drone relay = drones[di];
                if (!children.empty())
                    relay.altitude_m =
                        std::abs(relay.altitude_m - children.front().altitude_m);
                censuses[di] = surv::census_active(relay, links, census_params);
            }
        }

        for (std::size_t di = 0; di < drones.size(); ++di) {
            surv::DroneSnapshot snap;
            snap.f_t = surv::resource_index(drones[di].resources, drones[di].initial,
                                            scenario.lambda, scenario.cfg.lambda_min);
            snap.f_0 = 1.0;
            snap.census = censuses[di];
            if (snap.census.active > 0 && snap.f_t > 0.0) ++layers[ti].active_count;
            layers[ti].drones.push_back(snap);
        }
    }

    eval.report =
        surv::make_report(layers, fleet, t, std::max(horizon, t), surv::Mode::Normalized);
    eval.total_survivability = eval.report.total;
    eval.handled = users_handled_fraction(accurate, scenario.users, scenario.cfg,
                                          scenario.tan_half_aperture);
    return eval;
}

RunArtifacts run_swarm(Scenario scenario, Algorithm algorithm,
                       const nbrl::NbrlConfig& nbrl_cfg, baselines::PsoParams params) {
    const std::size_t n = scenario.tier2.size();
    if (n == 0) throw std::invalid_argument("run_scenario: empty serving tier");
    const geometry::Aabb box = geometry::bounding_box(scenario.bounds);
    std::vector<double> lo(2 * n), hi(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[2 * i] = box.x_min + 1.0;
        hi[2 * i] = box.x_max - 1.0;
        lo[2 * i + 1] = box.y_min + 1.0;
        hi[2 * i + 1] = box.y_max - 1.0;
    }

    auto fleet_at = [&](std::span<const double> x) {
        std::vector<Drone> drones = scenario.tier2;
        for (std::size_t i = 0; i < n; ++i)
            drones[i].position = {x[2 * i], x[2 * i + 1]};
        return drones;
    };

    // Objective: one minus the mapping likelihood of the placement, over the
    // demand partition the placement itself induces.
    baselines::Objective objective = [&](std::span<const double> x) {
        const std::vector<Drone> drones = fleet_at(x);
        std::vector<geometry::Point2> positions;
        positions.reserve(n);
        for (const Drone& d : drones) positions.push_back(d.position);
        const std::vector<geometry::Point2> gens =
            distinct_generators(positions, scenario.bounds);
        const std::vector<geometry::ConvexPolygon> regions =
            geometry::voronoi_partition(gens, scenario.bounds);
        std::vector<demand::DemandCell> cells =
            demand::populate_cells(regions, gens, scenario.users);
        demand::classify_demand(cells);
        const double optimal =
            coverage::optimal_assignment_value(drones, cells, scenario.tan_half_aperture);
        if (!(optimal > 0.0)) return 0.0;
        const double achieved =
            coverage::achieved_assignment_value(drones, cells, scenario.tan_half_aperture);
        return 1.0 - std::clamp(achieved / optimal, 0.0, 1.0);
    };

    // Match the negotiation loop's stopping rule unless the caller pinned an
    // explicit target.
    if (params.target_value <= -1e299) params.target_value = nbrl_cfg.tolerance;

    const baselines::PsoResult result =
        algorithm == Algorithm::Vpso
            ? baselines::vpso_optimize(objective, lo, hi, params, scenario.seed)
            : baselines::pso_optimize(objective, lo, hi, params, scenario.seed);

    RunArtifacts art;
    art.series.algorithm = to_string(algorithm);
    art.series.seed = scenario.seed;
    art.series.lambda = scenario.lambda;
    art.series.tier1_count = static_cast<int>(scenario.tier1.size());
    art.series.converged = result.converged;
    art.series.iterations_to_converge = result.iterations_to_converge;

    const double step_seconds = scenario.sim.epoch_seconds + scenario.sim.service_seconds;
    const double horizon =
        static_cast<double>(std::max<std::size_t>(result.best_history.size(), 1)) *
        step_seconds;
    const double drain_per_iter =
        scenario.sim.flight_power_w * scenario.sim.epoch_seconds +
        scenario.sim.tx_power_w * scenario.sim.service_seconds;
    const double relay_drain_per_iter =
        scenario.sim.tx_power_w * scenario.sim.service_seconds;

    for (std::size_t ti = 0; ti < scenario.tier1.size(); ++ti) {
        const Drone& d = scenario.tier1[ti];
        art.mobility_rows.push_back(MobilityRow{0.0, d.id, d.tier, d.position.x,
                                                d.position.y, d.altitude_m});
    }
    for (const Drone& d : scenario.tier2)
        art.mobility_rows.push_back(MobilityRow{0.0, d.id, d.tier, d.position.x,
                                                d.position.y, d.altitude_m});

    std::size_t first = result.best_history.size() > 1 ? 1 : 0;
    FleetEval last_eval;
    for (std::size_t k = first; k < result.best_history.size(); ++k) {
        const double t = static_cast<double>(k) * step_seconds;
        std::vector<std::vector<Drone>> tiers{scenario.tier1,
                                              fleet_at(result.best_position_history[k])};
        for (Drone& d : tiers[0])
            d.resources.energy_j = std::max(
                0.0, d.resources.energy_j - static_cast<double>(k) * relay_drain_per_iter);
        for (Drone& d : tiers[1])
            d.resources.energy_j = std::max(
                0.0, d.resources.energy_j - static_cast<double>(k) * drain_per_iter);

        const FleetEval eval = evaluate_fleet(scenario, tiers, t, horizon);
        MetricsRecord record;
        record.iteration = static_cast<int>(k);
        record.accuracy = eval.accuracy;
        record.likelihood = 1.0 - result.best_history[k];
        record.users_handled = eval.handled;
        record.total_survivability = eval.total_survivability;
        art.series.records.push_back(record);

        for (const Drone& d : tiers[1])
            art.mobility_rows.push_back(
                MobilityRow{t, d.id, d.tier, d.position.x, d.position.y, d.altitude_m});

        for (std::size_t layer = 0; layer < tiers.size(); ++layer) {
            for (std::size_t di = 0; di < tiers[layer].size(); ++di) {
                const double term = eval.report.per_drone[layer][di];
                SurvivabilityRow s;
                s.t_s = t;
                s.layer = static_cast<int>(layer) + 1;
                s.drone_id = tiers[layer][di].id;
                s.f_t = term;
                s.s_d = (term > 0.0 && t > 0.0) ? -std::log(term) / t : 0.0;
                s.s_l = eval.report.per_layer[layer];
                s.s_t = eval.report.total;
                s.mode = surv::to_string(eval.report.mode);
                art.survivability_rows.push_back(s);
            }
        }
        last_eval = eval;
    }
    for (std::size_t k = 0; k < result.best_history.size(); ++k)
        art.score_history.push_back(ScoreRow{static_cast<int>(k), result.best_history[k],
                                             result.mean_history[k]});

    art.final_assignment = last_eval.assignment;
    art.final_cells = last_eval.serving_cells;
    art.final_serving_tier = fleet_at(result.best_position);
    art.scenario = std::move(scenario);
    return art;
}

void apply_axis(ScenarioConfig& cfg, const std::string& axis, double value,
                std::uint64_t& seed) {
    if (axis == "lambda") {
        if (!(value > 0.0))
            throw std::invalid_argument("sweep: lambda values must be positive");
        cfg.lambda_min = value;
        cfg.lambda_max = value;
    } else if (axis == "tier1") {
        if (!(value >= 1.0) || value != std::floor(value))
            throw std::invalid_argument("sweep: tier1 values must be positive integers");
        cfg.tier1_per_mbs = static_cast<int>(value);
    } else if (axis == "seed") {
        if (!(value >= 0.0) || value != std::floor(value))
            throw std::invalid_argument("sweep: seed values must be non-negative integers");
        seed = static_cast<std::uint64_t>(value);
    } else {
        throw std::invalid_argument("sweep: unknown axis '" + axis + "'");
    }
}

struct Job {
    ScenarioConfig cfg;
    Algorithm algorithm = Algorithm::Nbrl;
    std::uint64_t seed = 0;
    std::string axis;
    double value = 0.0;
};

std::vector<MetricsSeries> execute_jobs(std::span<const Job> jobs, int threads,
                                        const std::function<void(const MetricsSeries&)>& on_run,
                                        const SimParams& sim) {
    if (threads < 1) throw std::invalid_argument("sweep: threads must be >= 1");
    std::vector<MetricsSeries> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            try {
                results[j] = run_scenario(jobs[j].cfg, jobs[j].algorithm, jobs[j].seed,
                                          {}, {}, sim)
                                 .series;
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    const int pool = std::min<int>(threads, static_cast<int>(jobs.size()));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> workers;
        workers.reserve(pool);
        for (int i = 0; i < pool; ++i) workers.emplace_back(worker);
        for (std::thread& w : workers) w.join();
    }
    // Reduce in dispatch order so partial output is identical for any thread
    // count; the first failed job stops the scan.
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (errors[j]) std::rethrow_exception(errors[j]);
        if (on_run) on_run(results[j]);
    }
    return results;
}

SweepRow aggregate_group(const std::string& axis, double value, const std::string& algorithm,
                         std::span<const MetricsSeries> group) {
    SweepRow row;
    row.axis = axis;
    row.value = value;
    row.algorithm = algorithm;
    row.runs = static_cast<int>(group.size());
    if (group.empty()) return row;
    auto fold = [&](auto pick, double& mean, double& mn, double& mx) {
        double sum = 0.0;
        mn = 1e300;
        mx = -1e300;
        for (const MetricsSeries& s : group) {
            const double v = s.records.empty() ? 0.0 : pick(s.records.back());
            sum += v;
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        mean = sum / static_cast<double>(group.size());
    };
    fold([](const MetricsRecord& r) { return r.accuracy; }, row.accuracy_mean,
         row.accuracy_min, row.accuracy_max);
    fold([](const MetricsRecord& r) { return r.likelihood; }, row.likelihood_mean,
         row.likelihood_min, row.likelihood_max);
    fold([](const MetricsRecord& r) { return r.users_handled; }, row.handled_mean,
         row.handled_min, row.handled_max);
    fold([](const MetricsRecord& r) { return r.total_survivability; },
         row.survivability_mean, row.survivability_min, row.survivability_max);
    std::vector<int> iters;
    iters.reserve(group.size());
    double sum = 0.0;
    for (const MetricsSeries& s : group) {
        iters.push_back(s.iterations_to_converge);
        sum += s.iterations_to_converge;
        if (s.converged) ++row.converged_runs;
    }
    std::sort(iters.begin(), iters.end());
    row.iterations_mean = sum / static_cast<double>(group.size());
    row.iterations_median = iters[(iters.size() - 1) / 2];
    return row;
}

void open_or_throw(std::ofstream& out, const std::string& path) {
    out.open(path);
    if (!out) throw std::runtime_error("cannot write " + path);
}

json stats_json(std::span<const MetricsSeries> runs,
                double (*pick)(const MetricsRecord&)) {
    double sum = 0.0, mn = 1e300, mx = -1e300;
    for (const MetricsSeries& s : runs) {
        const double v = s.records.empty() ? 0.0 : pick(s.records.back());
        sum += v;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    json j;
    j["mean"] = runs.empty() ? 0.0 : sum / static_cast<double>(runs.size());
    j["min"] = runs.empty() ? 0.0 : mn;
    j["max"] = runs.empty() ? 0.0 : mx;
    return j;
}

}  // namespace

double allocation_accuracy(const coverage::LocationAssignment& assignment,
                           const coverage::LocationAssignment& oracle) {
    if (oracle.pairs.empty()) return 1.0;
    int hits = 0;
    for (const coverage::AssignedPair& want : oracle.pairs) {
        for (const coverage::AssignedPair& got : assignment.pairs) {
            if (got.drone_id == want.drone_id && got.cell_index == want.cell_index) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(oracle.pairs.size());
}

double users_handled_fraction(std::span<const Drone> accurate_drones,
                              std::span<const demand::User> users,
                              const ScenarioConfig& cfg, double tan_half_aperture) {
    return coverage::coverage_fraction(
        accurate_drones, users, tan_half_aperture,
        [&cfg](const Drone& d, geometry::Point2 p) {
            return friis_link_ok(d, demand::User{p, 0}, cfg);
        });
}

const char* to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Nbrl: return "nbrl";
        case Algorithm::Pso: return "pso";
        case Algorithm::Vpso: return "vpso";
    }
    throw std::invalid_argument("unknown algorithm");
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "nbrl") return Algorithm::Nbrl;
    if (name == "pso") return Algorithm::Pso;
    if (name == "vpso") return Algorithm::Vpso;
    throw std::invalid_argument("unknown algorithm '" + name + "'");
}

RunArtifacts run_scenario(const ScenarioConfig& cfg, Algorithm algorithm, std::uint64_t seed,
                          const nbrl::NbrlConfig& nbrl_cfg,
                          const baselines::PsoParams& pso_params, const SimParams& sim) {
    validate_config(cfg);
    Scenario scenario = build_scenario(cfg, sim, seed);
    if (algorithm != Algorithm::Nbrl)
        return run_swarm(std::move(scenario), algorithm, nbrl_cfg, pso_params);

    nbrl::NbrlRun run = nbrl::nbrl_run(scenario, nbrl_cfg);
    RunArtifacts art;
    art.series = std::move(run.series);
    art.nbrl_trace = std::move(run.trace);
    art.survivability_rows = std::move(run.survivability_rows);
    art.mobility_rows = std::move(run.mobility_rows);
    art.score_history = std::move(run.score_history);
    art.final_assignment = run.final_state.assignment;
    art.final_cells = run.final_state.cells;
    art.final_serving_tier = run.final_state.tiers.back();
    art.scenario = std::move(scenario);
    return art;
}

SweepResult sweep(const ScenarioConfig& cfg, const std::string& axis,
                  std::span<const double> values, std::span<const Algorithm> algorithms,
                  int seeds, int threads,
                  const std::function<void(const MetricsSeries&)>& on_run,
                  const SimParams& sim) {
    validate_config(cfg);
    if (values.empty()) throw std::invalid_argument("sweep: no axis values");
    if (algorithms.empty()) throw std::invalid_argument("sweep: no algorithms");
    if (seeds < 1) throw std::invalid_argument("sweep: seeds must be >= 1");

    std::vector<Job> jobs;
    for (const double value : values) {
        for (const Algorithm algorithm : algorithms) {
            // The seed axis pins the seed itself; other axes run seeds 1..n.
            const int run_count = axis == "seed" ? 1 : seeds;
            for (int s = 1; s <= run_count; ++s) {
                Job job;
                job.cfg = cfg;
                job.seed = static_cast<std::uint64_t>(s);
                apply_axis(job.cfg, axis, value, job.seed);
                validate_config(job.cfg);
                job.algorithm = algorithm;
                job.axis = axis;
                job.value = value;
                jobs.push_back(std::move(job));
            }
        }
    }

    SweepResult result;
    result.runs = execute_jobs(jobs, threads, on_run, sim);
    std::size_t j = 0;
    for (const double value : values) {
        for (const Algorithm algorithm : algorithms) {
            const std::size_t count = axis == "seed" ? 1 : static_cast<std::size_t>(seeds);
            result.rows.push_back(aggregate_group(
                axis, value, to_string(algorithm),
                std::span<const MetricsSeries>(result.runs.data() + j, count)));
            j += count;
        }
    }
    return result;
}

SweepResult compare_runs(const ScenarioConfig& cfg, int seeds, int threads,
                         const std::function<void(const MetricsSeries&)>& on_run,
                         const SimParams& sim) {
    validate_config(cfg);
    if (seeds < 1) throw std::invalid_argument("compare: seeds must be >= 1");
    const Algorithm algorithms[] = {Algorithm::Nbrl, Algorithm::Pso, Algorithm::Vpso};

    std::vector<Job> jobs;
    for (const Algorithm algorithm : algorithms) {
        for (int s = 1; s <= seeds; ++s) {
            Job job;
            job.cfg = cfg;
            job.algorithm = algorithm;
            job.seed = static_cast<std::uint64_t>(s);
            job.axis = "algo";
            jobs.push_back(std::move(job));
        }
    }
    SweepResult result;
    result.runs = execute_jobs(jobs, threads, on_run, sim);
    for (std::size_t a = 0; a < 3; ++a) {
        result.rows.push_back(aggregate_group(
            "algo", static_cast<double>(a), to_string(algorithms[a]),
            std::span<const MetricsSeries>(result.runs.data() + a * seeds,
                                           static_cast<std::size_t>(seeds))));
    }
    return result;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void write_metrics_csv(const std::string& path, std::span<const MetricsSeries> runs) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "iter,algo,seed,lambda,tier1,accuracy,likelihood,handled,S_T\n";
    for (const MetricsSeries& s : runs) {
        for (const MetricsRecord& r : s.records) {
            out << r.iteration << ',' << s.algorithm << ',' << s.seed << ','
                << format_double(s.lambda) << ',' << s.tier1_count << ','
                << format_double(r.accuracy) << ',' << format_double(r.likelihood) << ','
                << format_double(r.users_handled) << ','
                << format_double(r.total_survivability) << '\n';
        }
    }
}

void write_summary_json(const std::string& path, std::span<const MetricsSeries> runs,
                        std::span<const SweepRow> rows) {
    json j;
    j["runs"] = runs.size();
    int converged = 0;
    std::vector<std::string> algos;
    std::vector<int> iters;
    double iter_sum = 0.0;
    json per_run = json::array();
    for (const MetricsSeries& s : runs) {
        if (s.converged) ++converged;
        if (std::find(algos.begin(), algos.end(), s.algorithm) == algos.end())
            algos.push_back(s.algorithm);
        iters.push_back(s.iterations_to_converge);
        iter_sum += s.iterations_to_converge;
        json r;
        r["algo"] = s.algorithm;
        r["seed"] = s.seed;
        r["lambda"] = s.lambda;
        r["tier1"] = s.tier1_count;
        r["iterations"] = s.iterations_to_converge;
        r["converged"] = s.converged;
        r["final_accuracy"] = s.records.empty() ? 0.0 : s.records.back().accuracy;
        r["final_likelihood"] = s.records.empty() ? 0.0 : s.records.back().likelihood;
        r["final_handled"] = s.records.empty() ? 0.0 : s.records.back().users_handled;
        r["final_S_T"] = s.records.empty() ? 0.0 : s.records.back().total_survivability;
        per_run.push_back(std::move(r));
    }
    j["converged_runs"] = converged;
    j["algorithms"] = algos;
    if (!iters.empty()) {
        std::sort(iters.begin(), iters.end());
        json it;
        it["mean"] = iter_sum / static_cast<double>(iters.size());
        it["median"] = iters[(iters.size() - 1) / 2];
        it["min"] = iters.front();
        it["max"] = iters.back();
        j["iterations"] = std::move(it);
    }
    json final;
    final["accuracy"] = stats_json(runs, [](const MetricsRecord& r) { return r.accuracy; });
    final["likelihood"] =
        stats_json(runs, [](const MetricsRecord& r) { return r.likelihood; });
    final["users_handled"] =
        stats_json(runs, [](const MetricsRecord& r) { return r.users_handled; });
    final["total_survivability"] =
        stats_json(runs, [](const MetricsRecord& r) { return r.total_survivability; });
    j["final"] = std::move(final);
    j["per_run"] = std::move(per_run);
    if (!rows.empty()) {
        json sw = json::array();
        for (const SweepRow& row : rows) {
            json r;
            r["axis"] = row.axis;
            r["value"] = row.value;
            r["algo"] = row.algorithm;
            r["runs"] = row.runs;
            r["accuracy_mean"] = row.accuracy_mean;
            r["likelihood_mean"] = row.likelihood_mean;
            r["handled_mean"] = row.handled_mean;
            r["S_T_mean"] = row.survivability_mean;
            r["iters_mean"] = row.iterations_mean;
            r["iters_median"] = row.iterations_median;
            r["converged_runs"] = row.converged_runs;
            sw.push_back(std::move(r));
        }
        j["sweep"] = std::move(sw);
    }
    std::ofstream out;
    open_or_throw(out, path);
    out << j.dump(2) << '\n';
}

void write_survivability_csv(const std::string& path,
                             std::span<const SurvivabilityRow> rows) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "t_s,layer,drone_id,f_t,S_D,S_L,S_T,mode\n";
    for (const SurvivabilityRow& r : rows) {
        out << format_double(r.t_s) << ',' << r.layer << ',' << r.drone_id << ','
            << format_double(r.f_t) << ',' << format_double(r.s_d) << ','
            << format_double(r.s_l) << ',' << format_double(r.s_t) << ',' << r.mode
            << '\n';
    }
}

void write_mobility_csv(const std::string& path, std::span<const MobilityRow> rows) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "t_s,drone_id,tier,x_m,y_m,alt_m\n";
    for (const MobilityRow& r : rows) {
        out << format_double(r.t_s) << ',' << r.drone_id << ',' << r.tier << ','
            << format_double(r.x_m) << ',' << format_double(r.y_m) << ','
            << format_double(r.alt_m) << '\n';
    }
}

void write_nbrl_trace_csv(const std::string& path, std::span<const nbrl::TraceRow> rows) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "iter,tier,likelihood,accuracy,coverage,S_T,reshuffled\n";
    for (const nbrl::TraceRow& r : rows) {
        out << r.iteration << ',' << r.tier << ',' << format_double(r.likelihood) << ','
            << format_double(r.accuracy) << ',' << format_double(r.coverage) << ','
            << format_double(r.total_survivability) << ',' << r.reshuffled << '\n';
    }
}

void write_score_history_csv(const std::string& path, std::span<const ScoreRow> rows) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "iter,best_score,mean_score\n";
    for (const ScoreRow& r : rows) {
        out << r.iteration << ',' << format_double(r.best_score) << ','
            << format_double(r.mean_score) << '\n';
    }
}

void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows) {
    std::ofstream out;
    open_or_throw(out, path);
    out << "axis,value,algo,runs,accuracy_mean,accuracy_min,accuracy_max,"
           "likelihood_mean,likelihood_min,likelihood_max,handled_mean,handled_min,"
           "handled_max,S_T_mean,S_T_min,S_T_max,iters_mean,iters_median,"
           "converged_runs\n";
    for (const SweepRow& r : rows) {
        out << r.axis << ',' << format_double(r.value) << ',' << r.algorithm << ','
            << r.runs << ',' << format_double(r.accuracy_mean) << ','
            << format_double(r.accuracy_min) << ',' << format_double(r.accuracy_max) << ','
            << format_double(r.likelihood_mean) << ',' << format_double(r.likelihood_min)
            << ',' << format_double(r.likelihood_max) << ','
            << format_double(r.handled_mean) << ',' << format_double(r.handled_min) << ','
            << format_double(r.handled_max) << ',' << format_double(r.survivability_mean)
            << ',' << format_double(r.survivability_min) << ','
            << format_double(r.survivability_max) << ','
            << format_double(r.iterations_mean) << ',' << r.iterations_median << ','
            << r.converged_runs << '\n';
    }
}

void write_assignment_json(const std::string& path, const coverage::LocationAssignment& a,
                           std::span<const demand::DemandCell> cells) {
    json j;
    json pairs = json::array();
    for (const coverage::AssignedPair& p : a.pairs) {
        json e;
        e["drone_id"] = p.drone_id;
        e["cell_index"] = p.cell_index;
        e["target"] = {p.target.x, p.target.y};
        if (p.cell_index < cells.size()) {
            const demand::DemandCell& cell = cells[p.cell_index];
            e["cell_centroid"] = {cell.centroid.x, cell.centroid.y};
            e["demand_class"] = demand::to_string(cell.demand_class);
            e["total_requests"] = cell.total_requests;
        }
        pairs.push_back(std::move(e));
    }
    j["pairs"] = std::move(pairs);
    std::ofstream out;
    open_or_throw(out, path);
    out << j.dump(2) << '\n';
}

}  // namespace skytier::harness
