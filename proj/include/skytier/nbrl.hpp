#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "skytier/coverage.hpp"
#include "skytier/scenario.hpp"
#include "skytier/survivability.hpp"

namespace skytier::nbrl {

struct NbrlConfig {
    double tolerance = 0.05;
    int max_iterations = 100;
    double reshuffle_fraction = 0.25;
};

struct TraceRow {
    int iteration = 0;
    int tier = 0;
    double likelihood = 0.0;
    double accuracy = 0.0;
    double coverage = 0.0;
    double total_survivability = 0.0;
    int reshuffled = 0;
};

// Mutable loop state. Tier vectors are indexed tier-1 first; the serving
// tier is the last one. likelihood is the best mapping likelihood seen so
// far (non-decreasing across iterations).
struct NbrlState {
    int iteration = 0;
    std::vector<std::vector<Drone>> tiers;
    std::vector<demand::DemandCell> cells;        // serving-tier cells
    coverage::LocationAssignment assignment;      // serving-tier mapping
    double likelihood = 0.0;                      // best so far
    double current_likelihood = 0.0;
    surv::SurvivabilityReport report;
    bool converged = false;
    double sim_time_s = 0.0;
    std::map<int, geometry::Point2> forced_targets;  // reshuffle redirects
    std::vector<std::vector<surv::ConnectionCensus>> censuses;  // per tier
    // Incumbent (best-so-far) serving-tier snapshot.
    std::vector<Drone> best_serving;
    std::vector<demand::DemandCell> best_cells;
    coverage::LocationAssignment best_assignment;
};

NbrlState nbrl_init(const harness::Scenario& scenario);

// One full epoch: for each tier from the serving tier down to tier 1,
// rebuild the demand partition, solve the mapping, move with placement
// error and separation repair, then evaluate survivability and the mapping
// likelihood. Marks converged when the best likelihood reaches
// 1 - tolerance; otherwise redirects the worst-scoring drones toward
// unserved High/Medium cells for the next epoch.
NbrlState nbrl_iteration(NbrlState state, const harness::Scenario& scenario,
                         const NbrlConfig& config, std::vector<TraceRow>* trace = nullptr);

struct NbrlRun {
    NbrlState final_state;
    harness::MetricsSeries series;
    std::vector<TraceRow> trace;
    std::vector<harness::SurvivabilityRow> survivability_rows;
    std::vector<harness::MobilityRow> mobility_rows;
    std::vector<harness::ScoreRow> score_history;
};

NbrlRun nbrl_run(const harness::Scenario& scenario, const NbrlConfig& config);

}  // namespace skytier::nbrl
