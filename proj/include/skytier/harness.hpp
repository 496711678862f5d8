#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "skytier/baselines.hpp"
#include "skytier/coverage.hpp"
#include "skytier/nbrl.hpp"
#include "skytier/scenario.hpp"

namespace skytier::harness {

// Fraction of the oracle's assigned drones whose cell matches in
// `assignment`; 1.0 when the oracle assigns nothing.
double allocation_accuracy(const coverage::LocationAssignment& assignment,
                           const coverage::LocationAssignment& oracle);

// Fraction of users inside the footprint of an accurate drone with a
// feasible link.
double users_handled_fraction(std::span<const Drone> accurate_drones,
                              std::span<const demand::User> users,
                              const ScenarioConfig& cfg, double tan_half_aperture);

enum class Algorithm { Nbrl, Pso, Vpso };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

struct RunArtifacts {
    MetricsSeries series;
    std::vector<nbrl::TraceRow> nbrl_trace;
    std::vector<SurvivabilityRow> survivability_rows;
    std::vector<MobilityRow> mobility_rows;
    std::vector<ScoreRow> score_history;
    coverage::LocationAssignment final_assignment;
    std::vector<demand::DemandCell> final_cells;
    std::vector<Drone> final_serving_tier;
    Scenario scenario;
};

RunArtifacts run_scenario(const ScenarioConfig& cfg, Algorithm algorithm, std::uint64_t seed,
                          const nbrl::NbrlConfig& nbrl_cfg = {},
                          const baselines::PsoParams& pso_params = {},
                          const SimParams& sim = {});

struct SweepRow {
    std::string axis;
    double value = 0.0;
    std::string algorithm;
    int runs = 0;
    double accuracy_mean = 0.0, accuracy_min = 0.0, accuracy_max = 0.0;
    double likelihood_mean = 0.0, likelihood_min = 0.0, likelihood_max = 0.0;
    double handled_mean = 0.0, handled_min = 0.0, handled_max = 0.0;
    double survivability_mean = 0.0, survivability_min = 0.0, survivability_max = 0.0;
    double iterations_mean = 0.0;
    int iterations_median = 0;
    int converged_runs = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<MetricsSeries> runs;  // in dispatch order
};

// One run per (value, algorithm, seed); runs may execute on worker threads
// but results are reduced in dispatch order so output is thread-count
// independent. on_run, when set, observes each finished run in that order
// (used to flush partial results before an error propagates).
SweepResult sweep(const ScenarioConfig& cfg, const std::string& axis,
                  std::span<const double> values, std::span<const Algorithm> algorithms,
                  int seeds, int threads = 1,
                  const std::function<void(const MetricsSeries&)>& on_run = nullptr,
                  const SimParams& sim = {});

// All three algorithms on the base config over seeds 1..n, aggregated per
// algorithm (axis "algo"). Same threading and reduction rules as sweep.
SweepResult compare_runs(const ScenarioConfig& cfg, int seeds, int threads = 1,
                         const std::function<void(const MetricsSeries&)>& on_run = nullptr,
                         const SimParams& sim = {});

// CSV/JSON writers. Floating-point values are serialized with %.12g so the
// files are byte-stable.
std::string format_double(double v);
void write_metrics_csv(const std::string& path, std::span<const MetricsSeries> runs);
void write_summary_json(const std::string& path, std::span<const MetricsSeries> runs,
                        std::span<const SweepRow> rows);
void write_survivability_csv(const std::string& path, std::span<const SurvivabilityRow> rows);
void write_mobility_csv(const std::string& path, std::span<const MobilityRow> rows);
void write_nbrl_trace_csv(const std::string& path, std::span<const nbrl::TraceRow> rows);
void write_score_history_csv(const std::string& path, std::span<const ScoreRow> rows);
void write_sweep_csv(const std::string& path, std::span<const SweepRow> rows);
void write_assignment_json(const std::string& path, const coverage::LocationAssignment& a,
                           std::span<const demand::DemandCell> cells);

}  // namespace skytier::harness
