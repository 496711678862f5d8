#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace skytier::baselines {

struct PsoParams {
    double inertia = 0.729;
    double cognitive = 1.494;
    double social = 1.494;
    int swarm_size = 30;
    int iterations = 200;
    // Converged once the global best drops to this value or below.
    double target_value = -1e300;
};

struct PsoResult {
    std::vector<double> best_position;
    double best_value = 0.0;
    // Global best after initialization (index 0) and after each iteration.
    std::vector<double> best_history;
    // Mean particle objective value at the same instants.
    std::vector<double> mean_history;
    // Global-best position at the same instants, one flat vector per entry.
    std::vector<std::vector<double>> best_position_history;
    int iterations_to_converge = 0;  // 0 when already converged at init
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Canonical global-best PSO minimizing f over the box [lo, hi]^d.
// Deterministic for a fixed seed; velocities start at zero and positions are
// clamped to the box.
PsoResult pso_optimize(const Objective& f, std::span<const double> lo,
                       std::span<const double> hi, const PsoParams& params,
                       std::uint64_t seed);

// Velocity-scaled PSO variant: each particle's updated velocity is scaled by
// 1 + d_i / max_j d_j, its swarm-relative distance to the global best, so
// far-out particles take longer strides while the particle sitting on the
// global best (zero velocity, zero pulls) stays put.
PsoResult vpso_optimize(const Objective& f, std::span<const double> lo,
                        std::span<const double> hi, const PsoParams& params,
                        std::uint64_t seed);

}  // namespace skytier::baselines
