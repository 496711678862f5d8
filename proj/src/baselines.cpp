#include "skytier/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skytier/rng.hpp"

namespace skytier::baselines {

namespace {

PsoResult swarm_optimize(const Objective& f, std::span<const double> lo,
                         std::span<const double> hi, const PsoParams& params,
                         std::uint64_t seed, bool distance_scaled) {
    if (lo.size() != hi.size() || lo.empty())
        throw std::invalid_argument("pso: inconsistent bounds");
    for (std::size_t d = 0; d < lo.size(); ++d) {
        if (!(lo[d] <= hi[d])) throw std::invalid_argument("pso: lo exceeds hi");
    }
    if (params.swarm_size < 1) throw std::invalid_argument("pso: swarm_size must be >= 1");
    if (params.iterations < 1) throw std::invalid_argument("pso: iterations must be >= 1");

    const std::size_t dims = lo.size();
    const int swarm = params.swarm_size;
    rng::Stream stream(seed);

    std::vector<std::vector<double>> pos(swarm, std::vector<double>(dims));
    std::vector<std::vector<double>> vel(swarm, std::vector<double>(dims, 0.0));
    std::vector<std::vector<double>> best_pos(swarm, std::vector<double>(dims));
    std::vector<double> value(swarm), best_value(swarm);

    PsoResult result;
    double g_value = 0.0;
    std::vector<double> g_pos(dims);
    for (int p = 0; p < swarm; ++p) {
        for (std::size_t d = 0; d < dims; ++d) pos[p][d] = stream.uniform(lo[d], hi[d]);
        value[p] = f(pos[p]);
        best_pos[p] = pos[p];
        best_value[p] = value[p];
        if (p == 0 || value[p] < g_value) {
            g_value = value[p];
            g_pos = pos[p];
        }
    }
    auto mean_value = [&]() {
        double acc = 0.0;
        for (int p = 0; p < swarm; ++p) acc += value[p];
        return acc / swarm;
    };
    result.best_history.push_back(g_value);
    result.mean_history.push_back(mean_value());
    result.best_position_history.push_back(g_pos);

    bool converged = g_value <= params.target_value;
    int converge_iter = 0;

    for (int it = 1; it <= params.iterations && !converged; ++it) {
        // Distances to the global best are snapshotted before any update so
        // the scaling is order-independent within the iteration.
        std::vector<double> dist(swarm, 0.0);
        double d_max = 0.0;
        if (distance_scaled) {
            for (int p = 0; p < swarm; ++p) {
                double acc = 0.0;
                for (std::size_t d = 0; d < dims; ++d) {
                    const double delta = pos[p][d] - g_pos[d];
                    acc += delta * delta;
                }
                dist[p] = std::sqrt(acc);
                d_max = std::max(d_max, dist[p]);
            }
        }
        for (int p = 0; p < swarm; ++p) {
            const double scale =
                distance_scaled ? (d_max > 0.0 ? 1.0 + dist[p] / d_max : 1.0) : 1.0;
            for (std::size_t d = 0; d < dims; ++d) {
                const double r1 = stream.uniform();
                const double r2 = stream.uniform();
                double v = params.inertia * vel[p][d] +
                           params.cognitive * r1 * (best_pos[p][d] - pos[p][d]) +
                           params.social * r2 * (g_pos[d] - pos[p][d]);
                v *= scale;
                vel[p][d] = v;
                pos[p][d] = std::clamp(pos[p][d] + v, lo[d], hi[d]);
            }
            value[p] = f(pos[p]);
            if (value[p] < best_value[p]) {
                best_value[p] = value[p];
                best_pos[p] = pos[p];
            }
        }
        // Synchronous global-best update keeps iterations well-defined.
        for (int p = 0; p < swarm; ++p) {
            if (best_value[p] < g_value) {
                g_value = best_value[p];
                g_pos = best_pos[p];
            }
        }
        result.best_history.push_back(g_value);
        result.mean_history.push_back(mean_value());
        result.best_position_history.push_back(g_pos);
        if (!converged && g_value <= params.target_value) {
            converged = true;
            converge_iter = it;
        }
    }

    result.best_position = g_pos;
    result.best_value = g_value;
    result.converged = converged;
    result.iterations_to_converge = converged ? converge_iter : params.iterations;
    return result;
}

}  // namespace

PsoResult pso_optimize(const Objective& f, std::span<const double> lo,
                       std::span<const double> hi, const PsoParams& params,
                       std::uint64_t seed) {
    return swarm_optimize(f, lo, hi, params, seed, false);
}

PsoResult vpso_optimize(const Objective& f, std::span<const double> lo,
                        std::span<const double> hi, const PsoParams& params,
                        std::uint64_t seed) {
    return swarm_optimize(f, lo, hi, params, seed, true);
}

}  // namespace skytier::baselines
