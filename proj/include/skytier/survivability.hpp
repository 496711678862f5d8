#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "skytier/demand.hpp"
#include "skytier/drone.hpp"

namespace skytier::surv {

// How per-drone decay enters the layer product: Normalized uses the survival
// probability f_t/f_0 = exp(-S_D t); Literal uses the rate S_D itself.
enum class Mode { Normalized, Literal };

const char* to_string(Mode mode);

// Scalar health index in [0, 1]: geometric mean of the clamped buffer,
// energy, range and timing ratios, damped by request pressure above the
// reference rate lambda0. Throws when any initial field is <= 0.
double resource_index(const DroneResources& r, const DroneResources& initial,
                      double lambda, double lambda0 = 5.0);

// Decay-rate estimate S_D = -(1/t) ln(f_t / f_0).
// Throws std::invalid_argument when f_t <= 0, f_0 <= 0, f_t > f_0 or t <= 0.
double drone_survivability(double f_t, double f_0, double t);

struct ConnectionCensus {
    int total = 1;
    int active = 0;
};

struct LayerDrone {
    double survival_term = 1.0;
    ConnectionCensus census{};
};

// Series (Lusser) product over one layer: prod_j(term_j * C_A/C_T).
// Throws on an empty list or a non-positive census total.
double layer_survivability(std::span<const LayerDrone> drones);

struct LayerSummary {
    double layer_survivability = 1.0;
    int active_count = 0;
    int layer_size = 0;
};

// Series product over layers: prod_i(S_L,i * D_A,i / fleet_size).
// Throws when fleet_size <= 0 or an active count is out of range.
double total_survivability(std::span<const LayerSummary> layers, int fleet_size);

struct CensusParams {
    double tx_power_w = 5.0;
    // Absolute request slots at full memory; admission compares the cell load
    // against capacity scaled by the drone's memory fraction.
    double buffer_capacity_requests = 1000.0;
};

// Census over the users assigned to the drone's cell: a connection is active
// iff the user is within radio range, the remaining energy covers one
// transmission and the buffered load fits the memory-scaled capacity. A
// drone with no assigned users reports its coordinator uplink only.
ConnectionCensus census_active(const Drone& drone, std::span<const demand::User> assigned,
                               const CensusParams& params = {});

struct DroneSnapshot {
    double f_t = 1.0;
    double f_0 = 1.0;
    ConnectionCensus census{};
};

struct LayerSnapshot {
    std::vector<DroneSnapshot> drones;
    int active_count = 0;  // drones still counted operational in the layer
};

struct SurvivabilityReport {
    std::vector<std::vector<double>> per_drone;  // survival term per drone, by layer
    std::vector<double> per_layer;
    double total = 0.0;
    Mode mode = Mode::Normalized;
    double time_s = 0.0;
    double horizon_s = 0.0;
};

// Builds the full report at time t. Exhausted drones (f_t <= 0) contribute a
// zero term in both modes; t = 0 yields a zero decay rate in literal mode.
SurvivabilityReport make_report(std::span<const LayerSnapshot> layers, int fleet_size,
                                double t, double horizon, Mode mode);

struct MatrixEntry {
    double timestamp_s = 0.0;
    double resource_index = 1.0;
    bool active = false;
};

// Per-node view of peer health, updated from exchanged status messages.
// Single-writer: updates must carry non-decreasing timestamps per entry.
class SurvivabilityMatrix {
  public:
    SurvivabilityMatrix(std::size_t nodes, std::size_t peers, double support_threshold = 0.2);

    void update(std::size_t node, std::size_t peer, double timestamp_s,
                double resource_index, bool active);
    const MatrixEntry& at(std::size_t node, std::size_t peer) const;
    std::size_t node_count() const { return nodes_; }
    std::size_t peer_count() const { return peers_; }

    // Mean resource index across the node's peer row.
    double row_mean(std::size_t node) const;
    // Nodes whose observed mean peer health dropped below the threshold,
    // i.e. rows that should request resource support.
    std::vector<std::size_t> support_requests() const;

  private:
    std::size_t index(std::size_t node, std::size_t peer) const;

    std::size_t nodes_;
    std::size_t peers_;
    double support_threshold_;
    std::vector<MatrixEntry> entries_;
};

}  // namespace skytier::surv
