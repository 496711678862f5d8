#include "skytier/survivability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "skytier/geometry.hpp"

namespace skytier::surv {

const char* to_string(Mode mode) {
    return mode == Mode::Normalized ? "normalized" : "literal";
}

double resource_index(const DroneResources& r, const DroneResources& initial,
                      double lambda, double lambda0) {
    if (!(initial.memory > 0.0) || !(initial.energy_j > 0.0) ||
        !(initial.radio_range_m > 0.0) || !(initial.transmission_time_s > 0.0))
        throw std::invalid_argument("resource_index: initial fields must be positive");
    if (!(lambda > 0.0) || !(lambda0 > 0.0))
        throw std::invalid_argument("resource_index: request rates must be positive");
    auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
    const double beta = clamp01(r.memory / initial.memory);
    const double energy = clamp01(r.energy_j / initial.energy_j);
    const double range = clamp01(r.radio_range_m / initial.radio_range_m);
    const double timing = r.transmission_time_s > 0.0
                              ? std::min(1.0, initial.transmission_time_s / r.transmission_time_s)
                              : 0.0;
    const double product = beta * energy * range * timing;
    if (product <= 0.0) return 0.0;
    return std::pow(product, 0.25) * std::min(1.0, lambda0 / lambda);
}

double drone_survivability(double f_t, double f_0, double t) {
    if (!(f_0 > 0.0)) throw std::invalid_argument("drone_survivability: f_0 must be positive");
    if (!(f_t > 0.0)) throw std::invalid_argument("drone_survivability: f_t must be positive");
    if (f_t > f_0) throw std::invalid_argument("drone_survivability: f_t exceeds f_0");
    if (!(t > 0.0)) throw std::invalid_argument("drone_survivability: t must be positive");
    return -std::log(f_t / f_0) / t;
}

double layer_survivability(std::span<const LayerDrone> drones) {
    if (drones.empty()) throw std::invalid_argument("layer_survivability: empty layer");
    double product = 1.0;
    for (const LayerDrone& d : drones) {
        if (d.census.total <= 0)
            throw std::invalid_argument("layer_survivability: census total must be positive");
        if (d.census.active < 0 || d.census.active > d.census.total)
            throw std::invalid_argument("layer_survivability: census out of range");
        product *= d.survival_term * static_cast<double>(d.census.active) /
                   static_cast<double>(d.census.total);
    }
    return product;
}

double total_survivability(std::span<const LayerSummary> layers, int fleet_size) {
    if (fleet_size <= 0) throw std::invalid_argument("total_survivability: empty fleet");
    double product = 1.0;
    for (const LayerSummary& layer : layers) {
        if (layer.active_count < 0 || layer.active_count > fleet_size)
            throw std::invalid_argument("total_survivability: active count out of range");
        if (layer.active_count > layer.layer_size)
            throw std::invalid_argument("total_survivability: active exceeds layer size");
        product *= layer.layer_survivability * static_cast<double>(layer.active_count) /
                   static_cast<double>(fleet_size);
    }
    return product;
}

ConnectionCensus census_active(const Drone& drone, std::span<const demand::User> assigned,
                               const CensusParams& params) {
    if (!(drone.resources.radio_range_m > 0.0))
        throw std::invalid_argument("census_active: radio range must be positive");
    const bool energy_ok = drone.resources.energy_j >=
                           params.tx_power_w * drone.resources.transmission_time_s;
    if (assigned.empty()) {
        // No served users: the census covers the coordinator uplink only.
        ConnectionCensus census;
        census.total = 1;
        census.active = energy_ok ? 1 : 0;
        return census;
    }
    long long load = 0;
    for (const demand::User& u : assigned) load += u.request_count;
    const bool buffer_ok = static_cast<double>(load) <=
                           params.buffer_capacity_requests * drone.resources.memory;
    ConnectionCensus census;
    census.total = static_cast<int>(assigned.size());
    if (!energy_ok || !buffer_ok) return census;
    const double range2 = drone.resources.radio_range_m * drone.resources.radio_range_m;
    for (const demand::User& u : assigned) {
        const double d2 = geometry::squared_distance(drone.position, u.position) +
                          drone.altitude_m * drone.altitude_m;
        if (d2 <= range2) ++census.active;
    }
    return census;
}

SurvivabilityReport make_report(std::span<const LayerSnapshot> layers, int fleet_size,
                                double t, double horizon, Mode mode) {
    if (t < 0.0 || horizon < 0.0 || t > horizon)
        throw std::invalid_argument("make_report: bad time window");
    SurvivabilityReport report;
    report.mode = mode;
    report.time_s = t;
    report.horizon_s = horizon;
    std::vector<LayerSummary> summaries;
    summaries.reserve(layers.size());
    for (const LayerSnapshot& layer : layers) {
        std::vector<LayerDrone> terms;
        terms.reserve(layer.drones.size());
        std::vector<double> per_drone;
        per_drone.reserve(layer.drones.size());
        for (const DroneSnapshot& d : layer.drones) {
            double term = 0.0;
            if (d.f_t > 0.0) {
                if (mode == Mode::Normalized) {
                    term = std::min(1.0, d.f_t / d.f_0);
                } else {
                    term = t > 0.0 ? drone_survivability(std::min(d.f_t, d.f_0), d.f_0, t) : 0.0;
                }
            }
            per_drone.push_back(term);
            terms.push_back(LayerDrone{term, d.census});
        }
        const double s_l = layer_survivability(terms);
        report.per_drone.push_back(std::move(per_drone));
        report.per_layer.push_back(s_l);
        summaries.push_back(LayerSummary{s_l, layer.active_count,
                                         static_cast<int>(layer.drones.size())});
    }
    report.total = total_survivability(summaries, fleet_size);
    return report;
}

SurvivabilityMatrix::SurvivabilityMatrix(std::size_t nodes, std::size_t peers,
                                         double support_threshold)
    : nodes_(nodes), peers_(peers), support_threshold_(support_threshold),
      entries_(nodes * peers) {
    if (nodes == 0 || peers == 0)
        throw std::invalid_argument("survivability matrix: empty dimensions");
}

std::size_t SurvivabilityMatrix::index(std::size_t node, std::size_t peer) const {
    if (node >= nodes_ || peer >= peers_)
        throw std::out_of_range("survivability matrix: index out of range");
    return node * peers_ + peer;
}

void SurvivabilityMatrix::update(std::size_t node, std::size_t peer, double timestamp_s,
                                 double resource_index, bool active) {
    MatrixEntry& entry = entries_[index(node, peer)];
    if (timestamp_s < entry.timestamp_s)
        throw std::invalid_argument("survivability matrix: timestamp regression");
    entry = MatrixEntry{timestamp_s, resource_index, active};
}

const MatrixEntry& SurvivabilityMatrix::at(std::size_t node, std::size_t peer) const {
    return entries_[index(node, peer)];
}

double SurvivabilityMatrix::row_mean(std::size_t node) const {
    double acc = 0.0;
    for (std::size_t p = 0; p < peers_; ++p) acc += entries_[index(node, p)].resource_index;
    return acc / static_cast<double>(peers_);
}

std::vector<std::size_t> SurvivabilityMatrix::support_requests() const {
    std::vector<std::size_t> flagged;
    for (std::size_t n = 0; n < nodes_; ++n) {
        if (row_mean(n) < support_threshold_) flagged.push_back(n);
    }
    return flagged;
}

}  // namespace skytier::surv
