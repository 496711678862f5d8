#include "skytier/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace skytier::mobility {

namespace {

constexpr double kClearance = 1e-9;  // margin added past the exact touch point
constexpr int kMaxSweeps = 1000;

geometry::Aabb box_at(geometry::Point2 center, double side) {
    const double h = side / 2.0;
    return geometry::Aabb{center.x - h, center.x + h, center.y - h, center.y + h};
}

// Index of the waypoint governing time t (last waypoint at or before t).
std::size_t active_index(const MovePlan& plan, double t) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < plan.waypoints.size(); ++i) {
        if (plan.waypoints[i].time_s <= t + 1e-12) idx = i;
    }
    return idx;
}

}  // namespace

MovePlan plan_waypoints(int drone_id, const Pose& from, const Pose& to, double v_max,
                        double dt) {
    if (!(v_max > 0.0)) throw std::invalid_argument("plan_waypoints: v_max must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("plan_waypoints: dt must be positive");
    MovePlan plan;
    plan.drone_id = drone_id;
    const double dx = to.position.x - from.position.x;
    const double dy = to.position.y - from.position.y;
    const double dz = to.altitude_m - from.altitude_m;
    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (dist <= 0.0) {
        plan.waypoints.push_back(Waypoint{to.position, to.altitude_m, 0.0});
        return plan;
    }
    const int steps = static_cast<int>(std::ceil(dist / (v_max * dt) - 1e-12));
    plan.waypoints.reserve(static_cast<std::size_t>(steps) + 1);
    plan.waypoints.push_back(Waypoint{from.position, from.altitude_m, 0.0});
    for (int k = 1; k <= steps; ++k) {
        const double s = static_cast<double>(k) / steps;
        plan.waypoints.push_back(
            Waypoint{{from.position.x + s * dx, from.position.y + s * dy},
                     from.altitude_m + s * dz, k * dt});
    }
    plan.waypoints.back().position = to.position;
    plan.waypoints.back().altitude_m = to.altitude_m;
    return plan;
}

Pose plan_pose_at(const MovePlan& plan, double t) {
    if (plan.waypoints.empty()) throw std::invalid_argument("plan_pose_at: empty plan");
    const Waypoint& w = plan.waypoints[active_index(plan, t)];
    return Pose{w.position, w.altitude_m};
}

double plan_duration(const MovePlan& plan) {
    if (plan.waypoints.empty()) return 0.0;
    return plan.waypoints.back().time_s;
}

std::vector<MovePlan> enforce_separation(std::vector<MovePlan> plans,
                                         std::span<const double> footprint_sides,
                                         std::optional<double> zone_area) {
    if (plans.size() != footprint_sides.size())
        throw std::invalid_argument("enforce_separation: plans/footprints size mismatch");
    if (plans.size() < 2) return plans;

    if (zone_area) {
        double total = 0.0;
        for (double side : footprint_sides) total += side * side;
        if (total > *zone_area) {
            // Find one conflicting pair to name, if any exists.
            for (std::size_t i = 0; i < plans.size(); ++i) {
                for (std::size_t j = i + 1; j < plans.size(); ++j) {
                    const auto a = box_at(plans[i].waypoints.front().position, footprint_sides[i]);
                    const auto b = box_at(plans[j].waypoints.front().position, footprint_sides[j]);
                    if (geometry::aabb_overlap(a, b).overlapped)
                        throw std::runtime_error(
                            "enforce_separation: infeasible packing, drones " +
                            std::to_string(plans[i].drone_id) + " and " +
                            std::to_string(plans[j].drone_id) +
                            " exceed the available zone area");
                }
            }
        }
    }

    std::set<double> times;
    for (const MovePlan& plan : plans) {
        if (plan.waypoints.empty())
            throw std::invalid_argument("enforce_separation: empty plan");
        for (const Waypoint& w : plan.waypoints) times.insert(w.time_s);
    }

    // Later-id drones yield; process pairs ordered so repairs are
    // deterministic, then re-sweep until a fixed point.
    std::vector<std::size_t> order(plans.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return plans[a].drone_id < plans[b].drone_id;
    });

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        // Minimal shifts can cycle when two earlier drones box a later one
        // in: each repair clears one pair and recreates the other. Past the
        // first rounds the clearance grows geometrically so the yielding
        // drone escapes the trap instead of oscillating inside it.
        const double clearance =
            sweep < 32 ? kClearance
                       : kClearance * std::ldexp(1.0, std::min(sweep - 31, 50));
        bool conflict_found = false;
        for (double t : times) {
            for (std::size_t oi = 0; oi < order.size(); ++oi) {
                for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
                    const std::size_t i = order[oi];
                    const std::size_t j = order[oj];
                    const std::size_t wi = active_index(plans[i], t);
                    const std::size_t wj = active_index(plans[j], t);
                    const geometry::Point2 ci = plans[i].waypoints[wi].position;
                    geometry::Point2 cj = plans[j].waypoints[wj].position;
                    const auto overlap = geometry::aabb_overlap(
                        box_at(ci, footprint_sides[i]), box_at(cj, footprint_sides[j]));
                    if (!overlap.overlapped) continue;
                    conflict_found = true;
                    // Shift the later-id drone along the line between centers
                    // until one axis overlap closes.
                    geometry::Point2 dir = cj - ci;
                    const double norm = std::sqrt(dot(dir, dir));
                    double shift;
                    if (norm <= kClearance) {
                        dir = {1.0, 0.0};
                        shift = overlap.x_overlap + clearance;
                    } else {
                        dir = (1.0 / norm) * dir;
                        const double sx = std::abs(dir.x) > 0.0
                                              ? overlap.x_overlap / std::abs(dir.x)
                                              : std::numeric_limits<double>::infinity();
                        const double sy = std::abs(dir.y) > 0.0
                                              ? overlap.y_overlap / std::abs(dir.y)
                                              : std::numeric_limits<double>::infinity();
                        shift = std::min(sx, sy) + clearance;
                    }
                    plans[j].waypoints[wj].position = cj + shift * dir;
                }
            }
        }
        if (!conflict_found) return plans;
    }
    throw std::runtime_error("enforce_separation: no conflict-free arrangement found");
}

CoordinatorRef coordinator_for(const Drone& drone, const TierTopology& topology) {
    if (topology.tier1.empty() && topology.mbs.empty())
        throw std::runtime_error("coordinator_for: isolated network, no coordinator");

    auto nearest = [&](const std::vector<CoordinatorNode>& nodes) {
        std::size_t best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double dz = nodes[i].altitude_m - drone.altitude_m;
            const double d2 =
                geometry::squared_distance(nodes[i].position, drone.position) + dz * dz;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = i;
            }
        }
        return std::make_pair(best, std::sqrt(best_d2));
    };

    if (drone.tier >= 2 && !topology.tier1.empty()) {
        // Nearest tier-1 relay that has the drone in range.
        std::size_t best = topology.tier1.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < topology.tier1.size(); ++i) {
            const CoordinatorNode& node = topology.tier1[i];
            const double dz = node.altitude_m - drone.altitude_m;
            const double d =
                std::sqrt(geometry::squared_distance(node.position, drone.position) + dz * dz);
            if (d <= node.range_m && d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best < topology.tier1.size())
            return CoordinatorRef{CoordinatorRef::Kind::Tier1, best, true};
    }
    if (topology.mbs.empty())
        throw std::runtime_error("coordinator_for: isolated network, no coordinator");
    const auto [idx, dist] = nearest(topology.mbs);
    const bool in_range = topology.mbs[idx].range_m <= 0.0 || dist <= topology.mbs[idx].range_m;
    return CoordinatorRef{CoordinatorRef::Kind::Mbs, idx, in_range};
}

}  // namespace skytier::mobility
