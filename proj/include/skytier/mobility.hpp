#pragma once

#include <optional>
#include <span>
#include <vector>

#include "skytier/coverage.hpp"
#include "skytier/drone.hpp"
#include "skytier/geometry.hpp"

namespace skytier::mobility {

struct Pose {
    geometry::Point2 position{};
    double altitude_m = 0.0;
};

struct Waypoint {
    geometry::Point2 position{};
    double altitude_m = 0.0;
    double time_s = 0.0;
};

struct MovePlan {
    int drone_id = 0;
    std::vector<Waypoint> waypoints;  // strictly increasing times, starts at t=0
};

// Straight-line plan sampled every dt seconds at speed at most v_max. The
// first waypoint is the start pose at t=0 and the last is exactly the
// destination; a degenerate move yields the single start waypoint.
MovePlan plan_waypoints(int drone_id, const Pose& from, const Pose& to, double v_max,
                        double dt);

// Position along the plan at time t (holds the last waypoint after the end).
Pose plan_pose_at(const MovePlan& plan, double t);

double plan_duration(const MovePlan& plan);

// Repairs same-tier footprint conflicts: at every common timestep, any two
// footprints must have aabb_overlap false. The later-id drone of a
// conflicting pair is shifted along the line between centers until clear.
// When zone_area is given and the tier's total footprint area exceeds it,
// the first conflict reports the infeasible packing instead. Idempotent.
std::vector<MovePlan> enforce_separation(std::vector<MovePlan> plans,
                                         std::span<const double> footprint_sides,
                                         std::optional<double> zone_area = std::nullopt);

struct CoordinatorNode {
    int id = 0;
    geometry::Point2 position{};
    double altitude_m = 0.0;
    double range_m = 0.0;
};

struct TierTopology {
    std::vector<CoordinatorNode> tier1;
    std::vector<CoordinatorNode> mbs;
};

struct CoordinatorRef {
    enum class Kind { Tier1, Mbs } kind = Kind::Mbs;
    std::size_t index = 0;
    bool in_range = false;
};

// Coordinator lookup: a tier-2 drone prefers the nearest in-range tier-1
// relay and falls back to the nearest MBS; tier-1 drones answer to the
// nearest MBS. Throws std::runtime_error when the topology is empty.
CoordinatorRef coordinator_for(const Drone& drone, const TierTopology& topology);

}  // namespace skytier::mobility
