#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "skytier/demand.hpp"
#include "skytier/drone.hpp"
#include "skytier/geometry.hpp"

namespace skytier::coverage {

// Half-aperture tangent of the service cone. Chosen so that a drone at the
// bottom of the working altitude band (200 ft) projects a square footprint
// of 1000 m^2.
double default_tan_half_aperture();

struct Footprint {
    geometry::Point2 center{};
    double side_m = 0.0;
    double altitude_m = 0.0;
};

double footprint_side(double altitude_m, double tan_half_aperture);
Footprint footprint_of(const Drone& drone, double tan_half_aperture);
geometry::Aabb footprint_box(const Footprint& fp);

// Demand priority weight: High 3, Medium 2, Low 1, None 0.
int demand_weight(demand::DemandClass c);

struct AssignedPair {
    int drone_id = 0;
    std::size_t cell_index = 0;
    geometry::Point2 target{};
};

struct LocationAssignment {
    std::vector<AssignedPair> pairs;  // sorted by cell_index
};

// Gain of serving a cell from a footprint centered at `at`: the covered
// fraction of the cell area, weighted by the cell's demand class and
// discounted by how much the placed footprint still overlaps the footprint
// it would cast from the cell target (1 when `at` is the target, 0 once the
// two footprints separate). The discount makes the achieved score sensitive
// to placement error while leaving target-anchored matching weights exact.
double pair_gain(const Footprint& fp, const demand::DemandCell& cell, geometry::Point2 at);

// Total weighted gain of an assignment with every footprint at its target.
double assignment_score(const LocationAssignment& assignment,
                        std::span<const demand::DemandCell> cells,
                        std::span<const Drone> drones, double tan_half_aperture);

// Optimal drone-to-cell matching under the weighted-gain objective. Ties are
// broken deterministically: lowest cell index first, then lowest drone id.
// Pairs with zero gain are dropped; each pair's target is its cell's demand
// target.
LocationAssignment assign_drones(std::span<const Drone> drones,
                                 std::span<const demand::DemandCell> cells,
                                 double tan_half_aperture);

// Matching values without the tie-break pass (used by optimizers that only
// need the score): optimal places footprints at the cell targets, achieved
// places them at the drones' current positions.
double optimal_assignment_value(std::span<const Drone> drones,
                                std::span<const demand::DemandCell> cells,
                                double tan_half_aperture);
double achieved_assignment_value(std::span<const Drone> drones,
                                 std::span<const demand::DemandCell> cells,
                                 double tan_half_aperture);

// Ratio of achieved score (footprints at the drones' current positions,
// matched as assigned) to the optimal score; 1 when the optimal score is 0.
double mapping_likelihood(const LocationAssignment& assignment,
                          std::span<const demand::DemandCell> cells,
                          std::span<const Drone> drones, double tan_half_aperture);

// Displaces a target uniformly within a disc of radius epsilon_max.
geometry::Point2 apply_placement_error(geometry::Point2 target, double epsilon_max,
                                       std::uint64_t seed);

// One Lloyd step: every pair's target moves to its cell's demand target.
// Idempotent once targets coincide with the cell targets.
LocationAssignment centroidal_step(LocationAssignment assignment,
                                   std::span<const demand::DemandCell> cells);

using LinkPredicate = std::function<bool(const Drone&, geometry::Point2)>;

// Fraction of users covered by at least one drone footprint whose link
// predicate also holds. Users with no footprint over them count uncovered.
double coverage_fraction(std::span<const Drone> drones, std::span<const demand::User> users,
                         double tan_half_aperture, const LinkPredicate& link_ok);

}  // namespace skytier::coverage
