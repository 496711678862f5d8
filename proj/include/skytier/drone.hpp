#pragma once

#include "skytier/geometry.hpp"

namespace skytier {

// Per-drone resource state: beta (buffer headroom as a fraction of initial),
// energy, radio range and per-exchange transmission time.
struct DroneResources {
    double memory = 1.0;              // fraction of initial buffer, in [0,1]
    double energy_j = 1.0;
    double radio_range_m = 1.0;
    double transmission_time_s = 1.0;
};

struct Drone {
    int id = 0;
    int tier = 2;
    geometry::Point2 position{};
    double altitude_m = 0.0;
    DroneResources resources{};
    DroneResources initial{};
};

}  // namespace skytier
