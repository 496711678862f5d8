#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "skytier/geometry.hpp"

namespace skytier::demand {

struct User {
    geometry::Point2 position{};
    int request_count = 0;
};

enum class DemandClass { High, Medium, Low, None };

const char* to_string(DemandClass c);

struct ClusterSpec {
    int cluster_count = 3;
    double sigma_m = 150.0;
    double clustered_fraction = 0.3;
};

struct DemandCell {
    geometry::ConvexPolygon region;
    std::vector<std::size_t> users;  // indices into the population
    long long total_requests = 0;
    DemandClass demand_class = DemandClass::None;
    geometry::Point2 centroid{};
    double polar_moment = 0.0;
    // Request-weighted mean of the member users; falls back to the geometric
    // centroid when the cell carries no requests.
    geometry::Point2 target{};
};

// Samples a population inside bounds: a clustered fraction around seeded
// cluster centers, the rest uniform; request counts are Poisson(lambda).
std::vector<User> generate_users(int count, double lambda,
                                 const geometry::ConvexPolygon& bounds,
                                 const ClusterSpec& clusters, std::uint64_t seed);

// Assigns each user to the nearest generator and fills the per-cell
// aggregates (counts, geometric centroid, polar moment, demand target).
std::vector<DemandCell> populate_cells(std::span<const geometry::ConvexPolygon> regions,
                                       std::span<const geometry::Point2> generators,
                                       std::span<const User> users);

// Ranks cells by request density and splits the nonzero cells into
// High/Medium/Low thirds; zero-demand cells are None.
void classify_demand(std::span<DemandCell> cells);

void write_users_csv(const std::string& path, std::span<const User> users);
std::vector<User> read_users_csv(const std::string& path);

}  // namespace skytier::demand
