#include "skytier/demand.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "skytier/rng.hpp"

namespace skytier::demand {

const char* to_string(DemandClass c) {
    switch (c) {
        case DemandClass::High: return "high";
        case DemandClass::Medium: return "medium";
        case DemandClass::Low: return "low";
        case DemandClass::None: return "none";
    }
    return "none";
}

std::vector<User> generate_users(int count, double lambda,
                                 const geometry::ConvexPolygon& bounds,
                                 const ClusterSpec& clusters, std::uint64_t seed) {
    if (count < 0) throw std::invalid_argument("generate_users: negative count");
    if (!(lambda > 0.0)) throw std::invalid_argument("generate_users: lambda must be positive");
    if (clusters.cluster_count < 0 || clusters.clustered_fraction < 0.0 ||
        clusters.clustered_fraction > 1.0)
        throw std::invalid_argument("generate_users: bad cluster spec");

    rng::Stream stream(seed);
    const geometry::Aabb box = geometry::bounding_box(bounds);

    auto uniform_in_bounds = [&]() {
        for (;;) {
            geometry::Point2 p{stream.uniform(box.x_min, box.x_max),
                               stream.uniform(box.y_min, box.y_max)};
            if (geometry::polygon_contains(bounds, p)) return p;
        }
    };

    std::vector<geometry::Point2> centers;
    centers.reserve(static_cast<std::size_t>(clusters.cluster_count));
    for (int k = 0; k < clusters.cluster_count; ++k) centers.push_back(uniform_in_bounds());

    std::vector<User> users;
    users.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        geometry::Point2 pos;
        const bool clustered =
            !centers.empty() && stream.uniform() < clusters.clustered_fraction;
        if (clustered) {
            const std::size_t k = static_cast<std::size_t>(stream.uniform_int(centers.size()));
            for (;;) {
                pos = centers[k] + geometry::Point2{stream.normal(0.0, clusters.sigma_m),
                                                    stream.normal(0.0, clusters.sigma_m)};
                if (geometry::polygon_contains(bounds, pos)) break;
            }
        } else {
            pos = uniform_in_bounds();
        }
        users.push_back(User{pos, stream.poisson(lambda)});
    }
    return users;
}

std::vector<DemandCell> populate_cells(std::span<const geometry::ConvexPolygon> regions,
                                       std::span<const geometry::Point2> generators,
                                       std::span<const User> users) {
    if (regions.size() != generators.size())
        throw std::invalid_argument("populate_cells: regions/generators size mismatch");
    if (regions.empty()) throw std::invalid_argument("populate_cells: no cells");

    std::vector<DemandCell> cells(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
        cells[i].region = regions[i];
        cells[i].centroid = geometry::polygon_centroid(regions[i]);
        cells[i].polar_moment = geometry::polygon_polar_moment(regions[i]);
    }
    for (std::size_t u = 0; u < users.size(); ++u) {
        std::size_t best = 0;
        double best_d = geometry::squared_distance(users[u].position, generators[0]);
        for (std::size_t i = 1; i < generators.size(); ++i) {
            const double d = geometry::squared_distance(users[u].position, generators[i]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        cells[best].users.push_back(u);
        cells[best].total_requests += users[u].request_count;
    }
    for (DemandCell& cell : cells) {
        if (cell.total_requests > 0) {
            double wx = 0.0, wy = 0.0;
            for (std::size_t u : cell.users) {
                const double w = static_cast<double>(users[u].request_count);
                wx += w * users[u].position.x;
                wy += w * users[u].position.y;
            }
            const double total = static_cast<double>(cell.total_requests);
            cell.target = {wx / total, wy / total};
        } else {
            cell.target = cell.centroid;
        }
    }
    return cells;
}

void classify_demand(std::span<DemandCell> cells) {
    if (cells.empty()) throw std::invalid_argument("classify_demand: empty cell list");
    std::vector<double> densities;
    densities.reserve(cells.size());
    for (const DemandCell& c : cells) {
        if (c.total_requests > 0)
            densities.push_back(static_cast<double>(c.total_requests) /
                                geometry::polygon_area(c.region));
    }
    if (densities.empty()) {
        for (DemandCell& c : cells) c.demand_class = DemandClass::None;
        return;
    }
    std::sort(densities.begin(), densities.end(), std::greater<double>());
    const std::size_t n = densities.size();
    // Tercile thresholds over the nonzero densities, ties toward the higher
    // class: a density equal to a boundary gets the better label.
    const double t_high = densities[(n + 2) / 3 - 1];
    const double t_mid = densities[(2 * n + 2) / 3 - 1];
    for (DemandCell& c : cells) {
        if (c.total_requests <= 0) {
            c.demand_class = DemandClass::None;
            continue;
        }
        const double d = static_cast<double>(c.total_requests) /
                         geometry::polygon_area(c.region);
        if (d >= t_high)
            c.demand_class = DemandClass::High;
        else if (d >= t_mid)
            c.demand_class = DemandClass::Medium;
        else
            c.demand_class = DemandClass::Low;
    }
}

void write_users_csv(const std::string& path, std::span<const User> users) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "x_m,y_m,request_count\n";
    char buf[96];
    for (const User& u : users) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%d\n", u.position.x, u.position.y,
                      u.request_count);
        out << buf;
    }
}

std::vector<User> read_users_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "x_m,y_m,request_count")
        throw std::runtime_error("bad users csv header in " + path);
    std::vector<User> users;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        User u;
        if (!std::getline(row, field, ',')) throw std::runtime_error("bad users csv row");
        u.position.x = std::stod(field);
        if (!std::getline(row, field, ',')) throw std::runtime_error("bad users csv row");
        u.position.y = std::stod(field);
        if (!std::getline(row, field, ',')) throw std::runtime_error("bad users csv row");
        u.request_count = std::stoi(field);
        if (u.request_count < 0) throw std::runtime_error("bad users csv row");
        users.push_back(u);
    }
    return users;
}

}  // namespace skytier::demand
