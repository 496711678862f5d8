#include "skytier/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "skytier/rng.hpp"

namespace skytier::coverage {

namespace {

constexpr double kTieTolerance = 1e-9;

// Hungarian (Jonker-Volgenant style) minimum-cost perfect matching on a
// square cost matrix. Returns the matched column per row.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j) {
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    }
    return row_to_col;
}

struct MatchResult {
    // col matched to each row over the restricted index sets; -1 if unmatched.
    std::vector<std::pair<int, int>> pairs;  // (row, col) in original indices
    double value = 0.0;
};

// Maximum-weight matching over the unmasked rows/columns of `weight`.
// The value is re-summed from the weight entries in ascending column order
// so tie comparisons work on exact sums.
MatchResult best_matching(const std::vector<std::vector<double>>& weight,
                          const std::vector<char>& row_used, const std::vector<char>& col_used) {
    std::vector<int> rows, cols;
    for (std::size_t r = 0; r < weight.size(); ++r)
        if (!row_used[r]) rows.push_back(static_cast<int>(r));
    for (std::size_t c = 0; weight.size() > 0 && c < weight[0].size(); ++c)
        if (!col_used[c]) cols.push_back(static_cast<int>(c));
    MatchResult result;
    if (rows.empty() || cols.empty()) return result;

    const int s = static_cast<int>(std::max(rows.size(), cols.size()));
    double max_w = 0.0;
    for (int r : rows)
        for (int c : cols) max_w = std::max(max_w, weight[r][c]);
    std::vector<std::vector<double>> cost(s, std::vector<double>(s, max_w));
    for (std::size_t ri = 0; ri < rows.size(); ++ri)
        for (std::size_t ci = 0; ci < cols.size(); ++ci)
            cost[ri][ci] = max_w - weight[rows[ri]][cols[ci]];

    const std::vector<int> row_to_col = hungarian_min(cost);
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        const int ci = row_to_col[ri];
        if (ci >= 0 && ci < static_cast<int>(cols.size()))
            result.pairs.emplace_back(rows[ri], cols[ci]);
    }
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const auto& a, const auto& b) { return a.second < b.second; });
    for (const auto& [r, c] : result.pairs) result.value += weight[r][c];
    return result;
}

}  // namespace

double default_tan_half_aperture() { return (std::sqrt(1000.0) / 2.0) / 60.96; }

double footprint_side(double altitude_m, double tan_half_aperture) {
    if (!(altitude_m > 0.0)) throw std::invalid_argument("footprint: altitude must be positive");
    if (!(tan_half_aperture > 0.0))
        throw std::invalid_argument("footprint: aperture must be positive");
    return 2.0 * altitude_m * tan_half_aperture;
}

Footprint footprint_of(const Drone& drone, double tan_half_aperture) {
    return Footprint{drone.position, footprint_side(drone.altitude_m, tan_half_aperture),
                     drone.altitude_m};
}

geometry::Aabb footprint_box(const Footprint& fp) {
    const double h = fp.side_m / 2.0;
    return geometry::Aabb{fp.center.x - h, fp.center.x + h, fp.center.y - h, fp.center.y + h};
}

int demand_weight(demand::DemandClass c) {
    switch (c) {
        case demand::DemandClass::High: return 3;
        case demand::DemandClass::Medium: return 2;
        case demand::DemandClass::Low: return 1;
        case demand::DemandClass::None: return 0;
    }
    return 0;
}

double pair_gain(const Footprint& fp, const demand::DemandCell& cell, geometry::Point2 at) {
    const int weight = demand_weight(cell.demand_class);
    if (weight == 0) return 0.0;
    Footprint moved = fp;
    moved.center = at;
    const geometry::Aabb placed = footprint_box(moved);
    const double covered = geometry::clip_area(cell.region, placed);
    if (covered <= 0.0) return 0.0;
    // Displacement discount: the placement only counts to the extent the
    // footprint still overlaps the one it would cast from the cell target.
    Footprint ideal = fp;
    ideal.center = cell.target;
    const geometry::OverlapResult o = geometry::aabb_overlap(placed, footprint_box(ideal));
    if (!o.overlapped) return 0.0;
    const double displacement = (o.x_overlap * o.y_overlap) / (fp.side_m * fp.side_m);
    return weight * displacement * covered / geometry::polygon_area(cell.region);
}

double assignment_score(const LocationAssignment& assignment,
                        std::span<const demand::DemandCell> cells,
                        std::span<const Drone> drones, double tan_half_aperture) {
    double score = 0.0;  // pairs are kept sorted by cell index: canonical order
    for (const AssignedPair& pair : assignment.pairs) {
        const Drone* drone = nullptr;
        for (const Drone& d : drones)
            if (d.id == pair.drone_id) drone = &d;
        if (drone == nullptr) throw std::invalid_argument("assignment_score: unknown drone id");
        if (pair.cell_index >= cells.size())
            throw std::invalid_argument("assignment_score: cell index out of range");
        score += pair_gain(footprint_of(*drone, tan_half_aperture), cells[pair.cell_index],
                           pair.target);
    }
    return score;
}

LocationAssignment assign_drones(std::span<const Drone> drones,
                                 std::span<const demand::DemandCell> cells,
                                 double tan_half_aperture) {
    if (drones.empty()) throw std::invalid_argument("assign_drones: no drones");
    if (cells.empty()) throw std::invalid_argument("assign_drones: no cells");

    // Drones sorted by id so tie-breaks mean "lower drone id".
    std::vector<std::size_t> order(drones.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return drones[a].id < drones[b].id; });

    std::vector<std::vector<double>> weight(drones.size(),
                                            std::vector<double>(cells.size(), 0.0));
    for (std::size_t r = 0; r < order.size(); ++r) {
        const Drone& d = drones[order[r]];
        const Footprint fp = footprint_of(d, tan_half_aperture);
        for (std::size_t c = 0; c < cells.size(); ++c)
            weight[r][c] = pair_gain(fp, cells[c], cells[c].target);
    }

    std::vector<char> row_used(drones.size(), 0), col_used(cells.size(), 0);
    const double optimum = best_matching(weight, row_used, col_used).value;

    // Deterministic tie-break: walk cells in index order and give each one
    // the lowest-id drone that still allows completing an optimal matching.
    LocationAssignment assignment;
    double fixed_sum = 0.0;
    const double tol = kTieTolerance * (1.0 + std::abs(optimum));
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t r = 0; r < order.size(); ++r) {
            if (row_used[r] || weight[r][c] <= 0.0) continue;
            row_used[r] = 1;
            col_used[c] = 1;
            const double completion = best_matching(weight, row_used, col_used).value;
            if (fixed_sum + weight[r][c] + completion >= optimum - tol) {
                fixed_sum += weight[r][c];
                assignment.pairs.push_back(AssignedPair{drones[order[r]].id, c,
                                                        cells[c].target});
                break;
            }
            row_used[r] = 0;
            col_used[c] = 0;
        }
    }
    return assignment;
}

namespace {

double matching_value_at(std::span<const Drone> drones,
                         std::span<const demand::DemandCell> cells, double tan_half_aperture,
                         bool at_targets) {
    if (drones.empty() || cells.empty())
        throw std::invalid_argument("assignment value: empty inputs");
    std::vector<std::vector<double>> weight(drones.size(),
                                            std::vector<double>(cells.size(), 0.0));
    for (std::size_t r = 0; r < drones.size(); ++r) {
        const Footprint fp = footprint_of(drones[r], tan_half_aperture);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const geometry::Point2 at = at_targets ? cells[c].target : drones[r].position;
            weight[r][c] = pair_gain(fp, cells[c], at);
        }
    }
    const std::vector<char> row_used(drones.size(), 0), col_used(cells.size(), 0);
    return best_matching(weight, row_used, col_used).value;
}

}  // namespace

double optimal_assignment_value(std::span<const Drone> drones,
                                std::span<const demand::DemandCell> cells,
                                double tan_half_aperture) {
    return matching_value_at(drones, cells, tan_half_aperture, true);
}

double achieved_assignment_value(std::span<const Drone> drones,
                                 std::span<const demand::DemandCell> cells,
                                 double tan_half_aperture) {
    return matching_value_at(drones, cells, tan_half_aperture, false);
}

double mapping_likelihood(const LocationAssignment& assignment,
                          std::span<const demand::DemandCell> cells,
                          std::span<const Drone> drones, double tan_half_aperture) {
    const LocationAssignment oracle = assign_drones(drones, cells, tan_half_aperture);
    const double optimal = assignment_score(oracle, cells, drones, tan_half_aperture);
    if (optimal <= 0.0) return 1.0;
    const double achieved = assignment_score(assignment, cells, drones, tan_half_aperture);
    return std::clamp(achieved / optimal, 0.0, 1.0);
}

geometry::Point2 apply_placement_error(geometry::Point2 target, double epsilon_max,
                                       std::uint64_t seed) {
    if (epsilon_max < 0.0)
        throw std::invalid_argument("apply_placement_error: negative epsilon");
    if (epsilon_max == 0.0) return target;
    rng::Stream stream(seed);
    const double r = epsilon_max * std::sqrt(stream.uniform());
    const double theta = 2.0 * 3.14159265358979323846 * stream.uniform();
    return target + geometry::Point2{r * std::cos(theta), r * std::sin(theta)};
}

LocationAssignment centroidal_step(LocationAssignment assignment,
                                   std::span<const demand::DemandCell> cells) {
    for (AssignedPair& pair : assignment.pairs) {
        if (pair.cell_index >= cells.size())
            throw std::invalid_argument("centroidal_step: cell index out of range");
        pair.target = cells[pair.cell_index].target;
    }
    return assignment;
}

double coverage_fraction(std::span<const Drone> drones, std::span<const demand::User> users,
                         double tan_half_aperture, const LinkPredicate& link_ok) {
    if (users.empty()) return 0.0;
    int covered = 0;
    for (const demand::User& u : users) {
        for (const Drone& d : drones) {
            const double h = footprint_side(d.altitude_m, tan_half_aperture) / 2.0;
            const bool inside = std::abs(u.position.x - d.position.x) <= h &&
                                std::abs(u.position.y - d.position.y) <= h;
            if (inside && (!link_ok || link_ok(d, u.position))) {
                ++covered;
                break;
            }
        }
    }
    return static_cast<double>(covered) / static_cast<double>(users.size());
}

}  // namespace skytier::coverage
