#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skytier/baselines.hpp"
#include "skytier/geometry.hpp"
#include "skytier/harness.hpp"
#include "skytier/survivability.hpp"

namespace py = pybind11;
using namespace skytier;

namespace {

using PointList = std::vector<std::pair<double, double>>;

geometry::ConvexPolygon to_polygon(const PointList& pts) {
    std::vector<geometry::Point2> vertices;
    vertices.reserve(pts.size());
    for (const auto& [x, y] : pts) vertices.push_back({x, y});
    return geometry::make_polygon(vertices);
}

PointList from_polygon(const geometry::ConvexPolygon& poly) {
    PointList pts;
    pts.reserve(poly.vertices.size());
    for (const geometry::Point2& v : poly.vertices) pts.emplace_back(v.x, v.y);
    return pts;
}

py::dict series_dict(const harness::MetricsSeries& s) {
    py::dict d;
    d["algo"] = s.algorithm;
    d["seed"] = s.seed;
    d["lambda"] = s.lambda;
    d["tier1"] = s.tier1_count;
    d["converged"] = s.converged;
    d["iterations_to_converge"] = s.iterations_to_converge;
    py::list records;
    for (const harness::MetricsRecord& r : s.records) {
        py::dict row;
        row["iter"] = r.iteration;
        row["accuracy"] = r.accuracy;
        row["likelihood"] = r.likelihood;
        row["handled"] = r.users_handled;
        row["S_T"] = r.total_survivability;
        records.append(std::move(row));
    }
    d["records"] = std::move(records);
    return d;
}

py::dict pso_dict(const baselines::PsoResult& r) {
    py::dict d;
    d["best_position"] = r.best_position;
    d["best_value"] = r.best_value;
    d["best_history"] = r.best_history;
    d["mean_history"] = r.mean_history;
    d["iterations_to_converge"] = r.iterations_to_converge;
    d["converged"] = r.converged;
    return d;
}

baselines::PsoParams make_params(int swarm_size, int iterations, double target_value) {
    baselines::PsoParams params;
    params.swarm_size = swarm_size;
    params.iterations = iterations;
    params.target_value = target_value;
    return params;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "hierarchical aerial base station placement core";

    m.def(
        "polygon_area",
        [](const PointList& pts) { return geometry::polygon_area(to_polygon(pts)); },
        py::arg("vertices"));
    m.def(
        "polygon_centroid",
        [](const PointList& pts) {
            const geometry::Point2 c = geometry::polygon_centroid(to_polygon(pts));
            return std::make_pair(c.x, c.y);
        },
        py::arg("vertices"));
    m.def(
        "polygon_polar_moment",
        [](const PointList& pts) {
            return geometry::polygon_polar_moment(to_polygon(pts));
        },
        py::arg("vertices"));
    m.def(
        "voronoi",
        [](const PointList& generators, const PointList& bounds) {
            std::vector<geometry::Point2> gens;
            gens.reserve(generators.size());
            for (const auto& [x, y] : generators) gens.push_back({x, y});
            const std::vector<geometry::ConvexPolygon> cells =
                geometry::voronoi_partition(gens, to_polygon(bounds));
            std::vector<PointList> out;
            out.reserve(cells.size());
            for (const geometry::ConvexPolygon& cell : cells)
                out.push_back(from_polygon(cell));
            return out;
        },
        py::arg("generators"), py::arg("bounds"));
    m.def(
        "aabb_overlap",
        [](double ax_min, double ay_min, double ax_max, double ay_max, double bx_min,
           double by_min, double bx_max, double by_max) {
            const geometry::OverlapResult o = geometry::aabb_overlap(
                geometry::make_aabb(ax_min, ax_max, ay_min, ay_max),
                geometry::make_aabb(bx_min, bx_max, by_min, by_max));
            return py::make_tuple(o.x_overlap, o.y_overlap, o.overlapped);
        },
        py::arg("ax_min"), py::arg("ay_min"), py::arg("ax_max"), py::arg("ay_max"),
        py::arg("bx_min"), py::arg("by_min"), py::arg("bx_max"), py::arg("by_max"));

    m.def("drone_survivability", &surv::drone_survivability, py::arg("f_t"),
          py::arg("f_0"), py::arg("t"));
    m.def(
        "resource_index",
        [](double memory, double energy, double radio_range, double timing,
           double memory0, double energy0, double range0, double timing0, double lam,
           double lam0) {
            const DroneResources r{memory, energy, radio_range, timing};
            const DroneResources r0{memory0, energy0, range0, timing0};
            return surv::resource_index(r, r0, lam, lam0);
        },
        py::arg("memory"), py::arg("energy"), py::arg("radio_range"), py::arg("timing"),
        py::arg("memory0") = 1.0, py::arg("energy0") = 1.0, py::arg("range0") = 1.0,
        py::arg("timing0") = 1.0, py::arg("lam") = 5.0, py::arg("lam0") = 5.0);
    m.def("fspl_db", &harness::fspl_db, py::arg("distance_m"), py::arg("frequency_hz"));

    m.def(
        "pso",
        [](const std::function<double(std::vector<double>)>& f, std::vector<double> lo,
           std::vector<double> hi, std::uint64_t seed, int swarm_size, int iterations,
           double target_value) {
            baselines::Objective objective = [&f](std::span<const double> x) {
                return f(std::vector<double>(x.begin(), x.end()));
            };
            return pso_dict(baselines::pso_optimize(
                objective, lo, hi, make_params(swarm_size, iterations, target_value),
                seed));
        },
        py::arg("objective"), py::arg("lo"), py::arg("hi"), py::arg("seed") = 1,
        py::arg("swarm_size") = 30, py::arg("iterations") = 200,
        py::arg("target_value") = -1e300);
    m.def(
        "vpso",
        [](const std::function<double(std::vector<double>)>& f, std::vector<double> lo,
           std::vector<double> hi, std::uint64_t seed, int swarm_size, int iterations,
           double target_value) {
            baselines::Objective objective = [&f](std::span<const double> x) {
                return f(std::vector<double>(x.begin(), x.end()));
            };
            return pso_dict(baselines::vpso_optimize(
                objective, lo, hi, make_params(swarm_size, iterations, target_value),
                seed));
        },
        py::arg("objective"), py::arg("lo"), py::arg("hi"), py::arg("seed") = 1,
        py::arg("swarm_size") = 30, py::arg("iterations") = 200,
        py::arg("target_value") = -1e300);

    m.def(
        "run",
        [](const std::string& config_path, const std::string& algo, std::uint64_t seed) {
            const harness::ScenarioConfig cfg = harness::load_config(config_path);
            const harness::RunArtifacts art = harness::run_scenario(
                cfg, harness::algorithm_from_string(algo), seed);
            return series_dict(art.series);
        },
        py::arg("config_path"), py::arg("algo") = "nbrl", py::arg("seed") = 1);
    m.def(
        "run_default",
        [](const std::string& algo, std::uint64_t seed) {
            const harness::RunArtifacts art = harness::run_scenario(
                harness::ScenarioConfig{}, harness::algorithm_from_string(algo), seed);
            return series_dict(art.series);
        },
        py::arg("algo") = "nbrl", py::arg("seed") = 1);
}
