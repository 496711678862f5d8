#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skytier/demand.hpp"
#include "skytier/harness.hpp"
#include "skytier/svg.hpp"

namespace fs = std::filesystem;
using namespace skytier;

namespace {

std::vector<harness::Algorithm> parse_algorithms(const std::vector<std::string>& names) {
    std::vector<harness::Algorithm> algorithms;
    algorithms.reserve(names.size());
    for (const std::string& name : names)
        algorithms.push_back(harness::algorithm_from_string(name));
    return algorithms;
}

void write_run_outputs(const fs::path& out, const harness::RunArtifacts& art, bool plot) {
    fs::create_directories(out);
    const harness::MetricsSeries& series = art.series;
    harness::write_metrics_csv((out / "metrics.csv").string(), {&series, 1});
    harness::write_summary_json((out / "summary.json").string(), {&series, 1}, {});
    harness::write_survivability_csv((out / "survivability.csv").string(),
                                     art.survivability_rows);
    harness::write_mobility_csv((out / "mobility_trace.csv").string(), art.mobility_rows);
    harness::write_nbrl_trace_csv((out / "nbrl_trace.csv").string(), art.nbrl_trace);
    harness::write_score_history_csv((out / "score_history.csv").string(),
                                     art.score_history);
    harness::write_assignment_json((out / "assignment.json").string(),
                                   art.final_assignment, art.final_cells);
    demand::write_users_csv((out / "users.csv").string(), art.scenario.users);
    if (!plot) return;

    svg::Series accuracy{"accuracy", {}}, likelihood{"likelihood", {}},
        handled{"handled", {}}, survivability{"S_T", {}};
    for (const harness::MetricsRecord& r : series.records) {
        const double it = static_cast<double>(r.iteration);
        accuracy.points.emplace_back(it, r.accuracy);
        likelihood.points.emplace_back(it, r.likelihood);
        handled.points.emplace_back(it, r.users_handled);
        survivability.points.emplace_back(it, r.total_survivability);
    }
    svg::write_line_chart((out / "metrics.svg").string(),
                          std::string("run metrics (") + series.algorithm + ")",
                          "iteration", "value",
                          {accuracy, likelihood, handled, survivability});
    svg::Series best{"best_score", {}}, mean{"mean_score", {}};
    for (const harness::ScoreRow& r : art.score_history) {
        best.points.emplace_back(r.iteration, r.best_score);
        mean.points.emplace_back(r.iteration, r.mean_score);
    }
    svg::write_line_chart((out / "score_history.svg").string(), "optimization score",
                          "iteration", "score", {best, mean});
}

void write_group_outputs(const fs::path& out, const harness::SweepResult& result,
                         const std::string& table_name) {
    harness::write_metrics_csv((out / "metrics.csv").string(), result.runs);
    harness::write_sweep_csv((out / table_name).string(), result.rows);
    harness::write_summary_json((out / "summary.json").string(), result.runs, result.rows);
}

void plot_sweep(const fs::path& out, const harness::SweepResult& result) {
    struct Panel {
        const char* file;
        const char* label;
        double harness::SweepRow::* field;
    };
    const Panel panels[] = {
        {"sweep_accuracy.svg", "mean final accuracy", &harness::SweepRow::accuracy_mean},
        {"sweep_likelihood.svg", "mean final likelihood",
         &harness::SweepRow::likelihood_mean},
        {"sweep_handled.svg", "mean final handled fraction",
         &harness::SweepRow::handled_mean},
        {"sweep_survivability.svg", "mean final S_T",
         &harness::SweepRow::survivability_mean},
    };
    if (result.rows.empty()) return;
    const std::string axis = result.rows.front().axis;
    for (const Panel& panel : panels) {
        std::vector<svg::Series> series;
        for (const harness::SweepRow& row : result.rows) {
            svg::Series* s = nullptr;
            for (svg::Series& existing : series)
                if (existing.name == row.algorithm) s = &existing;
            if (s == nullptr) {
                series.push_back(svg::Series{row.algorithm, {}});
                s = &series.back();
            }
            s->points.emplace_back(row.value, row.*(panel.field));
        }
        svg::write_line_chart((out / panel.file).string(), panel.label, axis,
                              panel.label, series);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical aerial base station placement simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string algo_name = "nbrl";
    std::uint64_t seed = 1;
    std::string axis = "lambda";
    std::vector<double> values;
    std::vector<std::string> algo_names = {"nbrl", "pso", "vpso"};
    int seeds = 3;
    int threads = 1;
    bool plot = false;

    CLI::App* run = app.add_subcommand("run", "single scenario run");
    run->add_option("--config", config_path, "scenario config JSON")->required();
    run->add_option("--algo", algo_name, "algorithm")
        ->check(CLI::IsMember({"nbrl", "pso", "vpso"}));
    run->add_option("--seed", seed, "run seed");
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_flag("--plot", plot, "write SVG charts");

    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep");
    sweep->add_option("--config", config_path, "scenario config JSON")->required();
    sweep->add_option("--axis", axis, "sweep axis")
        ->check(CLI::IsMember({"lambda", "tier1", "seed"}));
    sweep->add_option("--values", values, "axis values")->required()->delimiter(',');
    sweep->add_option("--algos", algo_names, "algorithms")->delimiter(',');
    sweep->add_option("--seeds", seeds, "seeds per combination");
    sweep->add_option("--threads", threads, "worker threads");
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_flag("--plot", plot, "write SVG charts");

    CLI::App* compare = app.add_subcommand("compare", "algorithm comparison");
    compare->add_option("--config", config_path, "scenario config JSON")->required();
    compare->add_option("--seeds", seeds, "seeds per algorithm");
    compare->add_option("--threads", threads, "worker threads");
    compare->add_option("--out", out_dir, "output directory")->required();
    compare->add_flag("--plot", plot, "write SVG charts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const harness::ScenarioConfig cfg = harness::load_config(config_path);
        const fs::path out(out_dir);

        if (run->parsed()) {
            const harness::RunArtifacts art =
                harness::run_scenario(cfg, harness::algorithm_from_string(algo_name), seed);
            write_run_outputs(out, art, plot);
        } else {
            fs::create_directories(out);
            std::vector<harness::MetricsSeries> flushed;
            const auto on_run = [&](const harness::MetricsSeries& s) {
                flushed.push_back(s);
            };
            harness::SweepResult result;
            try {
                if (sweep->parsed()) {
                    result = harness::sweep(cfg, axis, values,
                                            parse_algorithms(algo_names), seeds, threads,
                                            on_run);
                } else {
                    result = harness::compare_runs(cfg, seeds, threads, on_run);
                }
            } catch (...) {
                // Keep whatever completed in dispatch order before the failure.
                harness::write_metrics_csv((out / "metrics.csv").string(), flushed);
                throw;
            }
            write_group_outputs(out, result, sweep->parsed() ? "sweep.csv" : "compare.csv");
            if (plot) plot_sweep(out, result);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
