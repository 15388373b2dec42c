#include "cbamgrid/cli_commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/grid/load.hpp"
#include "cbamgrid/grid/synthetic.hpp"
#include "cbamgrid/manifest.hpp"
#include "cbamgrid/robustness/harness.hpp"
#include "cbamgrid/scenario/impact.hpp"
#include "cbamgrid/train/trainer.hpp"

namespace cbamgrid::cli {

namespace fs = std::filesystem;

namespace {

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::int64_t elapsed_ms() const {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    }
};

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir))
        raise(ErrorKind::Io, "cannot create output directory '" + out_dir + "'");
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write '" + path + "'");
    out << content;
    if (!out) raise(ErrorKind::Io, "write failed for '" + path + "'");
}

struct LoadedData {
    grid::GridGraph graph;
    grid::HourlyPanel panel;
    grid::PolicySchedule schedule;  // inactive when no schedule.csv exists
    std::string graph_path;
    std::string panel_path;
    std::string schedule_path;  // empty when absent
};

LoadedData load_data_dir(const std::string& data_dir) {
    const std::string graph_path = (fs::path(data_dir) / "graph.csv").string();
    const std::string panel_path = (fs::path(data_dir) / "panel.csv").string();
    auto [graph, panel] = grid::load_panel(graph_path, panel_path);
    LoadedData d{std::move(graph), std::move(panel), {}, graph_path, panel_path, ""};
    const std::string schedule_path = (fs::path(data_dir) / "schedule.csv").string();
    if (fs::exists(schedule_path)) {
        d.schedule = grid::load_schedule(schedule_path, d.panel);
        d.schedule_path = schedule_path;
    }
    return d;
}

std::string finish_manifest(RunManifest& manifest, const Timer& timer, const std::string& out_dir) {
    manifest.duration_ms = timer.elapsed_ms();
    const std::string path = (fs::path(out_dir) / "manifest.json").string();
    manifest.write(path);
    return path;
}

}  // namespace

std::string cmd_synth(const std::string& spec_file, const std::string& out_dir,
                      std::optional<std::uint64_t> seed_override, std::size_t hours) {
    Timer timer;
    ensure_out_dir(out_dir);
    KvConfig cfg = KvConfig::from_file(spec_file);
    grid::SyntheticSpec spec = grid::SyntheticSpec::from_config(cfg);
    if (seed_override) spec.seed = *seed_override;
    const std::size_t effective_hours =
        cfg.has("hours") ? static_cast<std::size_t>(cfg.get_int("hours")) : hours;
    require(effective_hours >= 1, ErrorKind::Config, "hours must be >= 1");

    grid::SyntheticOutput out = grid::generate_synthetic(spec, effective_hours);

    const std::string graph_path = (fs::path(out_dir) / "graph.csv").string();
    const std::string panel_path = (fs::path(out_dir) / "panel.csv").string();
    grid::save_graph(out.graph, graph_path);
    grid::save_panel(out.panel, panel_path);

    RunManifest manifest;
    manifest.command = "synth";
    manifest.seed = spec.seed;
    manifest.add_input(spec_file);
    manifest.add_artifact(graph_path);
    manifest.add_artifact(panel_path);
    if (out.schedule.active()) {
        const std::string schedule_path = (fs::path(out_dir) / "schedule.csv").string();
        grid::save_schedule(out.schedule, out.panel, schedule_path);
        manifest.add_artifact(schedule_path);
    }
    return finish_manifest(manifest, timer, out_dir);
}

std::string cmd_train(const std::string& config_file, const std::string& data_dir,
                      const std::string& out_dir, std::optional<std::uint64_t> seed_override) {
    Timer timer;
    ensure_out_dir(out_dir);
    model::ModelConfig config = model::ModelConfig::from_config(KvConfig::from_file(config_file));
    if (seed_override) config.seed = *seed_override;

    LoadedData data = load_data_dir(data_dir);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(kTrainFraction, kValFraction,
                                                            kTestFraction, data.panel.hours());
    train::TrainResult result =
        scenario::train_with_policy(config, data.graph, data.panel, split, data.schedule);

    const std::string checkpoint_path = (fs::path(out_dir) / "checkpoint.bin").string();
    const std::string report_path = (fs::path(out_dir) / "train_report.json").string();
    model::save_checkpoint(result.model, checkpoint_path);
    write_text(report_path, result.report.to_json() + "\n");

    RunManifest manifest;
    manifest.command = "train";
    manifest.seed = config.seed;
    manifest.add_input(config_file);
    manifest.add_input(data.graph_path);
    manifest.add_input(data.panel_path);
    if (!data.schedule_path.empty()) manifest.add_input(data.schedule_path);
    manifest.add_artifact(checkpoint_path);
    manifest.add_artifact(report_path);
    return finish_manifest(manifest, timer, out_dir);
}

std::string cmd_scenario(const std::string& checkpoint, const std::string& scenario_file,
                         const std::string& data_dir, const std::string& out_dir) {
    Timer timer;
    ensure_out_dir(out_dir);
    model::TrainedModel model = model::load_checkpoint(checkpoint);
    LoadedData data = load_data_dir(data_dir);
    require(model.nodes == data.panel.node_codes, ErrorKind::Schema,
            "checkpoint was trained on a different node set");
    std::vector<scenario::ScenarioConfig> scenarios =
        scenario::load_scenarios(scenario_file, data.graph);

    grid::SplitSpec split = grid::SplitSpec::from_fractions(kTrainFraction, kValFraction,
                                                            kTestFraction, data.panel.hours());
    grid::SplitViews views = grid::chronological_split(data.panel, split);

    RunManifest manifest;
    manifest.command = "scenario";
    manifest.seed = model.config.seed;
    manifest.add_input(checkpoint);
    manifest.add_input(scenario_file);
    manifest.add_input(data.graph_path);
    manifest.add_input(data.panel_path);

    std::string summary = "[\n";
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        scenario::ImpactReport report = scenario::counterfactual_impacts(
            model, data.graph, data.panel, scenarios[s], views.test);
        const std::string path =
            (fs::path(out_dir) / ("impact_" + scenarios[s].label + ".csv")).string();
        write_text(path, report.to_csv());
        manifest.add_artifact(path);
        summary += report.summary_json();
        summary += (s + 1 < scenarios.size()) ? ",\n" : "\n";
    }
    summary += "]\n";
    const std::string summary_path = (fs::path(out_dir) / "impact_summary.json").string();
    write_text(summary_path, summary);
    manifest.add_artifact(summary_path);
    return finish_manifest(manifest, timer, out_dir);
}

std::string cmd_robustness(const std::string& checkpoint, const std::string& data_dir,
                           const std::string& out_dir, std::uint64_t seed) {
    Timer timer;
    ensure_out_dir(out_dir);
    model::TrainedModel model = model::load_checkpoint(checkpoint);
    LoadedData data = load_data_dir(data_dir);
    require(model.nodes == data.panel.node_codes, ErrorKind::Schema,
            "checkpoint was trained on a different node set");

    grid::SplitSpec split = grid::SplitSpec::from_fractions(kTrainFraction, kValFraction,
                                                            kTestFraction, data.panel.hours());
    grid::SplitViews views = grid::chronological_split(data.panel, split);

    robustness::RobustnessContext ctx;
    ctx.reference = &model;
    ctx.graph = &data.graph;
    ctx.panel = &data.panel;
    ctx.split = split;
    ctx.schedule = data.schedule;
    ctx.reference_scenario.label = "reference";
    ctx.reference_scenario.intensity = 1.0;
    ctx.reference_scenario.threshold = model.norms.policy_threshold;
    ctx.reference_scenario.ets_price = model.norms.policy_ets;
    ctx.eval_segment = views.test;

    robustness::RobustnessReport report = robustness::run_robustness(ctx, seed);

    const std::string table_path = (fs::path(out_dir) / "robustness_report.csv").string();
    const std::string detail_path = (fs::path(out_dir) / "robustness_detail.json").string();
    const std::string scatter_path = (fs::path(out_dir) / "baseline_scatter.csv").string();
    write_text(table_path, report.table_csv());
    write_text(detail_path, report.detail_json() + "\n");
    write_text(scatter_path, report.baseline.scatter_csv());

    RunManifest manifest;
    manifest.command = "robustness";
    manifest.seed = seed;
    manifest.add_input(checkpoint);
    manifest.add_input(data.graph_path);
    manifest.add_input(data.panel_path);
    if (!data.schedule_path.empty()) manifest.add_input(data.schedule_path);
    manifest.add_artifact(table_path);
    manifest.add_artifact(detail_path);
    manifest.add_artifact(scatter_path);
    return finish_manifest(manifest, timer, out_dir);
}

}  // namespace cbamgrid::cli
