#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace cbamgrid::cli {

// Each command writes its artifacts plus a manifest.json into `out_dir` and
// returns the manifest path. All randomness flows from the effective seed
// (the --seed override when given, otherwise the config's seed).

// Emits graph.csv, panel.csv and, when the spec schedules policy
// intensities, schedule.csv.
std::string cmd_synth(const std::string& spec_file, const std::string& out_dir,
                      std::optional<std::uint64_t> seed_override, std::size_t hours);

// Trains on <data_dir>/{graph.csv,panel.csv[,schedule.csv]}; emits
// checkpoint.bin and train_report.json.
std::string cmd_train(const std::string& config_file, const std::string& data_dir,
                      const std::string& out_dir, std::optional<std::uint64_t> seed_override);

// Evaluates every scenario in the set file; emits impact_<label>.csv per
// scenario plus impact_summary.json.
std::string cmd_scenario(const std::string& checkpoint, const std::string& scenario_file,
                         const std::string& data_dir, const std::string& out_dir);

// Full robustness protocol; emits robustness_report.csv,
// robustness_detail.json and baseline_scatter.csv.
std::string cmd_robustness(const std::string& checkpoint, const std::string& data_dir,
                           const std::string& out_dir, std::uint64_t seed);

// Split fractions used by the CLI pipeline (train/validation/test).
inline constexpr double kTrainFraction = 0.7;
inline constexpr double kValFraction = 0.15;
inline constexpr double kTestFraction = 0.15;

}  // namespace cbamgrid::cli
