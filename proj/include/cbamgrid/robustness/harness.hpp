#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbamgrid/grid/synthetic.hpp"
#include "cbamgrid/robustness/metrics.hpp"
#include "cbamgrid/robustness/spatial_lag.hpp"
#include "cbamgrid/scenario/impact.hpp"

namespace cbamgrid::robustness {

// Everything the robustness protocol needs to re-run the analysis: the
// reference model (whose config drives placebo re-estimation), the data it
// was trained on, the training policy schedule, and the scenario whose
// impacts are under scrutiny.
struct RobustnessContext {
    const model::TrainedModel* reference = nullptr;
    const grid::GridGraph* graph = nullptr;
    const grid::HourlyPanel* panel = nullptr;
    grid::SplitSpec split;
    grid::PolicySchedule schedule;                 // training-time policy channel
    scenario::ScenarioConfig reference_scenario;   // typically intensity 1, T 50, ETS 85
    grid::PanelView eval_segment;                  // deltas are averaged here
};

// Per-node reference price deltas of the context's scenario vs intensity 0.
std::vector<double> reference_price_deltas(const RobustnessContext& ctx);

struct SweepSetting {
    double value = 0.0;
    bool is_reference = false;
    RobustnessMetrics metrics;
};

struct SweepResult {
    std::string axis;  // "threshold" or "ets"
    std::vector<SweepSetting> settings;
    RobustnessMetrics aggregate;  // mean over non-reference settings
};

enum class SweepAxis { Threshold, Ets };

inline constexpr double kThresholdSweep[3] = {25.0, 50.0, 75.0};
inline constexpr double kEtsSweep[3] = {70.0, 85.0, 100.0};

// Re-evaluates the trained model's impacts under each setting of one policy
// parameter and compares sign pattern and node ranking against the
// reference setting's delta vector.
SweepResult sensitivity_sweep(const RobustnessContext& ctx, SweepAxis axis);

// Seeded placebo transforms of an hours x nodes cost matrix. The time
// shuffle permutes each node's series independently (per-node value
// multisets are preserved exactly); the node placebo reassigns whole series
// across nodes.
ad::Tensor shuffle_costs_over_time(const ad::Tensor& costs, std::uint64_t seed);
ad::Tensor permute_cost_nodes(const ad::Tensor& costs, const std::vector<std::size_t>& permutation);
std::vector<std::size_t> node_permutation(int nodes, std::uint64_t seed);

struct PlaceboResult {
    RobustnessMetrics metrics;
    std::vector<double> placebo_deltas;
    std::vector<double> reference_deltas;
};

// Placebo protocol: scramble the policy-cost series seen in training,
// re-estimate the model with the reference configuration, and recompute the
// scenario deltas. A real effect collapses because the scrambled channel
// carries no signal; metrics compare the re-estimated deltas against the
// reference deltas.
PlaceboResult placebo_time(const RobustnessContext& ctx, std::uint64_t seed);
PlaceboResult placebo_node(const RobustnessContext& ctx, std::uint64_t seed);

// The training-time cost matrix implied by the context's schedule.
ad::Tensor training_policy_costs(const RobustnessContext& ctx);

// Re-estimation step shared by both placebos, runnable with any cost
// matrix. Passing the unmodified training costs reproduces the reference
// model bit for bit.
PlaceboResult placebo_with_costs(const RobustnessContext& ctx, const ad::Tensor& placebo_costs);

struct BaselineComparison {
    SpatialLagModel baseline;
    RobustnessMetrics metrics;              // GNN vs baseline impact vectors
    std::vector<double> gnn_deltas;         // per node
    std::vector<double> baseline_deltas;    // per node
    std::vector<std::string> nodes;
    std::string scatter_csv() const;        // node,gnn_delta,baseline_delta
};

// Fits the spatial-lag baseline on the training segment and compares its
// scenario impacts with the GNN's.
BaselineComparison compare_models(const RobustnessContext& ctx);

// The full five-row protocol: two sensitivity sweeps, two placebos, one
// baseline row.
struct RobustnessReport {
    SweepResult threshold_sweep;
    SweepResult ets_sweep;
    PlaceboResult time_placebo;
    PlaceboResult node_placebo;
    BaselineComparison baseline;

    std::string table_csv() const;   // check,design,sign_agree,rank_corr,attenuation
    std::string detail_json() const;
};

RobustnessReport run_robustness(const RobustnessContext& ctx, std::uint64_t seed);

}  // namespace cbamgrid::robustness
