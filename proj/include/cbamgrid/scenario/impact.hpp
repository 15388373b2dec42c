#pragma once

#include <string>
#include <vector>

#include "cbamgrid/grid/classify.hpp"
#include "cbamgrid/model/params.hpp"
#include "cbamgrid/scenario/scenario.hpp"
#include "cbamgrid/train/trainer.hpp"

namespace cbamgrid::scenario {

// Per-country counterfactual deltas for one scenario against the
// intensity-0 baseline, averaged over an evaluation segment.
struct ImpactReport {
    ScenarioConfig scenario;
    std::vector<std::string> nodes;
    std::vector<grid::CarbonClass> classes;
    std::vector<double> delta_price;  // EUR/MWh
    std::vector<double> delta_ci;     // kg CO2/MWh

    std::string to_csv() const;      // node,class,delta_price,delta_ci
    std::string summary_json() const;
};

// Feature tensors for the segment with the policy slot filled from the
// scenario (z-scored during assembly). Returned as the raw cost matrix the
// feature builder consumes.
ad::Tensor inject_policy(const grid::HourlyPanel& panel, const grid::GridGraph& graph,
                         const ScenarioConfig& scenario);

// Runs the model under `scenario` and under the same setting at intensity 0,
// de-normalizes both, and reports per-node mean deltas for both targets.
// The intensity-0 run against itself is identically zero by construction.
ImpactReport counterfactual_impacts(const model::TrainedModel& model, const grid::GridGraph& graph,
                                    const grid::HourlyPanel& panel, const ScenarioConfig& scenario,
                                    const grid::PanelView& segment);

// Trains with the policy channel active. With an (synthetic) hourly
// schedule the policy slot varies over training and the cost->price channel
// is identified; without one the slot stays at its intensity-0 value and
// the channel is only learned through CI covariation.
train::TrainResult train_with_policy(const model::ModelConfig& config, const grid::GridGraph& graph,
                                     const grid::HourlyPanel& panel, const grid::SplitSpec& split,
                                     const grid::PolicySchedule& schedule);

}  // namespace cbamgrid::scenario
