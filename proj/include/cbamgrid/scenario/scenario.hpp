#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbamgrid/ad/tensor.hpp"
#include "cbamgrid/grid/graph.hpp"
#include "cbamgrid/grid/panel.hpp"
#include "cbamgrid/grid/synthetic.hpp"

namespace cbamgrid::scenario {

// One CBAM policy setting. `nodes` optionally restricts the cost to a subset
// of exporters; empty means every node is covered.
struct ScenarioConfig {
    std::string label;
    double intensity = 0.0;  // implementation phase in [0, 1]
    double threshold = 50.0; // kg CO2/MWh below which no cost applies
    double ets_price = 85.0; // EUR/tCO2
    std::vector<std::string> nodes;

    void validate() const;
};

// Hourly border cost per MWh for an exporter with carbon intensity `ci`:
// max(0, ci - threshold) * intensity * ets / 1000.
double cbam_cost(double ci, const ScenarioConfig& scenario);

// Percent labels {0, 25, 50, 75, 100} map to intensities exactly.
double intensity_from_percent(int percent);

// Raw policy-cost matrix (hours x nodes) for a fixed scenario, from each
// node's own hourly CI. Nodes outside the scenario's subset get 0.
ad::Tensor scenario_costs(const grid::HourlyPanel& panel, const grid::GridGraph& graph,
                          const ScenarioConfig& scenario);

// Costs for a per-hour intensity schedule (synthetic training mode).
ad::Tensor schedule_costs(const grid::HourlyPanel& panel, const grid::PolicySchedule& schedule);

// Scenario set file: CSV with header `label,intensity,threshold,ets_price`
// and an optional `nodes` column (semicolon-separated codes). Unknown codes
// raise Schema errors against the given graph.
std::vector<ScenarioConfig> load_scenarios(const std::string& path, const grid::GridGraph& graph);
void save_scenarios(const std::vector<ScenarioConfig>& scenarios, const std::string& path);

}  // namespace cbamgrid::scenario
