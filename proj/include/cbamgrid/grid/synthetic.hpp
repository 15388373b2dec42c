#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cbamgrid/grid/classify.hpp"
#include "cbamgrid/grid/graph.hpp"
#include "cbamgrid/grid/panel.hpp"
#include "cbamgrid/kvconfig.hpp"

namespace cbamgrid::grid {

// Policy intensity applied while generating (and later, while training on)
// a synthetic panel, per hour and node. A per-node schedule models phased
// national implementation and gives each node's cost series idiosyncratic
// variation; a uniform schedule has identical columns. An empty matrix
// means no policy channel was active.
struct PolicySchedule {
    ad::Tensor intensity;     // hours x nodes, each entry in [0, 1]
    double threshold = 50.0;  // kg CO2/MWh
    double ets_price = 85.0;  // EUR/tCO2

    bool active() const { return intensity.size() > 0; }
};

// Structural specification of the synthetic panel generator. The generator
// is the ground-truth oracle for counterfactual recovery: every planted
// coefficient below is known, and the same seed replays identical noise, so
// the true effect of any policy setting is the difference of two runs.
//
// Per node i with carbon class c(i) derived from base_ci:
//   demand_it = base_demand_i * (1 + demand_amp * diurnal(h)) + demand_noise * x
//   ci_it     = max(0, base_ci_i * (1 + ci_amp * diurnal(h)) + ci_noise * x)
//               * (1 - ci_response[c(i)] * s_t)
//   cost_it   = max(0, ci_it - threshold) * s_t * ets / 1000
//   price_it  = base_price_i + demand_price_slope * demand_it
//               + ci_price_coupling * ci_it
//               + price_response[c(i)] * (own_cost_weight * cost_it
//                   + (1 - own_cost_weight) * mean cost over neighbors(i))
//               + demand_quad * ((demand_it - base_demand_i)/base_demand_i)^2
//               + spillover_weight * sum_{j in neighbors(i)} price_j,t-1
//               + price_noise * x
// Generation mix columns are derived from ci and demand so the carbon signal
// is visible in the features.
struct SyntheticNode {
    std::string code;
    double base_ci = 100.0;      // kg CO2/MWh
    double base_demand = 10000;  // MW
    double base_price = 70.0;    // EUR/MWh
};

struct SyntheticSpec {
    std::uint64_t seed = 1;
    std::vector<SyntheticNode> nodes;
    std::vector<std::pair<std::string, std::string>> edges;

    double demand_price_slope = 0.0004;  // EUR/MWh per MW
    double ci_price_coupling = 0.05;     // EUR/MWh per kg CO2/MWh
    double spillover_weight = 0.02;      // on neighbors' previous-hour prices
    double price_noise_std = 1.5;
    double demand_noise_std = 0.0;
    double ci_noise_std = 0.0;
    double demand_amp = 0.2;
    double ci_amp = 0.15;
    double ci_phase_jitter = 0.0;  // per-node shift of the CI diurnal peak, hours
    double demand_quad = 0.0;  // nonlinear demand term, 0 = linear panel

    // Planted policy responses indexed by carbon class (low, medium, high).
    double price_response[3] = {0.0, 0.0, 0.0};  // EUR/MWh per EUR/MWh of exposure
    double ci_response[3] = {0.0, 0.0, 0.0};     // fractional CI reduction at full intensity
    double own_cost_weight = 0.8;  // exposure mix between own cost and the neighbor mean

    // Policy channel. Empty schedule_intensities leaves the panel baseline.
    // With schedule_per_node set, every (hour, node) draws its own intensity
    // (phased implementation); otherwise one draw per hour applies to all.
    double threshold = 50.0;
    double ets_price = 85.0;
    std::vector<double> schedule_intensities;  // drawn per hour (and node), seeded
    bool schedule_per_node = true;

    std::int64_t start_epoch = 1704067200;  // 2024-01-01T00:00:00Z

    void validate() const;
    CarbonClass planted_class(int node_index) const;

    static SyntheticSpec default_eu8(std::uint64_t seed);
    // Wider interconnection graphs. Sparser per-node reach makes
    // node-permutation placebos genuinely destructive, and the larger node
    // count stabilizes sign statistics.
    static SyntheticSpec default_eu16(std::uint64_t seed);
    static SyntheticSpec default_eu24(std::uint64_t seed);
    static SyntheticSpec from_config(const KvConfig& cfg);
    std::string to_config_text() const;
};

struct SyntheticOutput {
    GridGraph graph;
    HourlyPanel panel;
    PolicySchedule schedule;  // inactive when the spec had no intensities
};

// Deterministic: (spec, hours) fully determines the output, and the noise
// stream does not depend on the schedule, so two specs differing only in
// policy settings replay identical disturbances.
SyntheticOutput generate_synthetic(const SyntheticSpec& spec, std::size_t hours);

// Same spec and noise, but with every hour forced to one fixed intensity.
// This is the planted-truth probe used by oracle tests.
SyntheticOutput generate_synthetic_at_intensity(const SyntheticSpec& spec, std::size_t hours,
                                                double intensity);

// Schedule sidecar: CSV `timestamp,intensity,threshold,ets_price`, one row
// per panel hour. Its presence marks a panel as policy-aware for training.
void save_schedule(const PolicySchedule& schedule, const HourlyPanel& panel, const std::string& path);
PolicySchedule load_schedule(const std::string& path, const HourlyPanel& panel);

}  // namespace cbamgrid::grid
