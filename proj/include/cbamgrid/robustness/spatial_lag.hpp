#pragma once

#include <string>
#include <vector>

#include "cbamgrid/ad/tensor.hpp"
#include "cbamgrid/grid/classify.hpp"
#include "cbamgrid/grid/graph.hpp"
#include "cbamgrid/grid/panel.hpp"

namespace cbamgrid::robustness {

// Spatial-lag panel regression
//   price_it = rho * (W price_t)_i + beta' x_it + eps
// with W the row-normalized adjacency (no self-loops) and x the regressor
// set below. Estimated by concentrated least squares: rho is swept over a
// grid and beta solved by OLS on the transformed target at each point.
struct SpatialLagModel {
    double rho = 0.0;
    std::vector<double> beta;
    std::vector<std::string> regressor_names;
    double residual_variance = 0.0;
    ad::Tensor weights;  // row-normalized W actually used

    // Active-column bookkeeping: structurally zero regressors on the fit
    // segment are dropped and recorded here.
    std::vector<std::string> dropped_columns;
};

inline constexpr double kRhoGridLimit = 0.95;
inline constexpr double kRhoGridStep = 0.01;

// Regressors per (node, hour): node fixed effects, demand, previous-hour own
// price, own policy cost interacted with carbon class, and spatially lagged
// (W cost) interacted with carbon class. Columns that are identically zero
// on the segment are dropped; remaining collinearity raises Estimation
// naming the offending columns.
SpatialLagModel fit_spatial_lag(const grid::HourlyPanel& panel, const grid::GridGraph& graph,
                                const ad::Tensor& policy_costs, const grid::PanelView& segment,
                                const std::vector<grid::CarbonClass>& classes);

// Mean per-node price impact of moving the cost matrix from `baseline` to
// `scenario` under the fitted model's reduced form
//   dprice_t = (I - rho W)^{-1} (beta_cost' dx_t).
std::vector<double> spatial_lag_impacts(const SpatialLagModel& model, const grid::GridGraph& graph,
                                        const ad::Tensor& scenario_costs,
                                        const ad::Tensor& baseline_costs,
                                        const grid::PanelView& segment,
                                        const std::vector<grid::CarbonClass>& classes);

// Reduced-form one-step-ahead price predictions over a segment (for RMSE
// comparison against the GNN), natural units, hour-major layout.
std::vector<double> spatial_lag_predict(const SpatialLagModel& model, const grid::HourlyPanel& panel,
                                        const grid::GridGraph& graph, const ad::Tensor& policy_costs,
                                        const grid::PanelView& segment,
                                        const std::vector<grid::CarbonClass>& classes);

}  // namespace cbamgrid::robustness
