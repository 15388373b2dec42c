#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbamgrid/grid/graph.hpp"
#include "cbamgrid/grid/panel.hpp"
#include "cbamgrid/model/forward.hpp"
#include "cbamgrid/model/params.hpp"
#include "cbamgrid/train/loss.hpp"

namespace cbamgrid::train {

struct LossParts {
    double mse_ci = 0.0;
    double mse_price = 0.0;
    double corr_term = 0.0;
    double total = 0.0;
};

struct EpochRow {
    int epoch = 0;  // 1-based
    LossParts train;
    LossParts val;
};

// Natural-unit evaluation metrics (EUR/MWh, kg CO2/MWh).
struct EvalMetrics {
    double rmse_ci = 0.0;
    double rmse_price = 0.0;
    double mae_ci = 0.0;
    double mae_price = 0.0;
    double pred_corr = 0.0;  // realized rho(pred_ci, pred_price)
};

struct TrainReport {
    std::vector<EpochRow> epochs;
    int best_epoch = 0;  // 1-based, minimal validation total
    EvalMetrics test;

    std::string to_json() const;
};

struct TrainOptions {
    // Raw policy-cost matrix (hours x nodes, EUR/MWh) filling the policy
    // feature slot during training; nullptr trains the baseline channel
    // (slot at its intensity-0 value).
    const ad::Tensor* policy_costs = nullptr;
    // Reference scenario parameters for the policy slot's normalization.
    double policy_threshold = 50.0;
    double policy_ets = 85.0;
    // Test hook: zero the price-branch gradients before each update. With
    // lambda_price = lambda_corr = 0 those gradients are analytically zero
    // already; this makes the equivalence checkable bit-for-bit.
    bool force_zero_price_grads = false;
};

struct TrainResult {
    model::TrainedModel model;
    TrainReport report;
};

// Mini-batch training with an adaptive per-parameter first-order update
// (moving averages of gradient and squared gradient, decay 0.9/0.999,
// epsilon 1e-8), early stopping on validation total, best-epoch restore.
// Deterministic for a fixed (config, panel, options) triple.
TrainResult train(const model::ModelConfig& config, const grid::GridGraph& graph,
                  const grid::HourlyPanel& panel, const grid::SplitSpec& split,
                  const TrainOptions& options = {});

// Hour indices of `view` usable as feature rows (hour >= window).
std::vector<std::size_t> usable_hours(const grid::PanelView& view, int window);

// Chunked forward over arbitrary hours; predictions in normalized space,
// row (b * N + i) = node i at hours[b].
model::Predictions predict_hours(const model::TrainedModel& model, const grid::GridGraph& graph,
                                 const grid::HourlyPanel& panel,
                                 const std::vector<std::size_t>& hours,
                                 const ad::Tensor* policy_costs = nullptr);

// De-normalized metrics over a segment. Raises Contract on an empty segment.
EvalMetrics evaluate(const model::TrainedModel& model, const grid::GridGraph& graph,
                     const grid::HourlyPanel& panel, const grid::PanelView& segment,
                     const ad::Tensor* policy_costs = nullptr);

}  // namespace cbamgrid::train
