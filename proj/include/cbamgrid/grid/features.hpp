#pragma once

#include <cstddef>
#include <vector>

#include "cbamgrid/ad/tensor.hpp"
#include "cbamgrid/grid/panel.hpp"

namespace cbamgrid::grid {

// Z-scoring statistics, all computed from the training segment only. Base
// features are normalized per feature, pooled across nodes and hours: node
// identity must survive z-scoring because the attention encoder is
// otherwise anonymous. Targets (and their lagged copies) are scaled per
// node so head outputs live in comparable units. The policy slot is
// centered per node (its level must not act as a second identity channel)
// but scaled by the pooled deviation so response slopes stay comparable
// across nodes. Zero-variance columns (std below the guard) normalize to
// constant 0.
struct NormStats {
    ad::Tensor base_mean;    // 1 x kBaseFeatureCount, pooled over nodes
    ad::Tensor base_std;     // 1 x kBaseFeatureCount
    ad::Tensor price_mean;   // N x 1
    ad::Tensor price_std;    // N x 1
    ad::Tensor ci_mean;      // N x 1
    ad::Tensor ci_std;       // N x 1
    ad::Tensor policy_mean;  // N x 1, from the full-intensity reference scenario
    ad::Tensor policy_std;   // 1 x 1, pooled deviation around the node means
    double policy_threshold = 50.0;  // reference scenario parameters the
    double policy_ets = 85.0;        // policy statistics were computed under

    static constexpr double kStdGuard = 1e-12;
    static double zscore(double v, double mean, double std) {
        return std < kStdGuard ? 0.0 : (v - mean) / std;
    }
};

// Policy statistics are taken from the intensity-1.0 scenario with the given
// threshold/ETS so that scenario differences survive z-scoring.
NormStats compute_norm_stats(const HourlyPanel& panel, const PanelView& train, double policy_threshold,
                             double policy_ets);

// Per-node feature vector layout:
//   [ base features (z) | window lags of (price, ci) (z) |
//     sin/cos hour-of-day | sin/cos day-of-week | policy cost (z) ]
int feature_length(int base_features, int window);

// Assembles per-hour node feature matrices. `policy_costs`, when present, is
// an hours x nodes matrix of raw EUR/MWh costs filling the policy slot
// (z-scored with the stats above); otherwise the slot's raw value is 0.
class FeatureBuilder {
public:
    FeatureBuilder(const HourlyPanel& panel, const NormStats& norms, int window,
                   const ad::Tensor* policy_costs = nullptr);

    int feature_dim() const { return feature_length(kBaseFeatureCount, window_); }
    int window() const { return window_; }

    // N x F features for one hour. Requires hour >= window (lag context).
    ad::Tensor hour(std::size_t hour) const;

    // (hours.size() * N) x F block, rows grouped by hour.
    ad::Tensor block(const std::vector<std::size_t>& hours) const;

private:
    void write_hour(std::size_t hour, ad::Tensor& out, int row0) const;

    const HourlyPanel* panel_;
    const NormStats* norms_;
    int window_;
    const ad::Tensor* policy_costs_;
};

// Z-scored target columns for a set of hours, flattened hour-major: entry
// (b * N + i) belongs to node i at hours[b].
struct TargetBlock {
    ad::Tensor ci;     // (B*N) x 1
    ad::Tensor price;  // (B*N) x 1
};

TargetBlock build_targets(const HourlyPanel& panel, const NormStats& norms,
                          const std::vector<std::size_t>& hours);

// Natural-unit target columns in the same layout (for de-normalized metrics).
TargetBlock build_targets_natural(const HourlyPanel& panel, const std::vector<std::size_t>& hours);

}  // namespace cbamgrid::grid
