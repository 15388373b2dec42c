#include "cbamgrid/grid/features.hpp"

#include <cmath>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/grid/timeutil.hpp"

namespace cbamgrid::grid {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

void mean_std(const std::vector<double>& v, std::size_t begin, std::size_t end, double& mean,
              double& std) {
    double s = 0.0;
    for (std::size_t h = begin; h < end; ++h) s += v[h];
    const double n = static_cast<double>(end - begin);
    mean = s / n;
    double q = 0.0;
    for (std::size_t h = begin; h < end; ++h) q += (v[h] - mean) * (v[h] - mean);
    std = std::sqrt(q / n);
}

}  // namespace

NormStats compute_norm_stats(const HourlyPanel& panel, const PanelView& train,
                             double policy_threshold, double policy_ets) {
    require(train.panel == &panel, ErrorKind::Contract, "norm stats: view of a different panel");
    require(train.length >= 2, ErrorKind::Contract, "norm stats: training segment too short");
    const int n = panel.node_count();
    NormStats st;
    st.base_mean = ad::Tensor(1, kBaseFeatureCount);
    st.base_std = ad::Tensor(1, kBaseFeatureCount);
    st.price_mean = ad::Tensor(n, 1);
    st.price_std = ad::Tensor(n, 1);
    st.ci_mean = ad::Tensor(n, 1);
    st.ci_std = ad::Tensor(n, 1);
    st.policy_mean = ad::Tensor(n, 1);
    st.policy_std = ad::Tensor(1, 1);
    st.policy_threshold = policy_threshold;
    st.policy_ets = policy_ets;

    // base features pooled over (node, hour)
    std::vector<double> pooled(static_cast<std::size_t>(n) * train.length);
    for (int k = 0; k < kBaseFeatureCount; ++k) {
        std::size_t at = 0;
        for (int i = 0; i < n; ++i)
            for (std::size_t h = 0; h < train.length; ++h)
                pooled[at++] = panel.base_feature(i, train.begin + h, k);
        double m, sd;
        mean_std(pooled, 0, pooled.size(), m, sd);
        st.base_mean.at(0, k) = m;
        st.base_std.at(0, k) = sd;
    }

    // full-intensity reference costs: node means, pooled deviation
    {
        std::vector<double> ref(train.length);
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
            for (std::size_t h = 0; h < train.length; ++h) {
                const double ci = panel.series[i].ci[train.begin + h];
                ref[h] = std::max(0.0, ci - policy_threshold) * policy_ets / 1000.0;
            }
            double m, sd;
            mean_std(ref, 0, ref.size(), m, sd);
            st.policy_mean.at(i, 0) = m;
            sq += sd * sd;
        }
        st.policy_std.at(0, 0) = std::sqrt(sq / static_cast<double>(n));
    }

    // target scales stay per node
    for (int i = 0; i < n; ++i) {
        const NodeSeries& s = panel.series[i];
        double m, sd;
        mean_std(s.price, train.begin, train.end(), m, sd);
        st.price_mean.at(i, 0) = m;
        st.price_std.at(i, 0) = sd;
        mean_std(s.ci, train.begin, train.end(), m, sd);
        st.ci_mean.at(i, 0) = m;
        st.ci_std.at(i, 0) = sd;
    }
    return st;
}

int feature_length(int base_features, int window) {
    return base_features + 2 * window + 4 + 1;
}

FeatureBuilder::FeatureBuilder(const HourlyPanel& panel, const NormStats& norms, int window,
                               const ad::Tensor* policy_costs)
    : panel_(&panel), norms_(&norms), window_(window), policy_costs_(policy_costs) {
    require(window >= 1, ErrorKind::Contract, "feature window must be >= 1");
    if (policy_costs_) {
        require(policy_costs_->rows() == static_cast<int>(panel.hours()) &&
                    policy_costs_->cols() == panel.node_count(),
                ErrorKind::Shape, "policy cost matrix must be hours x nodes");
    }
}

void FeatureBuilder::write_hour(std::size_t hour, ad::Tensor& out, int row0) const {
    if (hour < static_cast<std::size_t>(window_) || hour >= panel_->hours())
        raise(ErrorKind::Range, "feature hour " + std::to_string(hour) + " outside [window, hours)");
    const int n = panel_->node_count();
    const std::int64_t epoch = panel_->timestamps[hour];
    const double hod = static_cast<double>(hour_of_day(epoch));
    const double dow = static_cast<double>(day_of_week(epoch));
    const double sin_h = std::sin(kTwoPi * hod / 24.0);
    const double cos_h = std::cos(kTwoPi * hod / 24.0);
    const double sin_d = std::sin(kTwoPi * dow / 7.0);
    const double cos_d = std::cos(kTwoPi * dow / 7.0);

    for (int i = 0; i < n; ++i) {
        const NodeSeries& s = panel_->series[i];
        int c = 0;
        for (int k = 0; k < kBaseFeatureCount; ++k)
            out.at(row0 + i, c++) = NormStats::zscore(panel_->base_feature(i, hour, k),
                                                      norms_->base_mean.at(0, k), norms_->base_std.at(0, k));
        for (int lag = 1; lag <= window_; ++lag) {
            out.at(row0 + i, c++) = NormStats::zscore(s.price[hour - lag], norms_->price_mean.at(i, 0),
                                                      norms_->price_std.at(i, 0));
            out.at(row0 + i, c++) = NormStats::zscore(s.ci[hour - lag], norms_->ci_mean.at(i, 0),
                                                      norms_->ci_std.at(i, 0));
        }
        out.at(row0 + i, c++) = sin_h;
        out.at(row0 + i, c++) = cos_h;
        out.at(row0 + i, c++) = sin_d;
        out.at(row0 + i, c++) = cos_d;
        const double raw_cost = policy_costs_ ? policy_costs_->at(static_cast<int>(hour), i) : 0.0;
        out.at(row0 + i, c++) = NormStats::zscore(raw_cost, norms_->policy_mean.at(i, 0),
                                                  norms_->policy_std.at(0, 0));
    }
}

ad::Tensor FeatureBuilder::hour(std::size_t h) const {
    ad::Tensor out(panel_->node_count(), feature_dim());
    write_hour(h, out, 0);
    return out;
}

ad::Tensor FeatureBuilder::block(const std::vector<std::size_t>& hours) const {
    const int n = panel_->node_count();
    ad::Tensor out(static_cast<int>(hours.size()) * n, feature_dim());
    for (std::size_t b = 0; b < hours.size(); ++b) write_hour(hours[b], out, static_cast<int>(b) * n);
    return out;
}

TargetBlock build_targets(const HourlyPanel& panel, const NormStats& norms,
                          const std::vector<std::size_t>& hours) {
    const int n = panel.node_count();
    TargetBlock tb{ad::Tensor(static_cast<int>(hours.size()) * n, 1),
                   ad::Tensor(static_cast<int>(hours.size()) * n, 1)};
    for (std::size_t b = 0; b < hours.size(); ++b) {
        for (int i = 0; i < n; ++i) {
            const std::size_t r = b * n + i;
            tb.ci[r] = NormStats::zscore(panel.series[i].ci[hours[b]], norms.ci_mean.at(i, 0),
                                         norms.ci_std.at(i, 0));
            tb.price[r] = NormStats::zscore(panel.series[i].price[hours[b]], norms.price_mean.at(i, 0),
                                            norms.price_std.at(i, 0));
        }
    }
    return tb;
}

TargetBlock build_targets_natural(const HourlyPanel& panel, const std::vector<std::size_t>& hours) {
    const int n = panel.node_count();
    TargetBlock tb{ad::Tensor(static_cast<int>(hours.size()) * n, 1),
                   ad::Tensor(static_cast<int>(hours.size()) * n, 1)};
    for (std::size_t b = 0; b < hours.size(); ++b) {
        for (int i = 0; i < n; ++i) {
            const std::size_t r = b * n + i;
            tb.ci[r] = panel.series[i].ci[hours[b]];
            tb.price[r] = panel.series[i].price[hours[b]];
        }
    }
    return tb;
}

}  // namespace cbamgrid::grid
