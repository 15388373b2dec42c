#include "cbamgrid/robustness/spatial_lag.hpp"

#include <cmath>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/linalg.hpp"

namespace cbamgrid::robustness {

using ad::Tensor;

namespace {

struct Design {
    Tensor x;                         // (hours * N) x k, full column set
    std::vector<std::string> names;   // k column names
    std::vector<double> y;            // price
    std::vector<double> wprice;       // (W price_t)_i, the spatial lag
    std::vector<std::size_t> hours;   // hour index per block
};

// Full regressor layout; structurally-zero columns are pruned by the fit.
Design build_design(const grid::HourlyPanel& panel, const grid::GridGraph& graph,
                    const Tensor& costs, const grid::PanelView& segment,
                    const std::vector<grid::CarbonClass>& classes, const Tensor& w) {
    const int n = graph.node_count();
    require(static_cast<int>(classes.size()) == n, ErrorKind::Contract,
            "spatial lag: class vector size mismatch");
    require(costs.rows() == static_cast<int>(panel.hours()) && costs.cols() == n, ErrorKind::Shape,
            "spatial lag: cost matrix must be hours x nodes");

    Design d;
    for (std::size_t h = std::max<std::size_t>(segment.begin, 1); h < segment.end(); ++h)
        d.hours.push_back(h);
    require(!d.hours.empty(), ErrorKind::Contract, "spatial lag: segment has no usable hours");

    for (const auto& code : graph.nodes()) d.names.push_back("fe_" + code);
    d.names.push_back("demand_gw");
    d.names.push_back("price_lag1");
    for (const char* c : {"low", "medium", "high"}) d.names.push_back(std::string("cost_x_") + c);
    for (const char* c : {"low", "medium", "high"}) d.names.push_back(std::string("wcost_x_") + c);
    const int k = static_cast<int>(d.names.size());

    const int rows = static_cast<int>(d.hours.size()) * n;
    d.x = Tensor(rows, k);
    d.y.resize(rows);
    d.wprice.resize(rows);

    for (std::size_t b = 0; b < d.hours.size(); ++b) {
        const std::size_t t = d.hours[b];
        for (int i = 0; i < n; ++i) {
            const int r = static_cast<int>(b) * n + i;
            double wcost = 0.0, wp = 0.0;
            for (int j = 0; j < n; ++j) {
                if (w.at(i, j) == 0.0) continue;
                wcost += w.at(i, j) * costs.at(static_cast<int>(t), j);
                wp += w.at(i, j) * panel.series[j].price[t];
            }
            const int cls = static_cast<int>(classes[i]);
            int c = 0;
            d.x.at(r, c + i) = 1.0;  // node fixed effect
            c += n;
            d.x.at(r, c++) = panel.series[i].demand[t] / 1000.0;
            d.x.at(r, c++) = panel.series[i].price[t - 1];
            d.x.at(r, c + cls) = costs.at(static_cast<int>(t), i);
            c += 3;
            d.x.at(r, c + cls) = wcost;
            d.y[r] = panel.series[i].price[t];
            d.wprice[r] = wp;
        }
    }
    return d;
}

std::vector<int> active_columns(const Design& d, std::vector<std::string>& dropped) {
    std::vector<int> active;
    for (int c = 0; c < d.x.cols(); ++c) {
        bool nonzero = false;
        for (int r = 0; r < d.x.rows() && !nonzero; ++r) nonzero = d.x.at(r, c) != 0.0;
        if (nonzero)
            active.push_back(c);
        else
            dropped.push_back(d.names[c]);
    }
    return active;
}

Tensor select_columns(const Tensor& x, const std::vector<int>& cols) {
    Tensor out(x.rows(), static_cast<int>(cols.size()));
    for (int r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c) out.at(r, static_cast<int>(c)) = x.at(r, cols[c]);
    return out;
}

// Grid ordered by |rho| so exact ties (e.g. a one-node graph where the
// spatial term vanishes) resolve to the smallest-magnitude coefficient.
std::vector<double> rho_grid() {
    std::vector<double> grid = {0.0};
    for (int step = 1;; ++step) {
        const double v = static_cast<double>(step) * kRhoGridStep;
        if (v > kRhoGridLimit + 1e-12) break;
        grid.push_back(v);
        grid.push_back(-v);
    }
    return grid;
}

}  // namespace

SpatialLagModel fit_spatial_lag(const grid::HourlyPanel& panel, const grid::GridGraph& graph,
                                const Tensor& policy_costs, const grid::PanelView& segment,
                                const std::vector<grid::CarbonClass>& classes) {
    SpatialLagModel model;
    model.weights = graph.row_normalized_weights();
    Design d = build_design(panel, graph, policy_costs, segment, classes, model.weights);

    std::vector<int> active = active_columns(d, model.dropped_columns);
    require(!active.empty(), ErrorKind::Estimation, "spatial lag: no usable regressors");
    Tensor xa = select_columns(d.x, active);
    std::vector<std::string> names;
    for (int c : active) names.push_back(d.names[c]);

    // ten observations per parameter, counting rho itself
    require(static_cast<std::size_t>(xa.rows()) >= 10 * (names.size() + 1), ErrorKind::Contract,
            "spatial lag: segment too short for " + std::to_string(names.size() + 1) + " parameters");

    double best_rss = HUGE_VAL;
    std::vector<double> y_trans(d.y.size());
    for (double rho : rho_grid()) {
        for (std::size_t r = 0; r < d.y.size(); ++r) y_trans[r] = d.y[r] - rho * d.wprice[r];
        linalg::LstsqResult fit = linalg::lstsq(xa, y_trans, names);
        if (fit.rss < best_rss) {
            best_rss = fit.rss;
            model.rho = rho;
            model.beta = fit.beta;
        }
    }
    model.regressor_names = names;
    const double dof = static_cast<double>(xa.rows()) - static_cast<double>(names.size()) - 1.0;
    model.residual_variance = best_rss / (dof > 0.0 ? dof : 1.0);
    return model;
}

namespace {

double beta_for(const SpatialLagModel& m, const std::string& name) {
    for (std::size_t i = 0; i < m.regressor_names.size(); ++i)
        if (m.regressor_names[i] == name) return m.beta[i];
    return 0.0;  // dropped (structurally zero) columns contribute nothing
}

// (I - rho W) x = rhs
std::vector<double> solve_reduced_form(const SpatialLagModel& m, const std::vector<double>& rhs) {
    const int n = m.weights.rows();
    Tensor a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.at(i, j) = (i == j ? 1.0 : 0.0) - m.rho * m.weights.at(i, j);
    return linalg::solve(a, rhs);
}

}  // namespace

std::vector<double> spatial_lag_impacts(const SpatialLagModel& model, const grid::GridGraph& graph,
                                        const Tensor& scenario_costs,
                                        const Tensor& baseline_costs, const grid::PanelView& segment,
                                        const std::vector<grid::CarbonClass>& classes) {
    const int n = graph.node_count();
    double beta_cost[3] = {beta_for(model, "cost_x_low"), beta_for(model, "cost_x_medium"),
                           beta_for(model, "cost_x_high")};
    double beta_wcost[3] = {beta_for(model, "wcost_x_low"), beta_for(model, "wcost_x_medium"),
                            beta_for(model, "wcost_x_high")};

    std::vector<double> impact(n, 0.0);
    std::vector<double> direct(n, 0.0);
    std::size_t hours = 0;
    for (std::size_t t = std::max<std::size_t>(segment.begin, 1); t < segment.end(); ++t, ++hours) {
        for (int i = 0; i < n; ++i) {
            const double dcost =
                scenario_costs.at(static_cast<int>(t), i) - baseline_costs.at(static_cast<int>(t), i);
            double dwcost = 0.0;
            for (int j = 0; j < n; ++j) {
                if (model.weights.at(i, j) == 0.0) continue;
                dwcost += model.weights.at(i, j) * (scenario_costs.at(static_cast<int>(t), j) -
                                                    baseline_costs.at(static_cast<int>(t), j));
            }
            const int cls = static_cast<int>(classes[i]);
            direct[i] = beta_cost[cls] * dcost + beta_wcost[cls] * dwcost;
        }
        std::vector<double> dprice = solve_reduced_form(model, direct);
        for (int i = 0; i < n; ++i) impact[i] += dprice[i];
    }
    require(hours > 0, ErrorKind::Contract, "spatial_lag_impacts: empty segment");
    for (double& v : impact) v /= static_cast<double>(hours);
    return impact;
}

std::vector<double> spatial_lag_predict(const SpatialLagModel& model, const grid::HourlyPanel& panel,
                                        const grid::GridGraph& graph, const Tensor& policy_costs,
                                        const grid::PanelView& segment,
                                        const std::vector<grid::CarbonClass>& classes) {
    Design d = build_design(panel, graph, policy_costs, segment, classes, model.weights);
    std::vector<double> xb(d.y.size(), 0.0);
    const int n = graph.node_count();
    // map each fitted coefficient back to its full-design column
    std::vector<int> full_idx(model.regressor_names.size(), -1);
    for (std::size_t c = 0; c < model.regressor_names.size(); ++c)
        for (std::size_t full = 0; full < d.names.size(); ++full)
            if (d.names[full] == model.regressor_names[c]) {
                full_idx[c] = static_cast<int>(full);
                break;
            }
    for (std::size_t r = 0; r < d.y.size(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < model.regressor_names.size(); ++c)
            if (full_idx[c] >= 0) s += model.beta[c] * d.x.at(static_cast<int>(r), full_idx[c]);
        xb[r] = s;
    }
    std::vector<double> out(d.y.size(), 0.0);
    std::vector<double> rhs(n);
    for (std::size_t b = 0; b < d.hours.size(); ++b) {
        for (int i = 0; i < n; ++i) rhs[i] = xb[b * n + i];
        std::vector<double> pred = solve_reduced_form(model, rhs);
        for (int i = 0; i < n; ++i) out[b * n + i] = pred[i];
    }
    return out;
}

}  // namespace cbamgrid::robustness
