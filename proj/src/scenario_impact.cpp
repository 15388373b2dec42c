#include "cbamgrid/scenario/impact.hpp"

#include <sstream>

#include <json.hpp>

#include "cbamgrid/csv.hpp"
#include "cbamgrid/errors.hpp"

namespace cbamgrid::scenario {

std::string ImpactReport::to_csv() const {
    std::ostringstream out;
    out << "node,class,delta_price,delta_ci\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << nodes[i] << ',' << grid::to_string(classes[i]) << ','
            << csv::format_double(delta_price[i]) << ',' << csv::format_double(delta_ci[i]) << '\n';
    }
    return out.str();
}

std::string ImpactReport::summary_json() const {
    nlohmann::json j;
    j["scenario"] = {{"label", scenario.label},
                     {"intensity", scenario.intensity},
                     {"threshold", scenario.threshold},
                     {"ets_price", scenario.ets_price}};
    nlohmann::json per_node = nlohmann::json::array();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        per_node.push_back({{"node", nodes[i]},
                            {"class", grid::to_string(classes[i])},
                            {"delta_price", delta_price[i]},
                            {"delta_ci", delta_ci[i]}});
    }
    j["impacts"] = per_node;
    return j.dump(2);
}

ad::Tensor inject_policy(const grid::HourlyPanel& panel, const grid::GridGraph& graph,
                         const ScenarioConfig& scenario) {
    return scenario_costs(panel, graph, scenario);
}

ImpactReport counterfactual_impacts(const model::TrainedModel& model, const grid::GridGraph& graph,
                                    const grid::HourlyPanel& panel, const ScenarioConfig& scenario,
                                    const grid::PanelView& segment) {
    require(model.params.all_finite(), ErrorKind::Contract,
            "counterfactual_impacts: model parameters are not finite (untrained?)");
    require(!segment.empty(), ErrorKind::Contract, "counterfactual_impacts: empty segment");
    scenario.validate();

    const auto hours = train::usable_hours(segment, model.config.window);
    require(!hours.empty(), ErrorKind::Contract,
            "counterfactual_impacts: segment shorter than the lag window");
    const int n = graph.node_count();

    ScenarioConfig baseline = scenario;
    baseline.intensity = 0.0;
    ad::Tensor cost_s = inject_policy(panel, graph, scenario);
    ad::Tensor cost_0 = inject_policy(panel, graph, baseline);

    model::Predictions with = train::predict_hours(model, graph, panel, hours, &cost_s);
    model::Predictions without = train::predict_hours(model, graph, panel, hours, &cost_0);

    ImpactReport report;
    report.scenario = scenario;
    report.nodes = panel.node_codes;
    // The training-split mean CI is exactly the stored normalization mean.
    report.classes.reserve(n);
    for (int i = 0; i < n; ++i)
        report.classes.push_back(grid::classify_ci(model.norms.ci_mean.at(i, 0)));
    report.delta_price.assign(n, 0.0);
    report.delta_ci.assign(n, 0.0);

    const double inv_hours = 1.0 / static_cast<double>(hours.size());
    for (std::size_t b = 0; b < hours.size(); ++b) {
        for (int i = 0; i < n; ++i) {
            const std::size_t r = b * n + i;
            // identical normalized predictions de-normalize identically, so
            // the intensity-0 scenario yields exact zeros against itself
            report.delta_price[i] += (with.price[r] - without.price[r]) *
                                     model.norms.price_std.at(i, 0) * inv_hours;
            report.delta_ci[i] += (with.ci[r] - without.ci[r]) * model.norms.ci_std.at(i, 0) * inv_hours;
        }
    }
    return report;
}

train::TrainResult train_with_policy(const model::ModelConfig& config, const grid::GridGraph& graph,
                                     const grid::HourlyPanel& panel, const grid::SplitSpec& split,
                                     const grid::PolicySchedule& schedule) {
    train::TrainOptions opts;
    opts.policy_threshold = schedule.threshold;
    opts.policy_ets = schedule.ets_price;
    ad::Tensor costs;
    if (schedule.active()) {
        costs = schedule_costs(panel, schedule);
        opts.policy_costs = &costs;
    }
    return train::train(config, graph, panel, split, opts);
}

}  // namespace cbamgrid::scenario
