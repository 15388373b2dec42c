#include "cbamgrid/robustness/harness.hpp"

#include <sstream>

#include <json.hpp>

#include "cbamgrid/csv.hpp"
#include "cbamgrid/errors.hpp"
#include "cbamgrid/rng.hpp"

namespace cbamgrid::robustness {

using ad::Tensor;

namespace {

void check_context(const RobustnessContext& ctx) {
    require(ctx.reference && ctx.graph && ctx.panel, ErrorKind::Contract,
            "robustness context is incomplete");
    require(ctx.reference->params.all_finite(), ErrorKind::Contract,
            "robustness: reference model parameters are not finite");
}

std::vector<double> impacts_for(const model::TrainedModel& m, const RobustnessContext& ctx,
                                const scenario::ScenarioConfig& sc) {
    scenario::ImpactReport rep =
        scenario::counterfactual_impacts(m, *ctx.graph, *ctx.panel, sc, ctx.eval_segment);
    return rep.delta_price;
}

}  // namespace

std::vector<double> reference_price_deltas(const RobustnessContext& ctx) {
    check_context(ctx);
    return impacts_for(*ctx.reference, ctx, ctx.reference_scenario);
}

SweepResult sensitivity_sweep(const RobustnessContext& ctx, SweepAxis axis) {
    check_context(ctx);
    const std::vector<double> ref = reference_price_deltas(ctx);

    SweepResult out;
    out.axis = axis == SweepAxis::Threshold ? "threshold" : "ets";
    double agg_sign = 0.0, agg_rank = 0.0;
    int non_ref = 0;
    const double* values = axis == SweepAxis::Threshold ? kThresholdSweep : kEtsSweep;
    for (int s = 0; s < 3; ++s) {
        scenario::ScenarioConfig sc = ctx.reference_scenario;
        if (axis == SweepAxis::Threshold)
            sc.threshold = values[s];
        else
            sc.ets_price = values[s];
        SweepSetting setting;
        setting.value = values[s];
        setting.is_reference = (axis == SweepAxis::Threshold ? sc.threshold == ctx.reference_scenario.threshold
                                                             : sc.ets_price == ctx.reference_scenario.ets_price);
        const std::vector<double> deltas = impacts_for(*ctx.reference, ctx, sc);
        setting.metrics = compare_impacts(deltas, ref, /*with_attenuation=*/false);
        if (!setting.is_reference) {
            agg_sign += setting.metrics.sign_agree;
            agg_rank += setting.metrics.rank_corr;
            ++non_ref;
        }
        out.settings.push_back(std::move(setting));
    }
    require(non_ref > 0, ErrorKind::Contract, "sensitivity sweep has no non-reference settings");
    out.aggregate.sign_agree = agg_sign / non_ref;
    out.aggregate.rank_corr = agg_rank / non_ref;
    return out;
}

// ------------------------------------------------------------- placebos

Tensor shuffle_costs_over_time(const Tensor& costs, std::uint64_t seed) {
    Rng rng(seed);
    Tensor out = costs;
    const int hours = costs.rows();
    // independent permutation per node, drawn in node order
    for (int i = 0; i < costs.cols(); ++i) {
        std::vector<std::size_t> perm(hours);
        for (int h = 0; h < hours; ++h) perm[h] = static_cast<std::size_t>(h);
        rng.shuffle(perm);
        for (int h = 0; h < hours; ++h) out.at(h, i) = costs.at(static_cast<int>(perm[h]), i);
    }
    return out;
}

std::vector<std::size_t> node_permutation(int nodes, std::uint64_t seed) {
    Rng rng(seed);
    return rng.permutation(static_cast<std::size_t>(nodes));
}

Tensor permute_cost_nodes(const Tensor& costs, const std::vector<std::size_t>& permutation) {
    require(static_cast<int>(permutation.size()) == costs.cols(), ErrorKind::Contract,
            "permute_cost_nodes: permutation size mismatch");
    Tensor out(costs.rows(), costs.cols());
    for (int i = 0; i < costs.cols(); ++i) {
        const int src = static_cast<int>(permutation[i]);
        for (int h = 0; h < costs.rows(); ++h) out.at(h, i) = costs.at(h, src);
    }
    return out;
}

Tensor training_policy_costs(const RobustnessContext& ctx) {
    require(ctx.schedule.active(), ErrorKind::Contract,
            "placebo: no training policy schedule in the context");
    return scenario::schedule_costs(*ctx.panel, ctx.schedule);
}

PlaceboResult placebo_with_costs(const RobustnessContext& ctx, const Tensor& placebo_costs) {
    check_context(ctx);
    // Re-estimate with the reference configuration on the scrambled channel.
    train::TrainOptions opts;
    opts.policy_costs = &placebo_costs;
    opts.policy_threshold = ctx.schedule.threshold;
    opts.policy_ets = ctx.schedule.ets_price;
    train::TrainResult placebo =
        train::train(ctx.reference->config, *ctx.graph, *ctx.panel, ctx.split, opts);

    PlaceboResult out;
    out.reference_deltas = reference_price_deltas(ctx);
    out.placebo_deltas = impacts_for(placebo.model, ctx, ctx.reference_scenario);
    out.metrics = compare_impacts(out.placebo_deltas, out.reference_deltas, /*with_attenuation=*/true);
    return out;
}

PlaceboResult placebo_time(const RobustnessContext& ctx, std::uint64_t seed) {
    return placebo_with_costs(ctx, shuffle_costs_over_time(training_policy_costs(ctx), seed));
}

PlaceboResult placebo_node(const RobustnessContext& ctx, std::uint64_t seed) {
    return placebo_with_costs(ctx, permute_cost_nodes(training_policy_costs(ctx),
                                                      node_permutation(ctx.graph->node_count(), seed)));
}

// ------------------------------------------------------------- baseline

std::string BaselineComparison::scatter_csv() const {
    std::ostringstream out;
    out << "node,gnn_delta,baseline_delta\n";
    for (std::size_t i = 0; i < nodes.size(); ++i)
        out << nodes[i] << ',' << csv::format_double(gnn_deltas[i]) << ','
            << csv::format_double(baseline_deltas[i]) << '\n';
    return out.str();
}

BaselineComparison compare_models(const RobustnessContext& ctx) {
    check_context(ctx);
    BaselineComparison out;
    out.nodes = ctx.panel->node_codes;

    std::vector<grid::CarbonClass> classes;
    for (int i = 0; i < ctx.graph->node_count(); ++i)
        classes.push_back(grid::classify_ci(ctx.reference->norms.ci_mean.at(i, 0)));

    grid::SplitViews views = grid::chronological_split(*ctx.panel, ctx.split);
    Tensor fit_costs = ctx.schedule.active()
                           ? scenario::schedule_costs(*ctx.panel, ctx.schedule)
                           : Tensor(static_cast<int>(ctx.panel->hours()), ctx.panel->node_count());
    out.baseline = fit_spatial_lag(*ctx.panel, *ctx.graph, fit_costs, views.train, classes);

    scenario::ScenarioConfig baseline_sc = ctx.reference_scenario;
    baseline_sc.intensity = 0.0;
    Tensor cost_s = scenario::scenario_costs(*ctx.panel, *ctx.graph, ctx.reference_scenario);
    Tensor cost_0 = scenario::scenario_costs(*ctx.panel, *ctx.graph, baseline_sc);
    out.baseline_deltas = spatial_lag_impacts(out.baseline, *ctx.graph, cost_s, cost_0,
                                              ctx.eval_segment, classes);
    out.gnn_deltas = reference_price_deltas(ctx);
    out.metrics = compare_impacts(out.gnn_deltas, out.baseline_deltas, /*with_attenuation=*/false);
    return out;
}

// ------------------------------------------------------------- full run

RobustnessReport run_robustness(const RobustnessContext& ctx, std::uint64_t seed) {
    RobustnessReport rep;
    rep.threshold_sweep = sensitivity_sweep(ctx, SweepAxis::Threshold);
    rep.ets_sweep = sensitivity_sweep(ctx, SweepAxis::Ets);
    rep.time_placebo = placebo_time(ctx, seed);
    rep.node_placebo = placebo_node(ctx, seed + 1);
    rep.baseline = compare_models(ctx);
    return rep;
}

namespace {

std::string fmt_or_blank(double v) { return v < 0.0 ? "" : csv::format_double(v); }

}  // namespace

std::string RobustnessReport::table_csv() const {
    std::ostringstream out;
    out << "check,design,sign_agree,rank_corr,attenuation\n";
    out << "sensitivity_threshold,threshold in {25;50;75}," << csv::format_double(threshold_sweep.aggregate.sign_agree)
        << ',' << csv::format_double(threshold_sweep.aggregate.rank_corr) << ",\n";
    out << "sensitivity_ets,ets in {70;85;100}," << csv::format_double(ets_sweep.aggregate.sign_agree) << ','
        << csv::format_double(ets_sweep.aggregate.rank_corr) << ",\n";
    out << "placebo_time,shuffle cost over time," << csv::format_double(time_placebo.metrics.sign_agree)
        << ',' << csv::format_double(time_placebo.metrics.rank_corr) << ','
        << fmt_or_blank(time_placebo.metrics.attenuation) << '\n';
    out << "placebo_node,permute cost over nodes," << csv::format_double(node_placebo.metrics.sign_agree)
        << ',' << csv::format_double(node_placebo.metrics.rank_corr) << ','
        << fmt_or_blank(node_placebo.metrics.attenuation) << '\n';
    out << "baseline,spatial-lag panel," << csv::format_double(baseline.metrics.sign_agree) << ','
        << csv::format_double(baseline.metrics.rank_corr) << ",\n";
    return out.str();
}

std::string RobustnessReport::detail_json() const {
    nlohmann::json j;
    auto sweep_json = [](const SweepResult& s) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& set : s.settings)
            rows.push_back({{"value", set.value},
                            {"is_reference", set.is_reference},
                            {"sign_agree", set.metrics.sign_agree},
                            {"rank_corr", set.metrics.rank_corr}});
        return nlohmann::json{{"axis", s.axis},
                              {"settings", rows},
                              {"aggregate_sign_agree", s.aggregate.sign_agree},
                              {"aggregate_rank_corr", s.aggregate.rank_corr}};
    };
    j["sensitivity_threshold"] = sweep_json(threshold_sweep);
    j["sensitivity_ets"] = sweep_json(ets_sweep);
    auto placebo_json = [](const PlaceboResult& p) {
        return nlohmann::json{{"sign_agree", p.metrics.sign_agree},
                              {"rank_corr", p.metrics.rank_corr},
                              {"attenuation", p.metrics.attenuation},
                              {"placebo_deltas", p.placebo_deltas},
                              {"reference_deltas", p.reference_deltas}};
    };
    j["placebo_time"] = placebo_json(time_placebo);
    j["placebo_node"] = placebo_json(node_placebo);
    j["baseline"] = {{"rho", baseline.baseline.rho},
                     {"regressors", baseline.baseline.regressor_names},
                     {"beta", baseline.baseline.beta},
                     {"dropped_columns", baseline.baseline.dropped_columns},
                     {"sign_agree", baseline.metrics.sign_agree},
                     {"rank_corr", baseline.metrics.rank_corr},
                     {"gnn_deltas", baseline.gnn_deltas},
                     {"baseline_deltas", baseline.baseline_deltas}};
    return j.dump(2);
}

}  // namespace cbamgrid::robustness
