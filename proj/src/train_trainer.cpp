#include "cbamgrid/train/trainer.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/rng.hpp"
#include "cbamgrid/stats.hpp"

namespace cbamgrid::train {

using ad::Tape;
using ad::Tensor;
using ad::Var;

namespace {

// Adaptive first-order update state, one slot per parameter block.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    long long step = 0;
    static constexpr double kBeta1 = 0.9;
    static constexpr double kBeta2 = 0.999;
    static constexpr double kEps = 1e-8;

    explicit AdamState(const std::vector<std::pair<std::string, Tensor*>>& blocks) {
        for (const auto& [name, t] : blocks) {
            m.emplace_back(t->rows(), t->cols());
            v.emplace_back(t->rows(), t->cols());
        }
    }

    void update(std::vector<std::pair<std::string, Tensor*>>& blocks,
                const std::vector<const Tensor*>& grads, double lr) {
        ++step;
        const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            Tensor& theta = *blocks[b].second;
            const Tensor& g = *grads[b];
            for (std::size_t i = 0; i < theta.size(); ++i) {
                m[b][i] = kBeta1 * m[b][i] + (1.0 - kBeta1) * g[i];
                v[b][i] = kBeta2 * v[b][i] + (1.0 - kBeta2) * g[i] * g[i];
                const double mhat = m[b][i] / bc1;
                const double vhat = v[b][i] / bc2;
                theta[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
            }
        }
    }
};

bool is_price_block(const std::string& name) {
    return name.rfind("enc.price.", 0) == 0 || name.rfind("head.price.", 0) == 0;
}

std::vector<double> column(const Tensor& t) { return t.raw(); }

}  // namespace

std::vector<std::size_t> usable_hours(const grid::PanelView& view, int window) {
    std::vector<std::size_t> hours;
    const std::size_t lo = std::max<std::size_t>(view.begin, static_cast<std::size_t>(window));
    for (std::size_t h = lo; h < view.end(); ++h) hours.push_back(h);
    return hours;
}

model::Predictions predict_hours(const model::TrainedModel& model, const grid::GridGraph& graph,
                                 const grid::HourlyPanel& panel,
                                 const std::vector<std::size_t>& hours,
                                 const Tensor* policy_costs) {
    require(!hours.empty(), ErrorKind::Contract, "predict_hours: no hours given");
    const int n = graph.node_count();
    grid::FeatureBuilder fb(panel, model.norms, model.config.window, policy_costs);
    model::Predictions out{Tensor(static_cast<int>(hours.size()) * n, 1),
                           Tensor(static_cast<int>(hours.size()) * n, 1)};
    constexpr std::size_t kChunk = 256;  // hours per forward pass
    for (std::size_t at = 0; at < hours.size(); at += kChunk) {
        const std::size_t take = std::min(kChunk, hours.size() - at);
        std::vector<std::size_t> chunk(hours.begin() + at, hours.begin() + at + take);
        model::Predictions p =
            model::predict(model.params, fb.block(chunk), graph.adjacency());
        for (std::size_t r = 0; r < p.ci.size(); ++r) {
            out.ci[at * n + r] = p.ci[r];
            out.price[at * n + r] = p.price[r];
        }
    }
    return out;
}

namespace {

struct DenormPredictions {
    std::vector<double> ci;
    std::vector<double> price;
};

DenormPredictions denormalize(const model::Predictions& pred, const grid::NormStats& norms, int n) {
    DenormPredictions out;
    out.ci.resize(pred.ci.size());
    out.price.resize(pred.price.size());
    for (std::size_t r = 0; r < pred.ci.size(); ++r) {
        const int i = static_cast<int>(r % n);
        out.ci[r] = pred.ci[r] * norms.ci_std.at(i, 0) + norms.ci_mean.at(i, 0);
        out.price[r] = pred.price[r] * norms.price_std.at(i, 0) + norms.price_mean.at(i, 0);
    }
    return out;
}

}  // namespace

EvalMetrics evaluate(const model::TrainedModel& model, const grid::GridGraph& graph,
                     const grid::HourlyPanel& panel, const grid::PanelView& segment,
                     const Tensor* policy_costs) {
    require(!segment.empty(), ErrorKind::Contract, "evaluate: empty segment");
    const auto hours = usable_hours(segment, model.config.window);
    require(!hours.empty(), ErrorKind::Contract, "evaluate: segment shorter than the lag window");
    model::Predictions pred = predict_hours(model, graph, panel, hours, policy_costs);
    DenormPredictions nat = denormalize(pred, model.norms, graph.node_count());
    grid::TargetBlock truth = grid::build_targets_natural(panel, hours);

    EvalMetrics m;
    m.rmse_ci = stats::rmse(nat.ci, truth.ci.raw());
    m.rmse_price = stats::rmse(nat.price, truth.price.raw());
    m.mae_ci = stats::mae(nat.ci, truth.ci.raw());
    m.mae_price = stats::mae(nat.price, truth.price.raw());
    m.pred_corr = stats::pearson(nat.ci, nat.price);
    return m;
}

std::string TrainReport::to_json() const {
    nlohmann::json j;
    j["best_epoch"] = best_epoch;
    j["test"] = {{"rmse_ci", test.rmse_ci},
                 {"rmse_price", test.rmse_price},
                 {"mae_ci", test.mae_ci},
                 {"mae_price", test.mae_price},
                 {"pred_corr", test.pred_corr}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : epochs) {
        rows.push_back({{"epoch", e.epoch},
                        {"train_mse_ci", e.train.mse_ci},
                        {"train_mse_price", e.train.mse_price},
                        {"train_corr_term", e.train.corr_term},
                        {"train_total", e.train.total},
                        {"val_mse_ci", e.val.mse_ci},
                        {"val_mse_price", e.val.mse_price},
                        {"val_corr_term", e.val.corr_term},
                        {"val_total", e.val.total}});
    }
    j["epochs"] = rows;
    return j.dump(2);
}

TrainResult train(const model::ModelConfig& config, const grid::GridGraph& graph,
                  const grid::HourlyPanel& panel, const grid::SplitSpec& split,
                  const TrainOptions& options) {
    config.validate();
    require(graph.node_count() == panel.node_count(), ErrorKind::Contract,
            "train: graph and panel disagree on node count");

    grid::SplitViews views = grid::chronological_split(panel, split);
    require(views.train.length > static_cast<std::size_t>(config.window), ErrorKind::Contract,
            "train: training segment must be longer than the lag window");

    model::TrainedModel tm;
    tm.config = config;
    tm.nodes = panel.node_codes;
    tm.norms = grid::compute_norm_stats(panel, views.train, options.policy_threshold,
                                        options.policy_ets);

    const int n = graph.node_count();
    grid::FeatureBuilder fb(panel, tm.norms, config.window, options.policy_costs);
    tm.params = model::init_params(config, fb.feature_dim());

    auto blocks = tm.params.blocks();
    AdamState adam(blocks);
    Rng shuffle_rng(config.seed);

    const auto train_hours = usable_hours(views.train, config.window);
    require(!train_hours.empty(), ErrorKind::Contract, "train: no usable training hours");
    const auto val_hours = usable_hours(views.val, config.window);

    // Pre-built z-scored targets for the whole axis, indexed by hour.
    std::vector<std::size_t> all_hours(panel.hours());
    for (std::size_t h = 0; h < panel.hours(); ++h) all_hours[h] = h;
    grid::TargetBlock all_targets = grid::build_targets(panel, tm.norms, all_hours);
    auto gather_targets = [&](const std::vector<std::size_t>& hours) {
        grid::TargetBlock tb{Tensor(static_cast<int>(hours.size()) * n, 1),
                             Tensor(static_cast<int>(hours.size()) * n, 1)};
        for (std::size_t b = 0; b < hours.size(); ++b)
            for (int i = 0; i < n; ++i) {
                tb.ci[b * n + i] = all_targets.ci[hours[b] * n + i];
                tb.price[b * n + i] = all_targets.price[hours[b] * n + i];
            }
        return tb;
    };

    auto eval_loss = [&](const std::vector<std::size_t>& hours) -> LossParts {
        model::Predictions pred = predict_hours(tm, graph, panel, hours, options.policy_costs);
        grid::TargetBlock tb = gather_targets(hours);
        LossBreakdown lb = loss_parts(column(pred.ci), column(pred.price), column(tb.ci),
                                      column(tb.price), config.lambda_ci, config.lambda_price,
                                      config.lambda_corr);
        return LossParts{lb.mse_ci, lb.mse_price, lb.corr_term, lb.total};
    };

    TrainReport report;
    double best_val = HUGE_VAL;
    int since_best = 0;
    model::ModelParams best_params = tm.params;

    // Zero tensors standing in for the price branch when the test hook asks
    // for forced-zero gradients; shapes mirror the parameter blocks.
    std::vector<Tensor> zero_tensors;
    if (options.force_zero_price_grads)
        for (const auto& [name, t] : blocks) zero_tensors.emplace_back(t->rows(), t->cols());

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::vector<std::size_t> order = train_hours;
        shuffle_rng.shuffle(order);

        double epoch_total = 0.0, epoch_mse_ci = 0.0, epoch_mse_price = 0.0, epoch_corr = 0.0;
        std::size_t batches = 0;
        for (std::size_t at = 0; at < order.size(); at += config.batch_size) {
            const std::size_t take = std::min<std::size_t>(config.batch_size, order.size() - at);
            std::vector<std::size_t> batch(order.begin() + at, order.begin() + at + take);

            Tape tape;
            model::ParamVars pv = model::stage_params(tape, tm.params);
            Var x = tape.leaf(fb.block(batch));
            model::ForwardActivations act = model::forward(tape, pv, x, graph.adjacency());
            grid::TargetBlock tb = gather_targets(batch);
            Var yci = tape.leaf(tb.ci);
            Var ypr = tape.leaf(tb.price);
            LossBreakdown lb = dual_loss(tape, act.pred_ci, act.pred_price, yci, ypr,
                                         config.lambda_ci, config.lambda_price, config.lambda_corr);
            if (!std::isfinite(lb.total))
                raise(ErrorKind::Training, "divergence at epoch " + std::to_string(epoch) +
                                               ", batch " + std::to_string(batches + 1));
            tape.backward(lb.total_var);

            // Collect gradients in block order from the staged leaves.
            std::vector<Var> leaves = pv.all();
            std::vector<const Tensor*> grads;
            grads.reserve(leaves.size());
            for (Var v : leaves) grads.push_back(&v.grad());

            if (options.force_zero_price_grads) {
                for (std::size_t b = 0; b < blocks.size(); ++b)
                    if (is_price_block(blocks[b].first)) grads[b] = &zero_tensors[b];
            }

            adam.update(blocks, grads, config.learning_rate);

            epoch_total += lb.total;
            epoch_mse_ci += lb.mse_ci;
            epoch_mse_price += lb.mse_price;
            epoch_corr += lb.corr_term;
            ++batches;
        }

        EpochRow row;
        row.epoch = epoch;
        row.train = LossParts{epoch_mse_ci / batches, epoch_mse_price / batches,
                              epoch_corr / batches, epoch_total / batches};
        row.val = val_hours.empty() ? row.train : eval_loss(val_hours);
        report.epochs.push_back(row);

        if (row.val.total < best_val) {
            best_val = row.val.total;
            best_params = tm.params;
            report.best_epoch = epoch;
            since_best = 0;
        } else {
            ++since_best;
            if (since_best >= config.patience) break;
        }
    }

    tm.params = best_params;
    if (!views.test.empty() && !usable_hours(views.test, config.window).empty())
        report.test = evaluate(tm, graph, panel, views.test, options.policy_costs);

    return TrainResult{std::move(tm), std::move(report)};
}

}  // namespace cbamgrid::train
