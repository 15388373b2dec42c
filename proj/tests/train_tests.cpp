#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/grid/synthetic.hpp"
#include "cbamgrid/model/params.hpp"
#include "cbamgrid/rng.hpp"
#include "cbamgrid/stats.hpp"
#include "cbamgrid/train/loss.hpp"
#include "cbamgrid/train/trainer.hpp"

using namespace cbamgrid;
using ad::Tape;
using ad::Tensor;
using ad::Var;
using grid::SyntheticOutput;
using grid::SyntheticSpec;

namespace {

// Centered, empirically orthonormal pair for constructing vectors with an
// exact sample correlation.
struct OrthoPair {
    std::vector<double> u;
    std::vector<double> w;
};

OrthoPair gram_schmidt_pair(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> u(n), w(n);
    for (auto& v : u) v = rng.normal();
    for (auto& v : w) v = rng.normal();
    auto center = [](std::vector<double>& v) {
        const double m = stats::mean(v);
        for (auto& x : v) x -= m;
    };
    auto norm = [](std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        s = std::sqrt(s);
        for (auto& x : v) x /= s;
    };
    center(u);
    norm(u);
    center(w);
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += u[i] * w[i];
    for (std::size_t i = 0; i < n; ++i) w[i] -= proj * u[i];
    norm(w);
    return {u, w};
}

std::vector<double> with_correlation(const OrthoPair& p, double rho) {
    std::vector<double> v(p.u.size());
    const double c = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = rho * p.u[i] + c * p.w[i];
    return v;
}

model::ModelConfig tiny_config(std::uint64_t seed) {
    model::ModelConfig c;
    c.layers = 2;
    c.hidden_dim = 8;
    c.head_dim = 6;
    c.window = 2;
    c.learning_rate = 3e-3;
    c.batch_size = 32;
    c.epochs = 30;
    c.patience = 30;
    c.seed = seed;
    return c;
}

}  // namespace

// ------------------------------------------------------------- dual_loss

TEST_CASE("perfect predictions give an all-zero loss breakdown") {
    Tape tape;
    Tensor y = Tensor::from(4, 1, {1.0, -0.5, 2.0, 0.25});
    Tensor z = Tensor::from(4, 1, {0.2, 0.4, -0.1, 0.9});
    Var pc = tape.leaf(y), pp = tape.leaf(z), tc = tape.leaf(y), tp = tape.leaf(z);
    auto lb = train::dual_loss(tape, pc, pp, tc, tp, 1.0, 1.0, 0.1);
    CHECK(lb.mse_ci == 0.0);
    CHECK(lb.mse_price == 0.0);
    CHECK(lb.corr_term == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(lb.total == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("zeroed weights reduce the composite loss to the CI term") {
    Tape tape;
    Tensor pc = Tensor::from(3, 1, {1.0, 2.0, 3.0});
    Tensor tc = Tensor::from(3, 1, {0.0, 1.0, 5.0});
    Tensor pp = Tensor::from(3, 1, {4.0, 1.0, 2.0});
    Tensor tp = Tensor::from(3, 1, {0.0, 0.0, 0.0});
    auto lb = train::dual_loss(tape, tape.leaf(pc), tape.leaf(pp), tape.leaf(tc), tape.leaf(tp),
                               1.0, 0.0, 0.0);
    const double expected_mse = (1.0 + 1.0 + 4.0) / 3.0;
    CHECK(lb.mse_ci == doctest::Approx(expected_mse).epsilon(1e-14));
    CHECK(lb.total == lb.mse_ci);
}

TEST_CASE("correlation term equals the gap between target and prediction correlation") {
    OrthoPair p = gram_schmidt_pair(64, 77);
    std::vector<double> base = p.u;
    std::vector<double> targets_second = with_correlation(p, 0.8);
    std::vector<double> preds_second = with_correlation(p, 0.5);
    CHECK(stats::pearson(base, targets_second) == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(stats::pearson(base, preds_second) == doctest::Approx(0.5).epsilon(1e-12));

    Tape tape;
    auto lb = train::dual_loss(tape, tape.leaf(Tensor::column(base)),
                               tape.leaf(Tensor::column(preds_second)),
                               tape.leaf(Tensor::column(base)),
                               tape.leaf(Tensor::column(targets_second)), 1.0, 1.0, 1.0);
    CHECK(lb.corr_term == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("length mismatch raises a contract error") {
    Tape tape;
    Var a = tape.leaf(Tensor(3, 1));
    Var b = tape.leaf(Tensor(4, 1));
    CHECK_THROWS_AS(train::dual_loss(tape, a, b, a, a, 1, 1, 0.1), Error);
}

TEST_CASE("loss decomposition identity holds for random inputs") {
    Rng rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(30));
        Tensor pc(n, 1), pp(n, 1), tc(n, 1), tp(n, 1);
        for (int i = 0; i < n; ++i) {
            pc[i] = rng.normal();
            pp[i] = rng.normal();
            tc[i] = rng.normal();
            tp[i] = rng.normal();
        }
        const double l1 = rng.uniform(), l2 = rng.uniform(), l3 = rng.uniform();
        Tape tape;
        auto lb = train::dual_loss(tape, tape.leaf(pc), tape.leaf(pp), tape.leaf(tc), tape.leaf(tp),
                                   l1, l2, l3);
        CHECK(std::fabs(lb.total - (l1 * lb.mse_ci + l2 * lb.mse_price + l3 * lb.corr_term)) < 1e-12);
        CHECK(lb.corr_term >= 0.0);
        CHECK(lb.corr_term <= 2.0);
        CHECK(lb.total_var.value().scalar() == doctest::Approx(lb.total).epsilon(1e-12));
    }
}

// ----------------------------------------------------------------- metrics

TEST_CASE("rmse and mae on identical and offset vectors") {
    std::vector<double> y = {3.0, -1.0, 2.5, 7.0};
    CHECK(stats::rmse(y, y) == 0.0);
    CHECK(stats::mae(y, y) == 0.0);
    std::vector<double> shifted = y;
    for (auto& v : shifted) v += 1.0;
    CHECK(stats::rmse(shifted, y) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(stats::mae(shifted, y) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rmse matches a direct hand computation on random vectors") {
    Rng rng(5);
    std::vector<double> pred(17), truth(17);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pred[i] = rng.normal();
        truth[i] = rng.normal();
    }
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    CHECK(stats::rmse(pred, truth) == doctest::Approx(std::sqrt(s / 17.0)).epsilon(1e-14));
}

TEST_CASE("empty segment evaluation raises a contract error") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(1);
    spec.schedule_intensities.clear();
    SyntheticOutput out = grid::generate_synthetic(spec, 60);
    model::TrainedModel m;
    m.config = tiny_config(1);
    m.nodes = out.panel.node_codes;
    grid::SplitViews v =
        grid::chronological_split(out.panel, grid::SplitSpec::from_fractions(1.0, 0.0, 0.0, 60));
    m.norms = grid::compute_norm_stats(out.panel, v.train, 50.0, 85.0);
    m.params = model::init_params(m.config, grid::feature_length(grid::kBaseFeatureCount, 2));
    grid::PanelView empty{&out.panel, 10, 0};
    CHECK_THROWS_AS(train::evaluate(m, out.graph, out.panel, empty), Error);
}

TEST_CASE("de-normalization round trip reproduces the targets") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(3);
    spec.schedule_intensities.clear();
    SyntheticOutput out = grid::generate_synthetic(spec, 120);
    grid::SplitViews v =
        grid::chronological_split(out.panel, grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 120));
    grid::NormStats norms = grid::compute_norm_stats(out.panel, v.train, 50.0, 85.0);
    for (int i = 0; i < 8; ++i) {
        for (std::size_t h = 0; h < 120; ++h) {
            const double orig = out.panel.series[i].price[h];
            const double z = grid::NormStats::zscore(orig, norms.price_mean.at(i, 0),
                                                     norms.price_std.at(i, 0));
            const double back = z * norms.price_std.at(i, 0) + norms.price_mean.at(i, 0);
            CHECK(back == doctest::Approx(orig).epsilon(1e-9));
        }
    }
}

// ------------------------------------------------------------------ train

TEST_CASE("training is deterministic: identical reports and parameters") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(11);
    SyntheticOutput out = grid::generate_synthetic(spec, 160);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 160);
    model::ModelConfig cfg = tiny_config(5);
    cfg.epochs = 8;

    train::TrainResult a = train::train(cfg, out.graph, out.panel, split);
    train::TrainResult b = train::train(cfg, out.graph, out.panel, split);
    CHECK(a.report.to_json() == b.report.to_json());
    auto ba = a.model.params.blocks();
    auto bb = b.model.params.blocks();
    for (std::size_t i = 0; i < ba.size(); ++i)
        for (std::size_t k = 0; k < ba[i].second->size(); ++k)
            CHECK((*ba[i].second)[k] == (*bb[i].second)[k]);
}

TEST_CASE("constant targets are fit to near-zero training loss") {
    SyntheticSpec spec;
    spec.seed = 7;
    spec.nodes = {{"XX", 150.0, 9000.0, 70.0}};
    spec.schedule_intensities.clear();
    SyntheticOutput out = grid::generate_synthetic(spec, 90);
    for (auto& s : out.panel.series) {
        for (auto& v : s.price) v = 55.0;
        for (auto& v : s.ci) v = 150.0;
    }
    grid::SplitSpec split = grid::SplitSpec::from_fractions(1.0, 0.0, 0.0, 90);
    model::ModelConfig cfg = tiny_config(2);
    cfg.layers = 1;
    cfg.hidden_dim = 6;
    cfg.head_dim = 4;
    cfg.batch_size = 96;  // full batch: the tail of this fit is slow
    // the scale-invariant correlation term never decays on constant
    // targets, so the constant-fit check runs with MSE terms only
    cfg.lambda_corr = 0.0;
    cfg.learning_rate = 1e-2;
    cfg.epochs = 8000;
    cfg.patience = 8000;
    train::TrainResult r = train::train(cfg, out.graph, out.panel, split);
    const auto& last = r.report.epochs.back().train;
    CHECK(last.mse_ci < 1e-6);
    CHECK(last.mse_price < 1e-6);
}

TEST_CASE("noise-free panel is learned to a small fraction of the target spread") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(13);
    spec.schedule_intensities.clear();
    spec.price_noise_std = 0.0;
    SyntheticOutput out = grid::generate_synthetic(spec, 420);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 420);
    model::ModelConfig cfg = tiny_config(3);
    cfg.hidden_dim = 12;
    cfg.head_dim = 8;
    cfg.epochs = 220;
    cfg.patience = 220;
    cfg.learning_rate = 4e-3;
    train::TrainResult r = train::train(cfg, out.graph, out.panel, split);

    // pooled test-segment price spread as the scale
    grid::SplitViews v = grid::chronological_split(out.panel, split);
    std::vector<double> prices;
    for (int i = 0; i < 8; ++i)
        for (std::size_t h = v.test.begin; h < v.test.end(); ++h)
            prices.push_back(out.panel.series[i].price[h]);
    const double spread = std::sqrt(stats::variance(prices));
    CHECK(r.report.test.rmse_price < 0.05 * spread);
}

TEST_CASE("divergence raises a training error naming epoch and batch") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(4);
    SyntheticOutput out = grid::generate_synthetic(spec, 100);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 100);
    model::ModelConfig cfg = tiny_config(6);
    cfg.learning_rate = 1e300;  // guaranteed overflow to non-finite
    cfg.epochs = 50;
    try {
        train::train(cfg, out.graph, out.panel, split);
        FAIL("expected training error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Training);
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
        CHECK(std::string(e.what()).find("batch") != std::string::npos);
    }
}

TEST_CASE("best epoch has the minimal validation total") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(17);
    SyntheticOutput out = grid::generate_synthetic(spec, 200);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 200);
    model::ModelConfig cfg = tiny_config(9);
    cfg.epochs = 15;
    train::TrainResult r = train::train(cfg, out.graph, out.panel, split);
    REQUIRE(r.report.best_epoch >= 1);
    const double best = r.report.epochs[r.report.best_epoch - 1].val.total;
    for (const auto& e : r.report.epochs) CHECK(best <= e.val.total);
}

TEST_CASE("loss decomposition identity holds for every reported epoch") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(19);
    SyntheticOutput out = grid::generate_synthetic(spec, 150);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 150);
    model::ModelConfig cfg = tiny_config(8);
    cfg.epochs = 6;
    train::TrainResult r = train::train(cfg, out.graph, out.panel, split);
    for (const auto& e : r.report.epochs) {
        CHECK(std::fabs(e.train.total - (cfg.lambda_ci * e.train.mse_ci +
                                         cfg.lambda_price * e.train.mse_price +
                                         cfg.lambda_corr * e.train.corr_term)) < 1e-12);
        CHECK(std::fabs(e.val.total -
                        (cfg.lambda_ci * e.val.mse_ci + cfg.lambda_price * e.val.mse_price +
                         cfg.lambda_corr * e.val.corr_term)) < 1e-12);
    }
}

TEST_CASE("single-task reduction: price branch is inert when its weights are zero") {
    // lambda_price = lambda_corr = 0: the price branch receives exactly zero
    // gradient, so a run with forced-zero price gradients is bit-identical
    SyntheticSpec spec = SyntheticSpec::default_eu8(23);
    SyntheticOutput out = grid::generate_synthetic(spec, 140);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 140);
    model::ModelConfig cfg = tiny_config(12);
    cfg.epochs = 10;
    cfg.lambda_price = 0.0;
    cfg.lambda_corr = 0.0;

    train::TrainOptions plain;
    train::TrainOptions forced;
    forced.force_zero_price_grads = true;
    train::TrainResult a = train::train(cfg, out.graph, out.panel, split, plain);
    train::TrainResult b = train::train(cfg, out.graph, out.panel, split, forced);

    auto ba = a.model.params.blocks();
    auto bb = b.model.params.blocks();
    REQUIRE(ba.size() == bb.size());
    for (std::size_t i = 0; i < ba.size(); ++i) {
        for (std::size_t k = 0; k < ba[i].second->size(); ++k)
            CHECK((*ba[i].second)[k] == (*bb[i].second)[k]);
    }
    // and the price branch never moved from its initialization
    model::ModelParams init = model::init_params(cfg, grid::feature_length(grid::kBaseFeatureCount, cfg.window));
    for (std::size_t k = 0; k < init.head_price.w1.size(); ++k)
        CHECK(a.model.params.head_price.w1[k] == init.head_price.w1[k]);
    for (std::size_t k = 0; k < init.task_layer_price.weight.size(); ++k)
        CHECK(a.model.params.task_layer_price.weight[k] == init.task_layer_price.weight[k]);
}

TEST_CASE("evaluate is consistent with an independent recomputation") {
    SyntheticSpec spec = SyntheticSpec::default_eu8(29);
    SyntheticOutput out = grid::generate_synthetic(spec, 160);
    grid::SplitSpec split = grid::SplitSpec::from_fractions(0.7, 0.15, 0.15, 160);
    model::ModelConfig cfg = tiny_config(2);
    cfg.epochs = 5;
    train::TrainResult r = train::train(cfg, out.graph, out.panel, split);

    grid::SplitViews v = grid::chronological_split(out.panel, split);
    train::EvalMetrics m = train::evaluate(r.model, out.graph, out.panel, v.test);

    const auto hours = train::usable_hours(v.test, cfg.window);
    model::Predictions pred = train::predict_hours(r.model, out.graph, out.panel, hours);
    double se = 0.0;
    std::size_t count = 0;
    for (std::size_t b = 0; b < hours.size(); ++b) {
        for (int i = 0; i < 8; ++i) {
            const double nat = pred.price[b * 8 + i] * r.model.norms.price_std.at(i, 0) +
                               r.model.norms.price_mean.at(i, 0);
            const double d = nat - out.panel.series[i].price[hours[b]];
            se += d * d;
            ++count;
        }
    }
    CHECK(m.rmse_price == doctest::Approx(std::sqrt(se / count)).epsilon(1e-12));
}
