#include "cbamgrid/train/loss.hpp"

#include <cmath>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/stats.hpp"

namespace cbamgrid::train {

using ad::Tape;
using ad::Var;

LossBreakdown dual_loss(Tape& tape, Var pred_ci, Var pred_price, Var true_ci, Var true_price,
                        double lambda_ci, double lambda_price, double lambda_corr) {
    const int n = pred_ci.value().rows();
    for (const Var* v : {&pred_price, &true_ci, &true_price}) {
        if (v->value().rows() != n || v->value().cols() != 1 || pred_ci.value().cols() != 1)
            raise(ErrorKind::Contract, "dual_loss: expected four equal-length column vectors");
    }
    require(n >= 2, ErrorKind::Contract, "dual_loss: need at least 2 entries");

    LossBreakdown out;
    Var mse_ci = tape.mse(pred_ci, true_ci);
    Var mse_price = tape.mse(pred_price, true_price);
    out.mse_ci = mse_ci.value().scalar();
    out.mse_price = mse_price.value().scalar();

    Var total = tape.scale(mse_ci, lambda_ci);
    if (lambda_price != 0.0) total = tape.add(total, tape.scale(mse_price, lambda_price));

    const double target_rho = stats::pearson(true_ci.value().raw(), true_price.value().raw());
    Var corr = tape.abs(tape.add_const(tape.pearson(pred_ci, pred_price), -target_rho));
    out.corr_term = corr.value().scalar();
    if (lambda_corr != 0.0) total = tape.add(total, tape.scale(corr, lambda_corr));

    out.total = lambda_ci * out.mse_ci + lambda_price * out.mse_price + lambda_corr * out.corr_term;
    out.total_var = total;
    return out;
}

LossBreakdown loss_parts(const std::vector<double>& pred_ci, const std::vector<double>& pred_price,
                         const std::vector<double>& true_ci, const std::vector<double>& true_price,
                         double lambda_ci, double lambda_price, double lambda_corr) {
    const std::size_t n = pred_ci.size();
    require(pred_price.size() == n && true_ci.size() == n && true_price.size() == n,
            ErrorKind::Contract, "loss_parts: length mismatch");
    require(n >= 2, ErrorKind::Contract, "loss_parts: need at least 2 entries");
    LossBreakdown out;
    double sci = 0.0, spr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sci += (pred_ci[i] - true_ci[i]) * (pred_ci[i] - true_ci[i]);
        spr += (pred_price[i] - true_price[i]) * (pred_price[i] - true_price[i]);
    }
    out.mse_ci = sci / static_cast<double>(n);
    out.mse_price = spr / static_cast<double>(n);
    out.corr_term = std::fabs(stats::pearson(true_ci, true_price) - stats::pearson(pred_ci, pred_price));
    out.total = lambda_ci * out.mse_ci + lambda_price * out.mse_price + lambda_corr * out.corr_term;
    return out;
}

}  // namespace cbamgrid::train
