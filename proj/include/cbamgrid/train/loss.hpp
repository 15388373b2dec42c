#pragma once

#include "cbamgrid/ad/tape.hpp"

namespace cbamgrid::train {

// Composite loss pieces, in normalized-target units. `total` satisfies
// total = l1*mse_ci + l2*mse_price + l3*corr_term; corr_term lies in [0, 2].
struct LossBreakdown {
    double mse_ci = 0.0;
    double mse_price = 0.0;
    double corr_term = 0.0;
    double total = 0.0;
    ad::Var total_var;  // differentiable scalar; invalid when built off-tape
};

// Differentiable composite loss over four equal-length column vectors
// (length >= 2). The correlation term is |rho(Y_ci, Y_price) -
// rho(pred_ci, pred_price)| with the variance-guarded Pearson; the target
// correlation enters as a constant. Terms with zero weight contribute no
// gradient. Vectors with fewer than 2 entries skip the correlation term.
LossBreakdown dual_loss(ad::Tape& tape, ad::Var pred_ci, ad::Var pred_price, ad::Var true_ci,
                        ad::Var true_price, double lambda_ci, double lambda_price,
                        double lambda_corr);

// Same decomposition on plain vectors (evaluation paths that need no
// gradient).
LossBreakdown loss_parts(const std::vector<double>& pred_ci, const std::vector<double>& pred_price,
                         const std::vector<double>& true_ci, const std::vector<double>& true_price,
                         double lambda_ci, double lambda_price, double lambda_corr);

}  // namespace cbamgrid::train
