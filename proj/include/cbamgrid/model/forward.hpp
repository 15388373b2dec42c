#pragma once

#include <vector>

#include "cbamgrid/ad/tape.hpp"
#include "cbamgrid/model/params.hpp"

namespace cbamgrid::model {

// Tape-resident handles to one model's parameters for a single forward pass.
struct ParamVars {
    std::vector<std::pair<ad::Var, ad::Var>> shared;  // (W, a) per shared layer
    std::pair<ad::Var, ad::Var> task_ci;
    std::pair<ad::Var, ad::Var> task_price;
    ad::Var head_ci_w1, head_ci_b1, head_ci_w2, head_ci_b2;
    ad::Var head_price_w1, head_price_b1, head_price_w2, head_price_b2;

    std::vector<ad::Var> all() const;
};

// Loads every parameter tensor onto the tape as a leaf, in block order.
ParamVars stage_params(ad::Tape& tape, const ModelParams& params);

// One attention layer over a block-stacked embedding matrix (B*N rows). For
// each node i and neighbor j (self-loop included by the mask's diagonal):
//   e_ij = LeakyReLU(a^T [W h_i || W h_j])
//   alpha_ij = softmax over N(i)
//   h_i' = ELU(sum_j alpha_ij W h_j)
struct AttentionOut {
    ad::Var embeddings;  // (B*N) x d
    ad::Var attention;   // (B*N) x N, rows are probability vectors over N(i)
};
AttentionOut attention_layer(ad::Tape& tape, ad::Var embeddings, ad::Var weight, ad::Var attn_vec,
                             const ad::Tensor& adjacency);

// Full forward: shared layers 1..L-1, task-specific final layers producing
// Z_ci / Z_price, then the two-layer heads with scalar output per node.
struct ForwardActivations {
    ad::Var z_ci;        // (B*N) x d
    ad::Var z_price;     // (B*N) x d
    ad::Var pred_ci;     // (B*N) x 1, normalized target space
    ad::Var pred_price;  // (B*N) x 1
    std::vector<ad::Var> attention_ci;     // per layer feeding the CI branch
    std::vector<ad::Var> attention_price;  // per layer feeding the price branch
};

ForwardActivations forward(ad::Tape& tape, const ParamVars& params, ad::Var features,
                           const ad::Tensor& adjacency);

// Convenience: stages parameters, runs forward, returns plain predictions.
struct Predictions {
    ad::Tensor ci;     // (B*N) x 1
    ad::Tensor price;  // (B*N) x 1
};
Predictions predict(const ModelParams& params, const ad::Tensor& features,
                    const ad::Tensor& adjacency);

}  // namespace cbamgrid::model
