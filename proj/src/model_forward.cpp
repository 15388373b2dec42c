#include "cbamgrid/model/forward.hpp"

#include "cbamgrid/errors.hpp"

namespace cbamgrid::model {

using ad::Tape;
using ad::Tensor;
using ad::Var;

std::vector<Var> ParamVars::all() const {
    std::vector<Var> out;
    for (const auto& [w, a] : shared) {
        out.push_back(w);
        out.push_back(a);
    }
    out.push_back(task_ci.first);
    out.push_back(task_ci.second);
    out.push_back(task_price.first);
    out.push_back(task_price.second);
    for (Var v : {head_ci_w1, head_ci_b1, head_ci_w2, head_ci_b2, head_price_w1, head_price_b1,
                  head_price_w2, head_price_b2})
        out.push_back(v);
    return out;
}

ParamVars stage_params(Tape& tape, const ModelParams& params) {
    ParamVars pv;
    for (const auto& layer : params.shared_layers)
        pv.shared.emplace_back(tape.leaf(layer.weight), tape.leaf(layer.attn));
    pv.task_ci = {tape.leaf(params.task_layer_ci.weight), tape.leaf(params.task_layer_ci.attn)};
    pv.task_price = {tape.leaf(params.task_layer_price.weight), tape.leaf(params.task_layer_price.attn)};
    pv.head_ci_w1 = tape.leaf(params.head_ci.w1);
    pv.head_ci_b1 = tape.leaf(params.head_ci.b1);
    pv.head_ci_w2 = tape.leaf(params.head_ci.w2);
    pv.head_ci_b2 = tape.leaf(params.head_ci.b2);
    pv.head_price_w1 = tape.leaf(params.head_price.w1);
    pv.head_price_b1 = tape.leaf(params.head_price.b1);
    pv.head_price_w2 = tape.leaf(params.head_price.w2);
    pv.head_price_b2 = tape.leaf(params.head_price.b2);
    return pv;
}

AttentionOut attention_layer(Tape& tape, Var embeddings, Var weight, Var attn_vec,
                             const Tensor& adjacency) {
    const int n = adjacency.rows();
    const Tensor& h = embeddings.value();
    if (h.rows() % n != 0)
        raise(ErrorKind::Shape, "attention_layer: " + std::to_string(h.rows()) +
                                    " embedding rows do not stack over " + std::to_string(n) + " nodes");
    const int d = weight.value().cols();
    if (attn_vec.value().rows() != 2 * d || attn_vec.value().cols() != 1)
        raise(ErrorKind::Shape, "attention_layer: score vector must be " + std::to_string(2 * d) + "x1, got " +
                                    attn_vec.value().shape_str());

    Var hw = tape.matmul(embeddings, weight);                       // (B*N) x d
    Var a_self = tape.rows(attn_vec, 0, d);                         // d x 1
    Var a_neigh = tape.rows(attn_vec, d, 2 * d);                    // d x 1
    Var f = tape.matmul(hw, a_self);                                // (B*N) x 1
    Var g = tape.matmul(hw, a_neigh);                               // (B*N) x 1
    Var scores = tape.pairwise_scores(f, g, n);                     // (B*N) x N
    Var activated = tape.leaky_relu(scores, kLeakyReluSlope);
    Var alpha = tape.neighborhood_softmax(activated, adjacency);    // (B*N) x N
    Var agg = tape.block_aggregate(alpha, hw, n);                   // (B*N) x d
    return AttentionOut{tape.elu(agg), alpha};
}

namespace {

Var run_head(Tape& tape, Var z, Var w1, Var b1, Var w2, Var b2) {
    Var hidden = tape.elu(tape.add_rowvec(tape.matmul(z, w1), b1));
    return tape.add_rowvec(tape.matmul(hidden, w2), b2);
}

}  // namespace

ForwardActivations forward(Tape& tape, const ParamVars& params, Var features,
                           const Tensor& adjacency) {
    ForwardActivations act;
    Var h = features;
    for (const auto& [w, a] : params.shared) {
        AttentionOut out = attention_layer(tape, h, w, a, adjacency);
        h = out.embeddings;
        act.attention_ci.push_back(out.attention);
        act.attention_price.push_back(out.attention);
    }
    AttentionOut ci_branch = attention_layer(tape, h, params.task_ci.first, params.task_ci.second, adjacency);
    AttentionOut price_branch =
        attention_layer(tape, h, params.task_price.first, params.task_price.second, adjacency);
    act.attention_ci.push_back(ci_branch.attention);
    act.attention_price.push_back(price_branch.attention);
    act.z_ci = ci_branch.embeddings;
    act.z_price = price_branch.embeddings;
    act.pred_ci = run_head(tape, act.z_ci, params.head_ci_w1, params.head_ci_b1, params.head_ci_w2,
                           params.head_ci_b2);
    act.pred_price = run_head(tape, act.z_price, params.head_price_w1, params.head_price_b1,
                              params.head_price_w2, params.head_price_b2);
    return act;
}

Predictions predict(const ModelParams& params, const Tensor& features, const Tensor& adjacency) {
    Tape tape;
    ParamVars pv = stage_params(tape, params);
    Var x = tape.leaf(features);
    ForwardActivations act = forward(tape, pv, x, adjacency);
    return Predictions{act.pred_ci.value(), act.pred_price.value()};
}

}  // namespace cbamgrid::model
