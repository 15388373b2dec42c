#pragma once

#include <functional>
#include <vector>

#include "cbamgrid/ad/tensor.hpp"

namespace cbamgrid::ad {

class Tape;

// Handle to a node on a tape. Cheap to copy; valid for the tape's lifetime.
struct Var {
    Tape* tape = nullptr;
    int id = -1;

    const Tensor& value() const;
    const Tensor& grad() const;
    bool valid() const { return tape != nullptr && id >= 0; }
};

// Reverse-mode tape. Records each primitive in execution order together with
// its backward rule; backward() replays the records once, in reverse, which
// is reverse topological order because inputs always precede outputs.
//
// All forward arithmetic is plain 64-bit with fixed accumulation order, so
// identical inputs give bit-identical outputs.
class Tape {
public:
    Var leaf(Tensor value);

    const Tensor& value(int id) const { return nodes_[id].value; }
    const Tensor& grad(int id) const { return nodes_[id].grad; }
    std::size_t node_count() const { return nodes_.size(); }

    // ---- primitives ------------------------------------------------------
    Var matmul(Var a, Var b);
    Var add(Var a, Var b);
    Var sub(Var a, Var b);
    Var mul(Var a, Var b);  // elementwise
    Var scale(Var a, double c);
    Var add_const(Var a, double c);
    Var add_rowvec(Var a, Var row);       // a: m x n, row: 1 x n broadcast over rows
    Var concat_rows(Var a, Var b);        // vertical stack, equal column counts
    Var rows(Var a, int begin, int end);  // row slice [begin, end)
    Var leaky_relu(Var a, double slope);
    Var elu(Var a);
    Var exp(Var a);
    Var abs(Var a);
    Var sum(Var a);   // -> 1x1
    Var mean(Var a);  // -> 1x1

    // Block-graph attention support. A tensor of B stacked node sets (B*N
    // rows) shares one N x N neighborhood mask.
    //
    // pairwise_scores: out[(b,i), j] = f[(b,i)] + g[(b,j)]  (f, g: B*N x 1)
    Var pairwise_scores(Var f, Var g, int nodes_per_block);
    // Row-wise softmax restricted to mask(i, :) where i = row % N. Rows are
    // shifted by their masked max before exponentiation, zero outside the
    // mask, and sum to 1 inside it. Every mask row must have an entry.
    Var neighborhood_softmax(Var scores, const Tensor& mask);
    // out[(b,i), :] = sum_j attn[(b,i), j] * values[(b,j), :]
    Var block_aggregate(Var attn, Var values, int nodes_per_block);

    // Pearson correlation of two equal-length column vectors (length >= 2),
    // as a differentiable scalar. If either input's population variance is
    // below 1e-12 the result is a constant 0 with no gradient flow.
    Var pearson(Var a, Var b);

    // Mean squared error between two equal-shape tensors, as a scalar.
    Var mse(Var pred, Var target);

    // Seeds d(loss)/d(loss) = 1 and accumulates gradients into every node.
    // Gradients of nodes the loss does not depend on remain exactly 0.
    void backward(Var loss);

    static constexpr double kVarianceGuard = 1e-12;

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::function<void(Tape&)> back;  // empty for leaves/constants
    };

    int push(Tensor value, std::function<void(Tape&)> back);
    Tensor& grad_mut(int id) { return nodes_[id].grad; }

    std::vector<Node> nodes_;
};

inline const Tensor& Var::value() const { return tape->value(id); }
inline const Tensor& Var::grad() const { return tape->grad(id); }

}  // namespace cbamgrid::ad
