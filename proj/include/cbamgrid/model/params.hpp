#pragma once

#include <string>
#include <vector>

#include "cbamgrid/ad/tensor.hpp"
#include "cbamgrid/grid/features.hpp"
#include "cbamgrid/model/config.hpp"

namespace cbamgrid::model {

enum class Task { CI, Price };

// One attention layer's parameters: projection W (d_in x d) and the score
// vector a (2d x 1), split internally into self/neighbor halves.
struct AttentionParams {
    ad::Tensor weight;  // d_in x d
    ad::Tensor attn;    // 2d x 1
};

struct HeadParams {
    ad::Tensor w1;  // d x h
    ad::Tensor b1;  // 1 x h
    ad::Tensor w2;  // h x 1
    ad::Tensor b2;  // 1 x 1
};

// All trainable weights. shared_layers has L-1 entries (empty for L = 1);
// the final encoder layer and the heads exist per task.
struct ModelParams {
    std::vector<AttentionParams> shared_layers;
    AttentionParams task_layer_ci;
    AttentionParams task_layer_price;
    HeadParams head_ci;
    HeadParams head_price;

    // Named views over every parameter tensor, in a fixed order. The names
    // are the checkpoint block names.
    std::vector<std::pair<std::string, ad::Tensor*>> blocks();
    std::vector<std::pair<std::string, const ad::Tensor*>> blocks() const;

    bool all_finite() const;
};

// Uniform fan-balanced initialization in +-sqrt(6/(fan_in+fan_out)); biases
// zero. Deterministic for a given config seed.
ModelParams init_params(const ModelConfig& config, int feature_dim);

// The checkpoint bundles everything needed to run the model standalone.
struct TrainedModel {
    ModelConfig config;
    std::vector<std::string> nodes;
    grid::NormStats norms;
    ModelParams params;
};

// Self-describing binary checkpoint; round-trips are bit-exact.
void save_checkpoint(const TrainedModel& model, const std::string& path);
TrainedModel load_checkpoint(const std::string& path);

}  // namespace cbamgrid::model
