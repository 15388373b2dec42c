#pragma once

#include <cstdint>

#include "cbamgrid/kvconfig.hpp"

namespace cbamgrid::model {

// Architecture and training hyperparameters. Layers 1..L-1 share one set of
// attention parameters; the final layer branches per task.
struct ModelConfig {
    int layers = 2;        // L >= 1
    int hidden_dim = 64;   // d
    int head_dim = 32;     // h
    int window = 24;       // lag hours of price/ci in the features
    double lambda_ci = 1.0;
    double lambda_price = 1.0;
    double lambda_corr = 0.1;
    double learning_rate = 1e-3;
    int batch_size = 64;   // hours per mini-batch
    int epochs = 500;
    int patience = 20;     // early-stopping epochs without improvement
    std::uint64_t seed = 1;

    void validate() const;

    static ModelConfig from_config(const KvConfig& cfg);
    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);
};

inline constexpr double kLeakyReluSlope = 0.01;

}  // namespace cbamgrid::model
