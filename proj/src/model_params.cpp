#include "cbamgrid/model/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cbamgrid/errors.hpp"
#include "cbamgrid/rng.hpp"

namespace cbamgrid::model {

void ModelConfig::validate() const {
    require(layers >= 1, ErrorKind::Config, "layers must be >= 1");
    require(hidden_dim >= 1 && head_dim >= 1, ErrorKind::Config, "widths must be >= 1");
    require(window >= 1, ErrorKind::Config, "window must be >= 1");
    require(lambda_ci >= 0.0 && lambda_price >= 0.0 && lambda_corr >= 0.0, ErrorKind::Config,
            "loss weights must be non-negative");
    require(learning_rate > 0.0, ErrorKind::Config, "learning rate must be positive");
    require(batch_size >= 1, ErrorKind::Config, "batch size must be >= 1");
    require(epochs >= 1, ErrorKind::Config, "epochs must be >= 1");
    require(patience >= 1, ErrorKind::Config, "patience must be >= 1");
}

ModelConfig ModelConfig::from_config(const KvConfig& cfg) {
    ModelConfig c;
    c.layers = static_cast<int>(cfg.get_int("layers"));
    c.hidden_dim = static_cast<int>(cfg.get_int("hidden_dim"));
    c.head_dim = static_cast<int>(cfg.get_int("head_dim"));
    c.window = static_cast<int>(cfg.get_int("window"));
    c.lambda_ci = cfg.get_double("lambda_ci");
    c.lambda_price = cfg.get_double("lambda_price");
    c.lambda_corr = cfg.get_double("lambda_corr");
    c.learning_rate = cfg.get_double("learning_rate");
    c.batch_size = static_cast<int>(cfg.get_int("batch_size"));
    c.epochs = static_cast<int>(cfg.get_int("epochs"));
    c.patience = static_cast<int>(cfg.get_int("patience"));
    c.seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
    c.validate();
    return c;
}

std::string ModelConfig::to_json() const {
    nlohmann::json j;
    j["layers"] = layers;
    j["hidden_dim"] = hidden_dim;
    j["head_dim"] = head_dim;
    j["window"] = window;
    j["lambda_ci"] = lambda_ci;
    j["lambda_price"] = lambda_price;
    j["lambda_corr"] = lambda_corr;
    j["learning_rate"] = learning_rate;
    j["batch_size"] = batch_size;
    j["epochs"] = epochs;
    j["patience"] = patience;
    j["seed"] = seed;
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ModelConfig c;
    c.layers = j.at("layers").get<int>();
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.head_dim = j.at("head_dim").get<int>();
    c.window = j.at("window").get<int>();
    c.lambda_ci = j.at("lambda_ci").get<double>();
    c.lambda_price = j.at("lambda_price").get<double>();
    c.lambda_corr = j.at("lambda_corr").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.patience = j.at("patience").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<std::string, ad::Tensor*>> ModelParams::blocks() {
    std::vector<std::pair<std::string, ad::Tensor*>> out;
    for (std::size_t l = 0; l < shared_layers.size(); ++l) {
        out.emplace_back("enc.shared." + std::to_string(l) + ".W", &shared_layers[l].weight);
        out.emplace_back("enc.shared." + std::to_string(l) + ".a", &shared_layers[l].attn);
    }
    out.emplace_back("enc.ci.W", &task_layer_ci.weight);
    out.emplace_back("enc.ci.a", &task_layer_ci.attn);
    out.emplace_back("enc.price.W", &task_layer_price.weight);
    out.emplace_back("enc.price.a", &task_layer_price.attn);
    out.emplace_back("head.ci.W1", &head_ci.w1);
    out.emplace_back("head.ci.b1", &head_ci.b1);
    out.emplace_back("head.ci.W2", &head_ci.w2);
    out.emplace_back("head.ci.b2", &head_ci.b2);
    out.emplace_back("head.price.W1", &head_price.w1);
    out.emplace_back("head.price.b1", &head_price.b1);
    out.emplace_back("head.price.W2", &head_price.w2);
    out.emplace_back("head.price.b2", &head_price.b2);
    return out;
}

std::vector<std::pair<std::string, const ad::Tensor*>> ModelParams::blocks() const {
    auto mutable_blocks = const_cast<ModelParams*>(this)->blocks();
    std::vector<std::pair<std::string, const ad::Tensor*>> out;
    out.reserve(mutable_blocks.size());
    for (auto& [name, t] : mutable_blocks) out.emplace_back(name, t);
    return out;
}

bool ModelParams::all_finite() const {
    for (const auto& [name, t] : blocks())
        if (!t->all_finite()) return false;
    return true;
}

namespace {

ad::Tensor uniform_init(Rng& rng, int rows, int cols, int fan_in, int fan_out) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    ad::Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform(-bound, bound);
    return t;
}

AttentionParams init_attention(Rng& rng, int d_in, int d) {
    AttentionParams p;
    p.weight = uniform_init(rng, d_in, d, d_in, d);
    p.attn = uniform_init(rng, 2 * d, 1, 2 * d, 1);
    return p;
}

HeadParams init_head(Rng& rng, int d, int h) {
    HeadParams p;
    p.w1 = uniform_init(rng, d, h, d, h);
    p.b1 = ad::Tensor(1, h);
    p.w2 = uniform_init(rng, h, 1, h, 1);
    p.b2 = ad::Tensor(1, 1);
    return p;
}

}  // namespace

ModelParams init_params(const ModelConfig& config, int feature_dim) {
    config.validate();
    require(feature_dim >= 1, ErrorKind::Config, "feature dimension must be positive");
    Rng rng(config.seed);
    ModelParams p;
    int d_in = feature_dim;
    for (int l = 0; l + 1 < config.layers; ++l) {
        p.shared_layers.push_back(init_attention(rng, d_in, config.hidden_dim));
        d_in = config.hidden_dim;
    }
    p.task_layer_ci = init_attention(rng, d_in, config.hidden_dim);
    p.task_layer_price = init_attention(rng, d_in, config.hidden_dim);
    p.head_ci = init_head(rng, config.hidden_dim, config.head_dim);
    p.head_price = init_head(rng, config.hidden_dim, config.head_dim);
    return p;
}

// ------------------------------------------------------------- checkpoint

namespace {

constexpr char kMagic[8] = {'C', 'G', 'C', 'K', 'P', 'T', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in) {
    const std::uint32_t n = read_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}

void write_tensor(std::ostream& out, const std::string& name, const ad::Tensor& t) {
    write_string(out, name);
    write_u32(out, static_cast<std::uint32_t>(t.rows()));
    write_u32(out, static_cast<std::uint32_t>(t.cols()));
    out.write(reinterpret_cast<const char*>(t.raw().data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
}

std::pair<std::string, ad::Tensor> read_tensor(std::istream& in) {
    std::string name = read_string(in);
    const int rows = static_cast<int>(read_u32(in));
    const int cols = static_cast<int>(read_u32(in));
    ad::Tensor t(rows, cols);
    in.read(reinterpret_cast<char*>(t.raw().data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
    return {std::move(name), std::move(t)};
}

std::vector<std::pair<std::string, const ad::Tensor*>> norm_blocks(const grid::NormStats& n) {
    return {
        {"norm.base.mean", &n.base_mean},     {"norm.base.std", &n.base_std},
        {"norm.price.mean", &n.price_mean},   {"norm.price.std", &n.price_std},
        {"norm.ci.mean", &n.ci_mean},         {"norm.ci.std", &n.ci_std},
        {"norm.policy.mean", &n.policy_mean}, {"norm.policy.std", &n.policy_std},
    };
}

}  // namespace

void save_checkpoint(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::Io, "cannot write checkpoint '" + path + "'");
    out.write(kMagic, sizeof(kMagic));

    nlohmann::json meta;
    meta["config"] = nlohmann::json::parse(model.config.to_json());
    meta["nodes"] = model.nodes;
    meta["policy_threshold"] = model.norms.policy_threshold;
    meta["policy_ets"] = model.norms.policy_ets;
    write_string(out, meta.dump());

    auto params = model.params.blocks();
    auto norms = norm_blocks(model.norms);
    write_u32(out, static_cast<std::uint32_t>(params.size() + norms.size()));
    for (const auto& [name, t] : params) write_tensor(out, name, *t);
    for (const auto& [name, t] : norms) write_tensor(out, name, *t);
    if (!out) raise(ErrorKind::Io, "checkpoint write failed for '" + path + "'");
}

TrainedModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorKind::Io, "cannot open checkpoint '" + path + "'");
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        raise(ErrorKind::Schema, "'" + path + "' is not a checkpoint (bad magic)");

    nlohmann::json meta = nlohmann::json::parse(read_string(in));
    TrainedModel model;
    model.config = ModelConfig::from_json(meta.at("config").dump());
    model.nodes = meta.at("nodes").get<std::vector<std::string>>();
    model.norms.policy_threshold = meta.at("policy_threshold").get<double>();
    model.norms.policy_ets = meta.at("policy_ets").get<double>();

    // Shapes come from the blocks themselves; initialize layout from config.
    const std::uint32_t count = read_u32(in);
    std::vector<std::pair<std::string, ad::Tensor>> loaded;
    loaded.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) loaded.push_back(read_tensor(in));
    if (!in) raise(ErrorKind::Schema, "truncated checkpoint '" + path + "'");

    model.params.shared_layers.resize(model.config.layers - 1);
    auto assign = [&](const std::string& name, ad::Tensor* dst) {
        for (auto& [n, t] : loaded) {
            if (n == name) {
                *dst = t;
                return;
            }
        }
        raise(ErrorKind::Schema, "checkpoint '" + path + "' missing block '" + name + "'");
    };
    for (auto& [name, t] : model.params.blocks()) assign(name, t);
    grid::NormStats& ns = model.norms;
    for (auto& [name, t] : std::vector<std::pair<std::string, ad::Tensor*>>{
             {"norm.base.mean", &ns.base_mean},     {"norm.base.std", &ns.base_std},
             {"norm.price.mean", &ns.price_mean},   {"norm.price.std", &ns.price_std},
             {"norm.ci.mean", &ns.ci_mean},         {"norm.ci.std", &ns.ci_std},
             {"norm.policy.mean", &ns.policy_mean}, {"norm.policy.std", &ns.policy_std}})
        assign(name, t);
    return model;
}

}  // namespace cbamgrid::model
