#include "cann/checkpoint.hpp"

#include "cann/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace cann {

using nlohmann::json;

void save_checkpoint(const std::string& path, const MlpParams& params,
                     const CheckpointMeta& meta) {
    json doc;
    doc["format"] = "cann-checkpoint";
    doc["version"] = 1;
    doc["sizes"] = params.sizes;
    doc["hidden_activation"] = "tanh";
    doc["output_activation"] = "identity";
    doc["seed"] = meta.seed;

    json layers = json::array();
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        const auto& w = params.weights[i];
        std::vector<double> flat;
        flat.reserve(static_cast<std::size_t>(w.size()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
        json layer;
        layer["rows"] = w.rows();
        layer["cols"] = w.cols();
        layer["weights"] = flat; // row-major
        layer["bias"] = std::vector<double>(params.biases[i].data(),
                                            params.biases[i].data() + params.biases[i].size());
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);

    json m;
    if (!meta.problem.empty()) m["problem"] = meta.problem;
    if (!meta.variant.empty()) m["variant"] = meta.variant;
    if (!meta.stencil.empty()) m["stencil"] = meta.stencil;
    if (!meta.lo.empty()) m["lo"] = meta.lo;
    if (!meta.hi.empty()) m["hi"] = meta.hi;
    if (!meta.counts.empty()) m["counts"] = meta.counts;
    if (meta.dt > 0.0) m["dt"] = meta.dt;
    if (meta.final_time > 0.0) m["final_time"] = meta.final_time;
    if (!meta.target_mode.empty()) m["target_mode"] = meta.target_mode;
    if (std::isfinite(meta.final_loss)) m["final_loss"] = meta.final_loss;
    if (meta.iterations > 0) m["iterations"] = meta.iterations;
    doc["training"] = std::move(m);

    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open checkpoint file for writing: " + path);
    os << doc.dump(2) << "\n";
}

std::pair<MlpParams, CheckpointMeta> load_checkpoint(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open checkpoint file: " + path);
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("malformed checkpoint " + path + ": " + e.what());
    }
    if (doc.value("format", "") != "cann-checkpoint")
        throw ConfigError(path + " is not a cann checkpoint");

    std::vector<int> sizes = doc.at("sizes").get<std::vector<int>>();
    validate_sizes(sizes);
    MlpParams params = zero_params(sizes);

    const json& layers = doc.at("layers");
    if (layers.size() != sizes.size() - 1)
        throw ConfigError("checkpoint shape mismatch: expected " +
                          std::to_string(sizes.size() - 1) + " layers, found " +
                          std::to_string(layers.size()));
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const json& layer = layers[i];
        const Eigen::Index rows = layer.at("rows").get<Eigen::Index>();
        const Eigen::Index cols = layer.at("cols").get<Eigen::Index>();
        if (rows != sizes[i + 1] || cols != sizes[i])
            throw ConfigError("checkpoint shape mismatch in layer " + std::to_string(i));
        const auto flat = layer.at("weights").get<std::vector<double>>();
        const auto bias = layer.at("bias").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(flat.size()) != rows * cols ||
            static_cast<Eigen::Index>(bias.size()) != rows)
            throw ConfigError("checkpoint shape mismatch in layer " + std::to_string(i));
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                params.weights[i](r, c) = flat[static_cast<std::size_t>(r * cols + c)];
        for (Eigen::Index r = 0; r < rows; ++r) params.biases[i][r] = bias[static_cast<std::size_t>(r)];
    }

    CheckpointMeta meta;
    meta.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("training")) {
        const json& m = doc["training"];
        meta.problem = m.value("problem", "");
        meta.variant = m.value("variant", "");
        meta.stencil = m.value("stencil", "");
        meta.lo = m.value("lo", std::vector<double>{});
        meta.hi = m.value("hi", std::vector<double>{});
        meta.counts = m.value("counts", std::vector<int>{});
        meta.dt = m.value("dt", 0.0);
        meta.final_time = m.value("final_time", 0.0);
        meta.target_mode = m.value("target_mode", "");
        meta.final_loss = m.value("final_loss", std::numeric_limits<double>::quiet_NaN());
        meta.iterations = m.value("iterations", 0L);
    }
    return {std::move(params), std::move(meta)};
}

} // namespace cann
