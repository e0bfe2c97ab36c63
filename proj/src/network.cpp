#include "cann/network.hpp"

#include "cann/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace cann {

namespace {

// Deterministic uniform in [0,1) from the raw engine output; avoids
// std::uniform_real_distribution so streams are identical everywhere.
double next_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace

void validate_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 3)
        throw ConfigError("network needs at least 3 layers (input, hidden, output)");
    for (int n : sizes)
        if (n < 1) throw ConfigError("layer sizes must be positive");
    if (sizes.back() != 1)
        throw ConfigError("output layer must have exactly one neuron, got " +
                          std::to_string(sizes.back()));
}

std::size_t MlpParams::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
        n += static_cast<std::size_t>(sizes[i + 1]) * static_cast<std::size_t>(sizes[i]) +
             static_cast<std::size_t>(sizes[i + 1]);
    return n;
}

MlpParams init_params(const std::vector<int>& sizes, std::uint64_t seed) {
    validate_sizes(sizes);
    MlpParams p;
    p.sizes = sizes;
    std::mt19937_64 eng(seed);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const int rows = sizes[i + 1], cols = sizes[i];
        const double limit = std::sqrt(6.0 / (sizes[i] + sizes[i + 1]));
        Eigen::MatrixXd w(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                w(r, c) = limit * (2.0 * next_unit(eng) - 1.0);
        p.weights.push_back(std::move(w));
        p.biases.push_back(Eigen::VectorXd::Zero(rows));
    }
    return p;
}

MlpParams zero_params(const std::vector<int>& sizes) {
    validate_sizes(sizes);
    MlpParams p;
    p.sizes = sizes;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        p.weights.push_back(Eigen::MatrixXd::Zero(sizes[i + 1], sizes[i]));
        p.biases.push_back(Eigen::VectorXd::Zero(sizes[i + 1]));
    }
    return p;
}

Gradients zero_gradients(const MlpParams& params) {
    Gradients g;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        g.weights.push_back(Eigen::MatrixXd::Zero(params.weights[i].rows(),
                                                  params.weights[i].cols()));
        g.biases.push_back(Eigen::VectorXd::Zero(params.biases[i].size()));
    }
    return g;
}

double forward(const MlpParams& params, Eigen::Ref<const Eigen::VectorXd> v) {
    if (v.size() != params.sizes.front())
        throw ConfigError("forward: input length " + std::to_string(v.size()) +
                          " does not match first layer width " +
                          std::to_string(params.sizes.front()));
    Eigen::VectorXd a = v;
    const std::size_t last = params.weights.size() - 1;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        Eigen::VectorXd z = params.weights[i] * a + params.biases[i];
        a = (i < last) ? z.array().tanh().matrix() : z;
    }
    return a[0];
}

double predict_cell(const MlpParams& params, Eigen::Ref<const Eigen::VectorXd> v,
                    double center) {
    return center + forward(params, v);
}

Gradients backward(const MlpParams& params, Eigen::Ref<const Eigen::VectorXd> v,
                   double upstream) {
    const std::size_t nlayers = params.weights.size();
    std::vector<Eigen::VectorXd> acts(nlayers + 1);
    acts[0] = v;
    for (std::size_t i = 0; i < nlayers; ++i) {
        Eigen::VectorXd z = params.weights[i] * acts[i] + params.biases[i];
        acts[i + 1] = (i + 1 < nlayers) ? z.array().tanh().matrix() : z;
    }

    Gradients g = zero_gradients(params);
    Eigen::VectorXd delta = Eigen::VectorXd::Constant(1, upstream);
    for (std::size_t i = nlayers; i-- > 0;) {
        g.weights[i] = delta * acts[i].transpose();
        g.biases[i] = delta;
        if (i > 0) {
            // tanh' = 1 - tanh^2, applied to the producing layer's output
            delta = (params.weights[i].transpose() * delta).cwiseProduct(
                (1.0 - acts[i].array().square()).matrix());
        }
    }
    return g;
}

void forward_batch_cached(const MlpParams& params, const Eigen::MatrixXd& inputs,
                          ForwardCache& cache) {
    if (inputs.rows() != params.sizes.front())
        throw ConfigError("forward_batch: input width mismatch");
    const std::size_t nlayers = params.weights.size();
    cache.hidden.resize(nlayers);
    const Eigen::MatrixXd* prev = &inputs;
    for (std::size_t i = 0; i < nlayers; ++i) {
        Eigen::MatrixXd& a = cache.hidden[i];
        a.noalias() = params.weights[i] * (*prev);
        a.colwise() += params.biases[i];
        if (i + 1 < nlayers) a = a.array().tanh();
        prev = &a;
    }
}

Eigen::VectorXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs) {
    ForwardCache cache;
    forward_batch_cached(params, inputs, cache);
    return cache.hidden.back().row(0).transpose();
}

Eigen::VectorXd predict_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              const Eigen::VectorXd& centers) {
    return centers + forward_batch(params, inputs);
}

void backward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                    const ForwardCache& cache, const Eigen::RowVectorXd& upstream,
                    Gradients& out) {
    const std::size_t nlayers = params.weights.size();
    Eigen::MatrixXd delta = upstream; // 1 x N at the output layer
    for (std::size_t i = nlayers; i-- > 0;) {
        const Eigen::MatrixXd& below = (i == 0) ? inputs : cache.hidden[i - 1];
        out.weights[i].noalias() = delta * below.transpose();
        out.biases[i] = delta.rowwise().sum();
        if (i > 0)
            delta = (params.weights[i].transpose() * delta).array() *
                    (1.0 - cache.hidden[i - 1].array().square());
    }
}

Eigen::VectorXd flatten_params(const MlpParams& params) {
    Eigen::VectorXd flat(params.parameter_count());
    Eigen::Index pos = 0;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        const auto& w = params.weights[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat[pos++] = w(r, c);
        for (Eigen::Index r = 0; r < params.biases[i].size(); ++r)
            flat[pos++] = params.biases[i][r];
    }
    return flat;
}

Eigen::VectorXd flatten_grads(const Gradients& grads) {
    Eigen::Index n = 0;
    for (std::size_t i = 0; i < grads.weights.size(); ++i)
        n += grads.weights[i].size() + grads.biases[i].size();
    Eigen::VectorXd flat(n);
    Eigen::Index pos = 0;
    for (std::size_t i = 0; i < grads.weights.size(); ++i) {
        const auto& w = grads.weights[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) flat[pos++] = w(r, c);
        for (Eigen::Index r = 0; r < grads.biases[i].size(); ++r)
            flat[pos++] = grads.biases[i][r];
    }
    return flat;
}

void set_from_flat(MlpParams& params, Eigen::Ref<const Eigen::VectorXd> flat) {
    if (static_cast<std::size_t>(flat.size()) != params.parameter_count())
        throw ConfigError("set_from_flat: length mismatch");
    Eigen::Index pos = 0;
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        auto& w = params.weights[i];
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = flat[pos++];
        for (Eigen::Index r = 0; r < params.biases[i].size(); ++r)
            params.biases[i][r] = flat[pos++];
    }
}

} // namespace cann
