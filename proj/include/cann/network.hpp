#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace cann {

/// Feedforward tanh network with identity output, M >= 3 layers, scalar output.
/// weights[i] maps layer i to layer i+1 (shape sizes[i+1] x sizes[i]).
struct MlpParams {
    std::vector<int> sizes; // n_1..n_M, n_M == 1
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;

    int layer_count() const { return static_cast<int>(sizes.size()); }
    std::size_t parameter_count() const;
};

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

void validate_sizes(const std::vector<int>& sizes);

/// Glorot-uniform weights, zero biases; bit-reproducible from the seed.
MlpParams init_params(const std::vector<int>& sizes, std::uint64_t seed);
MlpParams zero_params(const std::vector<int>& sizes);
Gradients zero_gradients(const MlpParams& params);

double forward(const MlpParams& params, Eigen::Ref<const Eigen::VectorXd> v);

/// Residual update: v_out = center + N(v).
double predict_cell(const MlpParams& params, Eigen::Ref<const Eigen::VectorXd> v, double center);

/// Exact gradients of upstream * forward(params, v) w.r.t. every weight and bias.
Gradients backward(const MlpParams& params, Eigen::Ref<const Eigen::VectorXd> v,
                   double upstream);

/// Batched evaluation, one sample per column.
Eigen::VectorXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs);
Eigen::VectorXd predict_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              const Eigen::VectorXd& centers);

/// Activations kept for the batched backward pass. hidden[i] is layer i+1's
/// output (tanh for hidden layers, identity for the last).
struct ForwardCache {
    std::vector<Eigen::MatrixXd> hidden;
};

void forward_batch_cached(const MlpParams& params, const Eigen::MatrixXd& inputs,
                          ForwardCache& cache);

/// Gradients of sum_m upstream[m] * forward(params, inputs.col(m)); overwrites out.
void backward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                    const ForwardCache& cache, const Eigen::RowVectorXd& upstream,
                    Gradients& out);

/// Flat layout: per layer, W row-major then b. Shared by gradcheck and tests.
Eigen::VectorXd flatten_params(const MlpParams& params);
Eigen::VectorXd flatten_grads(const Gradients& grads);
void set_from_flat(MlpParams& params, Eigen::Ref<const Eigen::VectorXd> flat);

} // namespace cann
