#pragma once

#include "cann/network.hpp"
#include "cann/stencil.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace cann {

struct TrainConfig {
    long max_iters = 100000;   // K, total parameter updates
    double tolerance = 1e-6;   // stop once loss <= tolerance

    /// Adam: full-batch adaptive-moment descent. Sgd: plain per-sample
    /// descent, cycling samples in ascending cell order.
    enum class Optimizer { Adam, Sgd };
    Optimizer optimizer = Optimizer::Adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_guard = 1e-8;

    std::uint64_t seed = 0;
    double split_fraction = 1.0; // 1.0 trains on the full set
    long log_every = 100;
    bool freeze_hidden = false; // update only the output layer

    /// Biases start at zero; leaving them frozen keeps the network an odd
    /// function of its input (N(0) = 0 exactly), which stops constant drift
    /// from accumulating when marched solutions decay far below the training
    /// amplitude. Enable only for experiments that need affine offsets.
    bool train_biases = false;
};

struct LossHistory {
    std::vector<long> iterations;
    std::vector<double> losses;
};

struct TrainResult {
    MlpParams params; // parameters achieving the lowest recorded loss
    LossHistory history;
    double best_loss = 0.0;
    long iterations = 0; // updates performed
    int restarts = 0;
};

/// Eq.-style squared loss: sum_m (predict(V_m) - target_m)^2 * dS,
/// accumulated in ascending cell order.
double loss(const MlpParams& params, const LearningSet& set, double cell_measure);

/// Exact gradient of loss; accumulates backward(..., 2*(pred-target)*dS)
/// in ascending cell order.
Gradients loss_gradient(const MlpParams& params, const LearningSet& set,
                        double cell_measure);

/// Minimize the loss for up to max_iters updates or until loss <= tolerance.
/// If the loss goes non-finite or exceeds 1e6x its initial value, the step
/// size is halved and optimization restarts from the best checkpoint, at most
/// 3 times, after which DivergenceError is thrown.
TrainResult train(const LearningSet& set, const TrainConfig& config, const MlpParams& init);

/// Reproducible disjoint split with round(fraction * N) training entries.
std::pair<LearningSet, LearningSet> split_set(const LearningSet& set, double fraction,
                                              std::uint64_t seed);

} // namespace cann
