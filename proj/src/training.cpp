#include "cann/training.hpp"

#include "cann/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace cann {

namespace {

LearningSet take_subset(const LearningSet& set, const std::vector<Eigen::Index>& idx) {
    LearningSet out;
    out.inputs.resize(set.inputs.rows(), static_cast<Eigen::Index>(idx.size()));
    out.targets.resize(static_cast<Eigen::Index>(idx.size()));
    out.center_inputs.resize(static_cast<Eigen::Index>(idx.size()));
    out.cell_ids.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.inputs.col(static_cast<Eigen::Index>(i)) = set.inputs.col(idx[i]);
        out.targets[static_cast<Eigen::Index>(i)] = set.targets[idx[i]];
        out.center_inputs[static_cast<Eigen::Index>(i)] = set.center_inputs[idx[i]];
        out.cell_ids.push_back(set.cell_ids[static_cast<std::size_t>(idx[i])]);
    }
    out.pair_count = set.pair_count;
    out.cell_measure = set.cell_measure;
    return out;
}

struct AdamState {
    Gradients m;
    Gradients v;
    long t = 0;
};

void adam_step(MlpParams& params, const Gradients& g, AdamState& s, const TrainConfig& cfg,
               double lr, std::size_t first_layer) {
    s.t += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.t));
    const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.t));
    for (std::size_t i = first_layer; i < params.weights.size(); ++i) {
        s.m.weights[i] = cfg.beta1 * s.m.weights[i] + (1.0 - cfg.beta1) * g.weights[i];
        s.v.weights[i].array() = cfg.beta2 * s.v.weights[i].array() +
                                 (1.0 - cfg.beta2) * g.weights[i].array().square();
        params.weights[i].array() -=
            lr * (s.m.weights[i].array() / c1) /
            ((s.v.weights[i].array() / c2).sqrt() + cfg.epsilon_guard);

        if (!cfg.train_biases) continue;
        s.m.biases[i] = cfg.beta1 * s.m.biases[i] + (1.0 - cfg.beta1) * g.biases[i];
        s.v.biases[i].array() = cfg.beta2 * s.v.biases[i].array() +
                                (1.0 - cfg.beta2) * g.biases[i].array().square();
        params.biases[i].array() -=
            lr * (s.m.biases[i].array() / c1) /
            ((s.v.biases[i].array() / c2).sqrt() + cfg.epsilon_guard);
    }
}

void sgd_step(MlpParams& params, const Gradients& g, double lr, std::size_t first_layer,
              bool train_biases) {
    for (std::size_t i = first_layer; i < params.weights.size(); ++i) {
        params.weights[i] -= lr * g.weights[i];
        if (train_biases) params.biases[i] -= lr * g.biases[i];
    }
}

void validate_train_inputs(const LearningSet& set, const TrainConfig& cfg,
                           const MlpParams& init) {
    if (set.size() == 0) throw ConfigError("train: empty learning set");
    if (set.inputs.rows() != init.sizes.front())
        throw ConfigError("train: input width does not match the network's first layer");
    if (cfg.max_iters < 1) throw ConfigError("train: max_iters must be >= 1");
    if (!(cfg.tolerance > 0.0)) throw ConfigError("train: tolerance must be positive");
    if (!(set.cell_measure > 0.0))
        throw ConfigError("train: learning set carries no cell measure");
}

} // namespace

double loss(const MlpParams& params, const LearningSet& set, double cell_measure) {
    if (set.size() == 0) throw ConfigError("loss: empty learning set");
    double total = 0.0;
    for (Eigen::Index m = 0; m < set.size(); ++m) {
        const double pred = predict_cell(params, set.inputs.col(m), set.center_inputs[m]);
        const double diff = pred - set.targets[m];
        total += diff * diff * cell_measure;
    }
    return total;
}

Gradients loss_gradient(const MlpParams& params, const LearningSet& set,
                        double cell_measure) {
    Gradients acc = zero_gradients(params);
    for (Eigen::Index m = 0; m < set.size(); ++m) {
        const double pred = predict_cell(params, set.inputs.col(m), set.center_inputs[m]);
        const double upstream = 2.0 * (pred - set.targets[m]) * cell_measure;
        Gradients g = backward(params, set.inputs.col(m), upstream);
        for (std::size_t i = 0; i < acc.weights.size(); ++i) {
            acc.weights[i] += g.weights[i];
            acc.biases[i] += g.biases[i];
        }
    }
    return acc;
}

TrainResult train(const LearningSet& set, const TrainConfig& cfg, const MlpParams& init) {
    validate_train_inputs(set, cfg, init);
    const double dS = set.cell_measure;
    const Eigen::Index n = set.size();

    MlpParams params = init;
    const std::size_t nlayers = params.weights.size();
    const std::size_t first = cfg.freeze_hidden ? nlayers - 1 : 0;

    ForwardCache cache;
    Eigen::VectorXd resid(n);
    Gradients grads = zero_gradients(params);
    AdamState adam{zero_gradients(params), zero_gradients(params), 0};

    auto eval = [&](const MlpParams& p) {
        forward_batch_cached(p, set.inputs, cache);
        resid = cache.hidden.back().row(0).transpose() + set.center_inputs - set.targets;
        return resid.squaredNorm() * dS;
    };

    TrainResult res;
    double cur = eval(params);
    const double initial = cur;
    res.params = params;
    res.best_loss = cur;
    res.history.iterations.push_back(0);
    res.history.losses.push_back(cur);

    double lr = cfg.learning_rate;
    long updates = 0;
    const long stride = std::max<long>(1, cfg.log_every);

    auto handle_divergence = [&](double observed) {
        if (res.restarts >= 3) throw DivergenceError(updates, observed, lr);
        ++res.restarts;
        lr *= 0.5;
        params = res.params;
        adam = AdamState{zero_gradients(params), zero_gradients(params), 0};
        cur = eval(params);
    };

    if (cfg.optimizer == TrainConfig::Optimizer::Adam) {
        for (long iter = 1; iter <= cfg.max_iters; ++iter) {
            if (cur <= cfg.tolerance) break;
            if (!std::isfinite(cur) || cur > 1e6 * initial) {
                handle_divergence(cur);
                continue;
            }
            Eigen::RowVectorXd upstream = (2.0 * dS) * resid.transpose();
            backward_batch(params, set.inputs, cache, upstream, grads);
            adam_step(params, grads, adam, cfg, lr, first);
            ++updates;
            cur = eval(params);
            if (std::isfinite(cur) && cur < res.best_loss) {
                res.best_loss = cur;
                res.params = params;
            }
            if (updates % stride == 0) {
                res.history.iterations.push_back(updates);
                res.history.losses.push_back(cur);
            }
        }
    } else {
        // Per-sample descent; the full loss (tolerance/divergence checks, history)
        // is refreshed at the logging stride.
        Eigen::Index next = 0;
        for (long iter = 1; iter <= cfg.max_iters; ++iter) {
            if (cur <= cfg.tolerance) break;
            if (!std::isfinite(cur) || cur > 1e6 * initial) {
                handle_divergence(cur);
                continue;
            }
            const Eigen::Index m = next;
            next = (next + 1) % n;
            const double pred = predict_cell(params, set.inputs.col(m), set.center_inputs[m]);
            if (!std::isfinite(pred)) {
                handle_divergence(pred);
                continue;
            }
            const double upstream = 2.0 * (pred - set.targets[m]) * dS;
            Gradients g = backward(params, set.inputs.col(m), upstream);
            sgd_step(params, g, lr, first, cfg.train_biases);
            ++updates;
            if (updates % stride == 0 || iter == cfg.max_iters) {
                cur = eval(params);
                if (std::isfinite(cur) && cur < res.best_loss) {
                    res.best_loss = cur;
                    res.params = params;
                }
                res.history.iterations.push_back(updates);
                res.history.losses.push_back(cur);
            }
        }
    }

    if (res.history.iterations.back() != updates) {
        res.history.iterations.push_back(updates);
        res.history.losses.push_back(cur);
    }
    res.iterations = updates;
    return res;
}

std::pair<LearningSet, LearningSet> split_set(const LearningSet& set, double fraction,
                                              std::uint64_t seed) {
    const Eigen::Index n = set.size();
    if (!(fraction > 0.0 && fraction < 1.0))
        throw ConfigError("split_set: fraction must lie strictly between 0 and 1");
    const Eigen::Index ntrain =
        static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
    if (ntrain <= 0 || ntrain >= n)
        throw ConfigError("split_set: split would leave an empty side");

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    std::mt19937_64 eng(seed);
    for (Eigen::Index i = n - 1; i > 0; --i) {
        const Eigen::Index j = static_cast<Eigen::Index>(
            eng() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }

    std::vector<Eigen::Index> tr(perm.begin(), perm.begin() + ntrain);
    std::vector<Eigen::Index> te(perm.begin() + ntrain, perm.end());
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
    return {take_subset(set, tr), take_subset(set, te)};
}

} // namespace cann
