#include "cann/gradcheck.hpp"

#include "cann/network.hpp"
#include "cann/training.hpp"

#include <cmath>
#include <random>

namespace cann {

namespace {

double next_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Entries are compared relative to the gradient's overall scale so that
// near-zero entries do not turn finite-difference noise into 0/0 blowups.
double max_rel(const Eigen::VectorXd& fd, const Eigen::VectorXd& an) {
    const double scale = 1e-2 * (1.0 + an.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < fd.size(); ++i) {
        const double denom = std::max(std::abs(fd[i]) + std::abs(an[i]), scale);
        worst = std::max(worst, std::abs(fd[i] - an[i]) / denom);
    }
    return worst;
}

} // namespace

GradCheckResult gradcheck(const std::vector<int>& sizes, std::uint64_t seed) {
    constexpr double h = 1e-6;
    GradCheckResult res;

    const MlpParams params = init_params(sizes, seed);
    std::mt19937_64 eng(seed ^ 0x9e3779b97f4a7c15ull);
    const int width = sizes.front();

    Eigen::VectorXd v(width);
    for (int i = 0; i < width; ++i) v[i] = 2.0 * next_unit(eng) - 1.0;
    const double upstream = 1.0 + next_unit(eng);

    const Eigen::VectorXd theta = flatten_params(params);
    {
        const Eigen::VectorXd analytic = flatten_grads(backward(params, v, upstream));
        Eigen::VectorXd fd(theta.size());
        MlpParams probe = params;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            Eigen::VectorXd shifted = theta;
            shifted[i] = theta[i] + h;
            set_from_flat(probe, shifted);
            const double fp = upstream * forward(probe, v);
            shifted[i] = theta[i] - h;
            set_from_flat(probe, shifted);
            const double fm = upstream * forward(probe, v);
            fd[i] = (fp - fm) / (2.0 * h);
        }
        res.max_rel_backward = max_rel(fd, analytic);
    }

    {
        const Eigen::Index nsamples = 12;
        LearningSet set;
        set.inputs.resize(width, nsamples);
        set.targets.resize(nsamples);
        set.center_inputs.resize(nsamples);
        for (Eigen::Index m = 0; m < nsamples; ++m) {
            for (int i = 0; i < width; ++i) set.inputs(i, m) = 2.0 * next_unit(eng) - 1.0;
            set.center_inputs[m] = set.inputs(0, m);
            set.targets[m] = set.center_inputs[m] + 0.2 * (2.0 * next_unit(eng) - 1.0);
            set.cell_ids.push_back(static_cast<std::size_t>(m));
        }
        set.pair_count = 1;
        set.cell_measure = 0.37;

        const Eigen::VectorXd analytic =
            flatten_grads(loss_gradient(params, set, set.cell_measure));
        Eigen::VectorXd fd(theta.size());
        MlpParams probe = params;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            Eigen::VectorXd shifted = theta;
            shifted[i] = theta[i] + h;
            set_from_flat(probe, shifted);
            const double fp = loss(probe, set, set.cell_measure);
            shifted[i] = theta[i] - h;
            set_from_flat(probe, shifted);
            const double fm = loss(probe, set, set.cell_measure);
            fd[i] = (fp - fm) / (2.0 * h);
        }
        res.max_rel_loss = max_rel(fd, analytic);
    }
    return res;
}

} // namespace cann
