#include "cann/evolve.hpp"

#include "cann/errors.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace cann {

MarchPlan make_plan(double T, double dt, BoundaryCondition bc, StencilSpec stencil) {
    if (!(dt > 0.0)) throw ConfigError("make_plan: dt must be positive");
    if (T < 0.0) throw ConfigError("make_plan: final time must be nonnegative");
    const long n = static_cast<long>(std::llround(T / dt));
    if (std::abs(static_cast<double>(n) * dt - T) > 1e-12 * std::max(1.0, std::abs(T)))
        throw ConfigError("make_plan: T is not an integral number of dt steps");
    return MarchPlan{dt, n, std::move(bc), stencil};
}

namespace {

Field step_impl(const MlpParams& params, const Field& field, const MarchPlan& plan,
                long step_index) {
    const PaddedField padded = apply_ghost(field, plan.bc, field.time);
    const Eigen::MatrixXd inputs = build_input_matrix(padded, plan.stencil);
    const Eigen::VectorXd centers =
        inputs.row(plan.stencil.center_position()).transpose();
    const Eigen::VectorXd out = predict_batch(params, inputs, centers);

    Field next;
    next.grid = field.grid;
    next.time = field.time + plan.dt;
    next.values.resize(field.values.size());
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        const double v = out[static_cast<Eigen::Index>(i)];
        if (!std::isfinite(v)) {
            std::vector<int> cell = field.grid.multi_index(i);
            std::string at;
            for (int c : cell) at += std::to_string(c) + ",";
            throw BlowUpError(cell, step_index,
                              "march blew up at step " + std::to_string(step_index) +
                                  ", cell (" + at + ")");
        }
        next.values[i] = v;
    }
    return next;
}

} // namespace

Field step(const MlpParams& params, const Field& field, const MarchPlan& plan) {
    return step_impl(params, field, plan, 0);
}

MarchResult march(const MlpParams& params, const Field& start, const MarchPlan& plan) {
    MarchResult res;
    res.field = start;
    res.max_norms.reserve(static_cast<std::size_t>(plan.n_steps));
    for (long k = 0; k < plan.n_steps; ++k) {
        res.field = step_impl(params, res.field, plan, k);
        double mx = 0.0;
        for (double v : res.field.values) mx = std::max(mx, std::abs(v));
        res.max_norms.push_back(mx);
    }
    return res;
}

ErrorReport error_norms(const Field& approx, const Field& reference) {
    if (!approx.grid.same_mesh(reference.grid))
        throw ConfigError("error_norms: fields live on different grids");
    ErrorReport rep;
    double sq = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < approx.values.size(); ++i) {
        const double d = approx.values[i] - reference.values[i];
        sq += d * d;
        mx = std::max(mx, std::abs(d));
    }
    rep.l2 = std::sqrt(sq * approx.grid.cell_measure);
    rep.linf = mx;
    rep.T = approx.time;
    rep.mesh_dx = approx.grid.min_dx();
    return rep;
}

std::vector<double> convergence_order(std::span<const double> errors,
                                      std::span<const double> meshes) {
    if (errors.size() != meshes.size())
        throw ConfigError("convergence_order: errors/meshes length mismatch");
    if (errors.size() < 2)
        throw ConfigError("convergence_order: need at least two levels");
    for (std::size_t k = 0; k + 1 < meshes.size(); ++k)
        if (!(meshes[k] > meshes[k + 1]) || !(meshes[k + 1] > 0.0))
            throw ConfigError("convergence_order: meshes must be strictly decreasing");

    std::vector<double> orders;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) {
        if (errors[k] < 0.0 || errors[k + 1] < 0.0)
            throw ConfigError("convergence_order: errors must be nonnegative");
        if (errors[k] == 0.0 || errors[k + 1] == 0.0) {
            orders.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
            orders.push_back(std::log(errors[k] / errors[k + 1]) /
                             std::log(meshes[k] / meshes[k + 1]));
        }
    }
    return orders;
}

void write_field_csv(std::ostream& os, const Field& field) {
    const GridSpec& g = field.grid;
    for (int k = 0; k < g.dim; ++k) os << "i" << k << ",";
    for (int k = 0; k < g.dim; ++k) os << "x" << k << ",";
    os << "value\n";
    std::vector<int> cell(g.dim, 0);
    char buf[64];
    std::size_t flat = 0;
    while (true) {
        for (int k = 0; k < g.dim; ++k) os << cell[k] << ",";
        for (int k = 0; k < g.dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.12g,", g.cell_center(k, cell[k]));
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", field.values[flat]);
        os << buf;
        ++flat;
        int k = g.dim - 1;
        for (; k >= 0; --k) {
            if (++cell[k] < g.counts[k]) break;
            cell[k] = 0;
        }
        if (k < 0) break;
    }
}

} // namespace cann
