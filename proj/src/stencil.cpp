#include "cann/stencil.hpp"

#include "cann/errors.hpp"

#include <string>

namespace cann {

namespace {

bool advance_odometer(std::span<int> idx, std::span<const int> limits) {
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
        if (++idx[k] < limits[k]) return true;
        idx[k] = 0;
    }
    return false;
}

void check_dim(const StencilSpec& spec, const GridSpec& grid) {
    if (spec.dim != grid.dim)
        throw ConfigError("stencil dimension " + std::to_string(spec.dim) +
                          " does not match grid dimension " + std::to_string(grid.dim));
}

} // namespace

int StencilSpec::input_width() const {
    if (kind == Kind::EdgeNeighbors) return 2 * dim + 1;
    int w = 1;
    for (int k = 0; k < dim; ++k) w *= 3;
    return w;
}

int StencilSpec::center_position() const {
    return kind == Kind::EdgeNeighbors ? 2 : (input_width() - 1) / 2;
}

std::vector<std::vector<int>> StencilSpec::offsets() const {
    std::vector<std::vector<int>> out;
    if (kind == Kind::EdgeNeighbors) {
        std::vector<int> zero(dim, 0);
        auto unit = [&](int axis, int sign) {
            std::vector<int> off(dim, 0);
            off[axis] = sign;
            return off;
        };
        out.push_back(unit(0, -1));
        out.push_back(unit(0, +1));
        out.push_back(zero);
        for (int k = 1; k < dim; ++k) {
            out.push_back(unit(k, +1));
            out.push_back(unit(k, -1));
        }
    } else {
        std::vector<int> idx(dim, 0);
        std::vector<int> limits(dim, 3);
        do {
            std::vector<int> off(dim);
            for (int k = 0; k < dim; ++k) off[k] = idx[k] - 1;
            out.push_back(std::move(off));
        } while (advance_odometer(idx, limits));
    }
    return out;
}

Eigen::VectorXd build_input_vector(const PaddedField& padded, std::span<const int> cell,
                                   const StencilSpec& spec) {
    check_dim(spec, padded.grid);
    const auto offs = spec.offsets();
    Eigen::VectorXd v(spec.input_width());
    std::vector<int> neighbor(spec.dim);
    for (std::size_t p = 0; p < offs.size(); ++p) {
        for (int k = 0; k < spec.dim; ++k) neighbor[k] = cell[k] + offs[p][k];
        v[static_cast<Eigen::Index>(p)] = padded.at(neighbor);
    }
    return v;
}

Eigen::MatrixXd build_input_matrix(const PaddedField& padded, const StencilSpec& spec) {
    check_dim(spec, padded.grid);
    const GridSpec& grid = padded.grid;
    const int dim = grid.dim;
    const int width = spec.input_width();
    const auto offs = spec.offsets();

    // Signed deltas in padded flat space, one per stencil slot.
    std::vector<std::ptrdiff_t> deltas(offs.size());
    for (std::size_t p = 0; p < offs.size(); ++p) {
        std::ptrdiff_t d = 0;
        for (int k = 0; k < dim; ++k)
            d += static_cast<std::ptrdiff_t>(offs[p][k]) *
                 static_cast<std::ptrdiff_t>(padded.strides[k]);
        deltas[p] = d;
    }

    Eigen::MatrixXd inputs(width, static_cast<Eigen::Index>(grid.total_cells()));
    std::vector<int> cell(dim, 0);
    Eigen::Index col = 0;
    do {
        std::size_t base = 0;
        for (int k = 0; k < dim; ++k)
            base += static_cast<std::size_t>(cell[k] + 1) * padded.strides[k];
        for (int p = 0; p < width; ++p)
            inputs(p, col) = padded.values[base + deltas[static_cast<std::size_t>(p)]];
        ++col;
    } while (advance_odometer(cell, grid.counts));
    return inputs;
}

LearningSet assemble_pairs(const Field& field_n, const Field& field_np1,
                           const BoundaryCondition& bc, const StencilSpec& spec) {
    if (!field_n.grid.same_mesh(field_np1.grid))
        throw ConfigError("assemble_pairs: fields live on different grids");
    check_dim(spec, field_n.grid);

    const std::size_t n = field_n.grid.total_cells();
    const PaddedField padded = apply_ghost(field_n, bc, field_n.time);

    LearningSet set;
    set.inputs = build_input_matrix(padded, spec);
    set.targets = Eigen::Map<const Eigen::VectorXd>(field_np1.values.data(),
                                                    static_cast<Eigen::Index>(n));
    set.center_inputs = set.inputs.row(spec.center_position()).transpose();
    set.cell_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) set.cell_ids[i] = i;
    set.pair_count = 1;
    set.cell_measure = field_n.grid.cell_measure;
    return set;
}

LearningSet assemble_series(std::span<const Field> fields, const BoundaryCondition& bc,
                            const StencilSpec& spec) {
    if (fields.size() < 2)
        throw ConfigError("assemble_series: need at least two time levels");
    LearningSet all = assemble_pairs(fields[0], fields[1], bc, spec);
    for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
        LearningSet next = assemble_pairs(fields[i], fields[i + 1], bc, spec);
        const Eigen::Index n0 = all.size();
        const Eigen::Index n1 = next.size();
        all.inputs.conservativeResize(Eigen::NoChange, n0 + n1);
        all.inputs.rightCols(n1) = next.inputs;
        all.targets.conservativeResize(n0 + n1);
        all.targets.tail(n1) = next.targets;
        all.center_inputs.conservativeResize(n0 + n1);
        all.center_inputs.tail(n1) = next.center_inputs;
        all.cell_ids.insert(all.cell_ids.end(), next.cell_ids.begin(), next.cell_ids.end());
        all.pair_count += 1;
    }
    return all;
}

} // namespace cann
