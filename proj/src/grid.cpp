#include "cann/grid.hpp"

#include "cann/errors.hpp"
#include "cann/quadrature.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace cann {

namespace {

std::string multi_to_string(std::span<const int> multi) {
    std::ostringstream os;
    os << "(";
    for (int k = 0; k < static_cast<int>(multi.size()); ++k)
        os << multi[k] << (k + 1 < static_cast<int>(multi.size()) ? "," : "");
    os << ")";
    return os.str();
}

// Odometer increment over [0, limits[k]) with the last axis fastest.
bool advance_odometer(std::span<int> idx, std::span<const int> limits) {
    for (int k = static_cast<int>(idx.size()) - 1; k >= 0; --k) {
        if (++idx[k] < limits[k]) return true;
        idx[k] = 0;
    }
    return false;
}

} // namespace

std::size_t GridSpec::total_cells() const {
    std::size_t n = 1;
    for (int c : counts) n *= static_cast<std::size_t>(c);
    return n;
}

std::size_t GridSpec::flat_index(std::span<const int> multi) const {
    if (static_cast<int>(multi.size()) != dim)
        throw IndexError("flat_index: expected " + std::to_string(dim) + " indices");
    std::size_t flat = 0;
    for (int k = 0; k < dim; ++k) {
        if (multi[k] < 0 || multi[k] >= counts[k])
            throw IndexError("flat_index: index " + multi_to_string(multi) + " out of range");
        flat = flat * static_cast<std::size_t>(counts[k]) + static_cast<std::size_t>(multi[k]);
    }
    return flat;
}

void GridSpec::multi_index(std::size_t flat, std::span<int> out) const {
    if (flat >= total_cells()) throw IndexError("multi_index: flat index out of range");
    for (int k = dim - 1; k >= 0; --k) {
        out[k] = static_cast<int>(flat % static_cast<std::size_t>(counts[k]));
        flat /= static_cast<std::size_t>(counts[k]);
    }
}

std::vector<int> GridSpec::multi_index(std::size_t flat) const {
    std::vector<int> out(dim);
    multi_index(flat, out);
    return out;
}

double GridSpec::min_dx() const {
    double m = dx[0];
    for (double v : dx) m = std::min(m, v);
    return m;
}

bool GridSpec::same_mesh(const GridSpec& other) const {
    if (dim != other.dim || counts != other.counts) return false;
    for (int k = 0; k < dim; ++k)
        if (std::abs(lo[k] - other.lo[k]) > 1e-12 || std::abs(hi[k] - other.hi[k]) > 1e-12)
            return false;
    return true;
}

GridSpec build_grid(std::span<const double> lo, std::span<const double> hi,
                    std::span<const int> counts) {
    const int dim = static_cast<int>(counts.size());
    if (dim < 2) throw ConfigError("build_grid: dimension must be >= 2, got " + std::to_string(dim));
    if (lo.size() != counts.size() || hi.size() != counts.size())
        throw ConfigError("build_grid: lo/hi/counts must have equal length");

    GridSpec g;
    g.dim = dim;
    g.lo.assign(lo.begin(), lo.end());
    g.hi.assign(hi.begin(), hi.end());
    g.counts.assign(counts.begin(), counts.end());
    g.dx.resize(dim);
    g.cell_measure = 1.0;
    for (int k = 0; k < dim; ++k) {
        if (!(lo[k] < hi[k]))
            throw ConfigError("build_grid: axis " + std::to_string(k) + " is degenerate (lo >= hi)");
        if (counts[k] < 3)
            throw ConfigError("build_grid: axis " + std::to_string(k) +
                              " needs at least 3 cells, got " + std::to_string(counts[k]));
        g.dx[k] = (hi[k] - lo[k]) / counts[k];
        g.cell_measure *= g.dx[k];
    }
    return g;
}

std::size_t PaddedField::padded_index(std::span<const int> multi) const {
    std::size_t flat = 0;
    for (int k = 0; k < grid.dim; ++k) {
        if (multi[k] < -1 || multi[k] > grid.counts[k])
            throw IndexError("padded_index: index " + multi_to_string(multi) +
                             " outside the one-ring pad");
        flat += static_cast<std::size_t>(multi[k] + 1) * strides[k];
    }
    return flat;
}

double box_average(std::span<const double> box_lo, std::span<const double> box_hi,
                   const SpaceFn& f, int q) {
    const int dim = static_cast<int>(box_lo.size());
    const GaussRule rule = gauss_legendre(q);

    std::vector<int> pt(dim, 0);
    std::vector<int> limits(dim, q);
    std::vector<double> x(dim);
    double sum = 0.0;
    do {
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
            const double c = 0.5 * (box_lo[k] + box_hi[k]);
            const double h = 0.5 * (box_hi[k] - box_lo[k]);
            x[k] = c + h * rule.nodes[pt[k]];
            w *= 0.5 * rule.weights[pt[k]]; // weights sum to 2 per axis; average needs /2
        }
        sum += w * f(x);
    } while (advance_odometer(pt, limits));
    return sum;
}

namespace {

Field cell_average_impl(const GridSpec& grid, const SpaceFn& f, int q) {
    if (q < 1) throw ConfigError("cell_average: quadrature order must be >= 1");
    const GaussRule rule = gauss_legendre(q);
    const int dim = grid.dim;

    // Precompute the q^d tensor points as per-axis offsets from the cell's lo
    // corner, with combined averaged weights.
    std::vector<int> pt(dim, 0);
    std::vector<int> plim(dim, q);
    std::vector<std::vector<double>> offsets; // one entry per quadrature point
    std::vector<double> weights;
    do {
        std::vector<double> off(dim);
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
            off[k] = 0.5 * grid.dx[k] * (1.0 + rule.nodes[pt[k]]);
            w *= 0.5 * rule.weights[pt[k]];
        }
        offsets.push_back(std::move(off));
        weights.push_back(w);
    } while (advance_odometer(pt, plim));

    Field field;
    field.grid = grid;
    field.values.assign(grid.total_cells(), 0.0);

    std::vector<int> cell(dim, 0);
    std::vector<double> x(dim);
    std::size_t flat = 0;
    do {
        double sum = 0.0;
        for (std::size_t p = 0; p < offsets.size(); ++p) {
            for (int k = 0; k < dim; ++k)
                x[k] = grid.cell_lo(k, cell[k]) + offsets[p][k];
            const double v = f(x);
            if (!std::isfinite(v))
                throw EvalError("cell_average: non-finite value in cell " + multi_to_string(cell));
            sum += weights[p] * v;
        }
        field.values[flat++] = sum;
    } while (advance_odometer(cell, grid.counts));
    return field;
}

} // namespace

Field cell_average(const GridSpec& grid, const SpaceFn& f, int q) {
    return cell_average_impl(grid, f, q);
}

Field cell_average_at(const GridSpec& grid, const SpaceTimeFn& f, double t, int q) {
    Field field = cell_average_impl(
        grid, [&](std::span<const double> x) { return f(x, t); }, q);
    field.time = t;
    return field;
}

PaddedField apply_ghost(const Field& field, const BoundaryCondition& bc, double t) {
    const GridSpec& grid = field.grid;
    const int dim = grid.dim;
    if (field.values.size() != grid.total_cells())
        throw ConfigError("apply_ghost: field length does not match its grid");
    if (bc.kind == BoundaryCondition::Kind::Dirichlet && !bc.extension)
        throw ConfigError("apply_ghost: Dirichlet boundary without extension function");

    PaddedField out;
    out.grid = grid;
    out.time = field.time;
    out.strides.assign(dim, 1);
    std::size_t total = 1;
    for (int k = dim - 1; k >= 0; --k) {
        out.strides[k] = total;
        total *= static_cast<std::size_t>(grid.counts[k] + 2);
    }
    out.values.assign(total, 0.0);

    std::vector<int> pcounts(dim);
    for (int k = 0; k < dim; ++k) pcounts[k] = grid.counts[k] + 2;

    std::vector<int> pidx(dim, 0); // padded index, interior at pidx-1
    std::vector<int> cell(dim);
    std::vector<double> glo(dim), ghi(dim);
    std::size_t flat = 0;
    do {
        bool interior = true;
        for (int k = 0; k < dim; ++k) {
            cell[k] = pidx[k] - 1;
            if (cell[k] < 0 || cell[k] >= grid.counts[k]) interior = false;
        }
        if (interior) {
            out.values[flat] = field.values[grid.flat_index(cell)];
        } else if (bc.kind == BoundaryCondition::Kind::Periodic) {
            std::vector<int> wrapped(dim);
            for (int k = 0; k < dim; ++k)
                wrapped[k] = (cell[k] + grid.counts[k]) % grid.counts[k];
            out.values[flat] = field.values[grid.flat_index(wrapped)];
        } else {
            for (int k = 0; k < dim; ++k) {
                glo[k] = grid.lo[k] + cell[k] * grid.dx[k];
                ghi[k] = glo[k] + grid.dx[k];
            }
            out.values[flat] = box_average(
                glo, ghi, [&](std::span<const double> x) { return bc.extension(x, t); }, 4);
        }
        ++flat;
    } while (advance_odometer(pidx, pcounts));
    return out;
}

void check_finite(const Field& field, const char* where) {
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (!std::isfinite(field.values[i])) {
            std::vector<int> cell = field.grid.multi_index(i);
            throw BlowUpError(cell, -1,
                              std::string(where) + ": non-finite value in cell " +
                                  multi_to_string(cell));
        }
    }
}

} // namespace cann
