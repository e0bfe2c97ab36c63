#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cann {

/// Structured Cartesian hypercube grid, d >= 2. Flat indexing is row-major
/// with the last axis varying fastest.
struct GridSpec {
    int dim = 0;
    std::vector<double> lo;
    std::vector<double> hi;
    std::vector<int> counts;
    std::vector<double> dx;
    double cell_measure = 0.0;

    std::size_t total_cells() const;
    std::size_t flat_index(std::span<const int> multi) const;
    std::vector<int> multi_index(std::size_t flat) const;
    void multi_index(std::size_t flat, std::span<int> out) const;

    double cell_lo(int axis, int i) const { return lo[axis] + i * dx[axis]; }
    double cell_center(int axis, int i) const { return lo[axis] + (i + 0.5) * dx[axis]; }
    double min_dx() const;
    bool same_mesh(const GridSpec& other) const;
};

GridSpec build_grid(std::span<const double> lo, std::span<const double> hi,
                    std::span<const int> counts);

/// Flat array of cell averages over a grid, stamped with its time level.
struct Field {
    GridSpec grid;
    std::vector<double> values;
    double time = 0.0;
};

using SpaceFn = std::function<double(std::span<const double>)>;
using SpaceTimeFn = std::function<double(std::span<const double>, double)>;

struct BoundaryCondition {
    enum class Kind { Periodic, Dirichlet };
    Kind kind = Kind::Periodic;
    /// Dirichlet only: boundary extension, defined on the one-cell collar outside the domain.
    SpaceTimeFn extension;

    static BoundaryCondition periodic() { return {Kind::Periodic, nullptr}; }
    static BoundaryCondition dirichlet(SpaceTimeFn f) { return {Kind::Dirichlet, std::move(f)}; }
};

/// Field extended by one ghost cell per side per axis. Interior multi-indices
/// range over [0, counts[k]); ghosts sit at -1 and counts[k].
struct PaddedField {
    GridSpec grid; // the interior grid
    std::vector<double> values;
    double time = 0.0;
    std::vector<std::size_t> strides; // padded strides, last axis fastest

    std::size_t padded_index(std::span<const int> multi) const;
    double at(std::span<const int> multi) const { return values[padded_index(multi)]; }
};

/// Cell averages of f by tensor-product Gauss-Legendre with q points per axis.
Field cell_average(const GridSpec& grid, const SpaceFn& f, int q = 4);
Field cell_average_at(const GridSpec& grid, const SpaceTimeFn& f, double t, int q = 4);

/// Average of f over one axis-aligned box, same rule as cell_average.
double box_average(std::span<const double> box_lo, std::span<const double> box_hi,
                   const SpaceFn& f, int q = 4);

/// Pad by one ghost ring. Periodic wraps the opposite interior values; Dirichlet
/// fills each ghost with the q=4 cell average of the extension at time t.
PaddedField apply_ghost(const Field& field, const BoundaryCondition& bc, double t);

void check_finite(const Field& field, const char* where);

} // namespace cann
