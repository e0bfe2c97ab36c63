#pragma once

#include "cann/grid.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

namespace cann {

/// Which neighborhood feeds the network.
///
/// EdgeNeighbors (width 2d+1) orders offsets as
///   [-e1, +e1, center, +e2, -e2, +e3, -e3, ...]
/// which for d=2 is [(i-1,j), (i+1,j), (i,j), (i,j+1), (i,j-1)].
/// VertexNeighbors (width 3^d) walks offsets (-1,0,+1)^d lexicographically,
/// last axis fastest, center at position (3^d - 1)/2.
struct StencilSpec {
    enum class Kind { EdgeNeighbors, VertexNeighbors };
    Kind kind = Kind::EdgeNeighbors;
    int dim = 2;

    int input_width() const;
    int center_position() const;
    std::vector<std::vector<int>> offsets() const;
};

/// Supervised pairs (V_in, target next-step average), one per cell per time pair,
/// stored column-wise in ascending flat cell order.
struct LearningSet {
    Eigen::MatrixXd inputs;        // input_width x N
    Eigen::VectorXd targets;       // N
    Eigen::VectorXd center_inputs; // N
    std::vector<std::size_t> cell_ids;
    int pair_count = 0;
    double cell_measure = 0.0; // dS of the grid the pairs came from

    Eigen::Index size() const { return targets.size(); }
};

Eigen::VectorXd build_input_vector(const PaddedField& padded, std::span<const int> cell,
                                   const StencilSpec& spec);

/// Input vectors for every interior cell, columns in ascending flat order.
Eigen::MatrixXd build_input_matrix(const PaddedField& padded, const StencilSpec& spec);

LearningSet assemble_pairs(const Field& field_n, const Field& field_np1,
                           const BoundaryCondition& bc, const StencilSpec& spec);

/// Pairs from p+1 consecutive time levels (fields.size() >= 2).
LearningSet assemble_series(std::span<const Field> fields, const BoundaryCondition& bc,
                            const StencilSpec& spec);

} // namespace cann
