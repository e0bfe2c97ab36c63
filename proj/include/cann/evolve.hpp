#pragma once

#include "cann/network.hpp"
#include "cann/stencil.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace cann {

struct MarchPlan {
    double dt = 0.0;
    long n_steps = 0;
    BoundaryCondition bc;
    StencilSpec stencil;
};

/// Requires T to be an integral number of dt steps (to 1e-12); no interpolation.
MarchPlan make_plan(double T, double dt, BoundaryCondition bc, StencilSpec stencil);

struct ErrorReport {
    double l2 = 0.0;
    double linf = 0.0;
    double T = 0.0;
    double mesh_dx = 0.0;
    double dt = 0.0; // filled by the caller that knows the marching step
};

/// One explicit network step: pad, apply the residual update to every cell,
/// advance the time stamp. Throws BlowUpError naming the first bad cell.
Field step(const MlpParams& params, const Field& field, const MarchPlan& plan);

struct MarchResult {
    Field field;
    std::vector<double> max_norms; // max |value| after each step
};

MarchResult march(const MlpParams& params, const Field& start, const MarchPlan& plan);

/// l2 = sqrt(sum (v-u)^2 dS), linf = max |v-u|.
ErrorReport error_norms(const Field& approx, const Field& reference);

/// Orders log(e_k/e_{k+1}) / log(h_k/h_{k+1}) for consecutive mesh pairs;
/// NaN marks pairs with a zero error (undefined order).
std::vector<double> convergence_order(std::span<const double> errors,
                                      std::span<const double> meshes);

/// One row per cell: multi-index, center coordinates, value.
void write_field_csv(std::ostream& os, const Field& field);

} // namespace cann
