#pragma once

#include "cann/grid.hpp"

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cann {

enum class ProblemId {
    Heat2D,
    ConvDiff2D,
    AnisoDiff2D,
    NSVorticity2D,
    NonlinearDiff2D,
    PME2D,
    Heat3D,
    Heat4D,
};

enum class TargetMode { ExactAverages, FDReference };

/// One concrete PDE instance: domain, coefficients, initial condition,
/// closed-form solution where known, boundary handling, and the bounds the
/// reference integrator needs for its stable sub-step.
struct ProblemSpec {
    ProblemId id{};
    std::string variant;
    int dim = 2;
    std::vector<double> lo, hi;
    SpaceFn initial;
    SpaceTimeFn exact;   // null when no closed form is used
    SpaceTimeFn forcing; // null when none
    std::vector<SpaceFn> velocity; // prescribed advecting field (vorticity problem)
    BoundaryCondition bc;
    double advect_c = 0.0;
    double mu = 0.0;
    double reynolds = 0.0;
    double max_diffusivity = 1.0;
    double max_advection = 0.0;

    bool has_exact() const { return static_cast<bool>(exact); }
};

ProblemId problem_id_from_string(const std::string& name);
std::string to_string(ProblemId id);
std::vector<std::string> variants_of(ProblemId id);

ProblemSpec catalog(ProblemId id, const std::string& variant);

/// Manufactured forcing for the nonlinear diffusion example, assembled from
/// u = e^{-t}(x^2+y^2)/2 and a(grad u) = (1 + exp(-|grad u|^2)) grad u.
SpaceTimeFn nonlinear_diffusion_forcing();

/// Second-order central discretization of the problem's full spatial operator
/// (diffusion, advection, mixed term, nonlinear face fluxes, forcing at the
/// cell center) evaluated at one interior cell of a padded field.
double flux_divergence(const ProblemSpec& spec, const PaddedField& padded,
                       std::span<const int> cell);

/// (t0, t1) cell-average fields: t0 from the initial condition, t1 either
/// from the exact solution or by sub-stepped two-stage explicit integration.
std::pair<Field, Field> generate_target(const ProblemSpec& spec, const GridSpec& grid,
                                        double dt, TargetMode mode);

/// March a field forward by `duration` with the reference integrator.
Field fd_march(const ProblemSpec& spec, const Field& start, double duration);

/// Reference solution at time T, integrated from the initial averages.
Field fd_reference(const ProblemSpec& spec, const GridSpec& grid, double T);

Field exact_averages(const ProblemSpec& spec, const GridSpec& grid, double t, int q = 4);
Field initial_averages(const ProblemSpec& spec, const GridSpec& grid, int q = 4);

/// Uniform grid over the problem's domain with spacing dx on every axis;
/// rejects dx that does not divide the domain.
GridSpec grid_for(const ProblemSpec& spec, double dx);

/// Largest explicit sub-step the reference integrator may take.
double stable_substep(const ProblemSpec& spec, const GridSpec& grid);

} // namespace cann
