//---------------------------------------------------------------------------//
/*!
 * \file solver.hpp
 * \brief Explicit MUSL time integration with optional F-bar projection.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_SOLVER_HPP
#define FBARMPM_SOLVER_HPP

#include "fbarmpm/constitutive.hpp"
#include "fbarmpm/fbar.hpp"
#include "fbarmpm/grid.hpp"
#include "fbarmpm/particles.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fbarmpm
{

//! Constant force shared equally by a fixed set of particles.
struct TractionLoad
{
    std::vector<std::size_t> particles;
    //! Total force over the loaded particle set [N].
    Vec3 total_force = Vec3::Zero();
};

struct SimState
{
    BackgroundGrid grid;
    std::optional<ProjectionGrid> projection;
    ParticleList particles;
    //! Indexed by MaterialPoint::material.
    std::vector<Material> materials;
    BoundaryConditionSet bcs;
    ResolvedBoundary resolved_bcs;
    //! Body force per unit mass [m/s^2].
    Vec3 body_force = Vec3::Zero();
    std::vector<TractionLoad> tractions;

    double time = 0.0;
    long step_count = 0;
    double mass_cutoff = 0.0;
    double volume_cutoff = 0.0;
    //! Accumulated stress work sum dt V sigma_mid : D [J].
    double internal_energy = 0.0;

    // Per-step scratch.
    std::vector<Stencil> stencils;
    std::vector<Stencil> projection_stencils;
    //! projection_stencils match the current positions. Clear this after
    //! moving particles outside step().
    bool projection_stencils_current = false;
    std::vector<Vec3> point_forces;
    std::vector<double> scratch_a;
    std::vector<double> scratch_b;
};

/*!
 * Assemble a state: resolves boundary conditions, builds the projection
 * grid for the requested mode, distributes tractions and sets the relative
 * mass and volume cutoffs. Throws ConfigError on inconsistent input.
 */
SimState make_sim_state(BackgroundGrid grid, ParticleList particles, std::vector<Material> materials,
                        BoundaryConditionSet bcs, const Vec3& body_force,
                        std::vector<TractionLoad> tractions, ProjectionMode projection);

struct TimeControls
{
    double dt = 0.0;
    double t_end = 0.0;
    //! Observer cadence in steps.
    int cadence = 1;
    //! dt above cfl_factor * h_min / c triggers a warning.
    double cfl_factor = 1.0;
};

//! Throws ConfigError unless dt > 0, t_end >= 0 and cadence >= 1.
void validate(const TimeControls& tc);

//! Number of steps needed to reach t_end.
long step_target(const TimeControls& tc);

//! Largest stable-looking dt: cfl_factor * h_min / max wave speed.
double cfl_limit(const SimState& state, double cfl_factor = 1.0);

/*!
 * One MUSL step. Throws NumericError (or OutOfDomainError) with the step and
 * particle index when the state becomes unrecoverable.
 */
void step(SimState& state, const TimeControls& tc);

using Observer = std::function<void(const SimState&)>;

struct RunSummary
{
    double wall_seconds = 0.0;
    long steps = 0;
    double final_time = 0.0;
    Vec3 momentum = Vec3::Zero();
    double kinetic_energy = 0.0;
    double internal_energy = 0.0;
};

/*!
 * Step until t_end. Observers run after every step whose count is a multiple
 * of the cadence, and after the last step.
 */
RunSummary run(SimState& state, const TimeControls& tc, std::span<const Observer> observers = {});

} // namespace fbarmpm

#endif // FBARMPM_SOLVER_HPP
