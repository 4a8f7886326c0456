//---------------------------------------------------------------------------//
/*!
 * \file particles.hpp
 * \brief Material point seeding and per-particle kinematic updates.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_PARTICLES_HPP
#define FBARMPM_PARTICLES_HPP

#include "fbarmpm/grid.hpp"
#include "fbarmpm/material_point.hpp"

#include <variant>
#include <vector>

namespace fbarmpm
{

//! Keep everything in the block box.
struct NoMask
{
};

//! Prism over a convex counter-clockwise polygon in the xy-plane.
struct PolygonXYMask
{
    std::vector<std::array<double, 2>> vertices;
};

//! Solid cylinder along z: |(x, y) - center| <= radius, z in [z_lo, z_hi].
struct CylinderZMask
{
    std::array<double, 2> center{0.0, 0.0};
    double radius = 0.0;
    double z_lo = 0.0;
    double z_hi = 0.0;
};

using GeometryMask = std::variant<NoMask, PolygonXYMask, CylinderZMask>;

bool mask_contains(const GeometryMask& mask, const Vec3& x);

struct ParticleBlock
{
    Box box;
    Index3 ppc{1, 1, 1};
    double density = 1.0;
    GeometryMask mask = NoMask{};
    int material = 0;
};

/*!
 * Seed a regular sub-lattice: every background cell overlapping the box gets
 * ppc[0]*ppc[1]*ppc[2] candidate points at the centroids of its sub-cells,
 * and candidates inside both the box and the mask are kept. Each particle has
 * V0 = cell volume / ppc count and m = density * V0.
 * Throws ConfigError when the box leaves the background domain.
 */
ParticleList init_block(const ParticleBlock& block, const BackgroundGrid& grid);

/*!
 * MUSL step 8 with the basis at the current (old) position:
 * v += dt * sum N_i a_i, x += dt * sum N_i v_i^{n+1}.
 * Throws OutOfDomainError if the new position leaves the background.
 */
void update_particle_kinematics(MaterialPoint& mp, const BackgroundGrid& grid, double dt);
void update_particle_kinematics(MaterialPoint& mp, const BackgroundGrid& grid, const Stencil& s,
                                double dt);

/*!
 * F <- (I + dt L) F and V <- det(F) V0. Throws NumericError on det(F) <= 0
 * or a non-finite determinant.
 */
void update_deformation_gradient(MaterialPoint& mp, const Mat3& grad_v, double dt);

double total_mass(const ParticleList& particles);
Vec3 total_momentum(const ParticleList& particles);
double kinetic_energy(const ParticleList& particles);

} // namespace fbarmpm

#endif // FBARMPM_PARTICLES_HPP
