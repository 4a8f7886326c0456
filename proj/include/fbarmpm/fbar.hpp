//---------------------------------------------------------------------------//
/*!
 * \file fbar.hpp
 * \brief Lumped-L2 projection of dilatational quantities onto a lower-order
 *        B-spline space, the modified velocity gradient and the double-bar
 *        stress.
 *
 * The projection space shares the element partition of the main background
 * and has degree p - 1 (or 0 for per-cell constants). For a particle field q
 *
 *   pi(q)_j = sum_p Nt_j(x_p) q_p V_p / sum_p Nt_j(x_p) V_p,
 *   pi(q)(x) = sum_j Nt_j(x) pi(q)_j.
 *
 * The velocity gradient keeps its deviatoric part and takes the projected
 * divergence as its trace; the stress keeps its deviator and takes the
 * projected hydrostatic stress.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_FBAR_HPP
#define FBARMPM_FBAR_HPP

#include "fbarmpm/material_point.hpp"
#include "fbarmpm/splines.hpp"

#include <span>
#include <string>
#include <vector>

namespace fbarmpm
{

enum class ProjectionMode
{
    off,
    constants,
    pminus1
};

std::string to_string(ProjectionMode m);
//! Accepts off | constants | pminus1; throws ConfigError otherwise.
ProjectionMode parse_projection_mode(const std::string& s);

//! Degree of the projection space for a main grid of degree p, -1 when off.
//! pminus1 on a linear grid resolves to constants.
int projection_degree(int main_degree, ProjectionMode mode);

struct ProjectionGrid
{
    TensorBasis3D basis;
    int degree() const { return basis.degree; }
};

//! Same origin, extent and elements as `main`, degree 0..main.degree-1.
ProjectionGrid make_projection_grid(const TensorBasis3D& main, int degree);

struct ProjectionField
{
    std::vector<double> numerator;
    std::vector<double> denominator;
    //! pi(q)_j, zero where the denominator is at or below the cutoff.
    std::vector<double> values;
    std::vector<bool> active;
};

/*!
 * Lumped-L2 projection of one scalar per particle, using the particles'
 * current positions and volumes. volume_cutoff < 0 selects the default
 * 1e-12 * mean particle volume.
 */
ProjectionField project(std::span<const double> field, const ParticleList& particles,
                        const ProjectionGrid& pg, double volume_cutoff = -1.0);

//! Same projection with the projection-grid stencils and volumes supplied.
ProjectionField project(std::span<const double> field, std::span<const double> volumes,
                        std::span<const Stencil> stencils, const ProjectionGrid& pg,
                        double volume_cutoff);

double reconstruct(const ProjectionField& pf, const ProjectionGrid& pg, const Vec3& x);
double reconstruct(const ProjectionField& pf, const ProjectionGrid& pg, const Stencil& s);

double default_volume_cutoff(std::span<const double> volumes, double factor = 1e-12);

//! grad_v + (recon_div - tr(grad_v)) / 3 * I.
Mat3 modified_velocity_gradient(const Mat3& grad_v, double recon_div);

/*!
 * Set each particle's effective stress to its stress with the hydrostatic
 * part replaced by the projected and reconstructed one, at the particles'
 * current positions and volumes.
 */
void double_bar_stress(ParticleList& particles, const ProjectionGrid& pg,
                       double volume_cutoff = -1.0);

//! Same, with the projection-grid stencils at the current positions given.
void double_bar_stress(ParticleList& particles, const ProjectionGrid& pg,
                       std::span<const Stencil> stencils, double volume_cutoff);

//---------------------------------------------------------------------------//
/*!
 * \brief Element constraint count.
 *
 * equations = n_sd * p^n_sd per element (asymptotic control-point count).
 * Without projection the constraints are the independent monomials of
 * div v for a tensor-product degree-p field, (p+1)^n_sd - 1. With projection
 * they are the monomials of the complete polynomial space of degree p-1,
 * binomial(p-1+n_sd, n_sd).
 */
struct ConstraintRatio
{
    int equations = 0;
    int constraints = 0;
    double value() const { return static_cast<double>(equations) / constraints; }
};

ConstraintRatio constraint_ratio(int degree, int n_sd, bool projection_enabled);

} // namespace fbarmpm

#endif // FBARMPM_FBAR_HPP
