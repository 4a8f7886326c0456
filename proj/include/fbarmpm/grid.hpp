//---------------------------------------------------------------------------//
/*!
 * \file grid.hpp
 * \brief Background control-point lattice, nodal state and essential
 *        boundary conditions.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_GRID_HPP
#define FBARMPM_GRID_HPP

#include "fbarmpm/material_point.hpp"
#include "fbarmpm/splines.hpp"

#include <array>
#include <string>
#include <variant>
#include <vector>

namespace fbarmpm
{

//---------------------------------------------------------------------------//
/*!
 * \brief Nodal state on the background control points.
 *
 * All arrays are indexed by TensorBasis3D::flat (x fastest).
 */
struct BackgroundGrid
{
    TensorBasis3D basis;

    std::vector<double> mass;
    std::vector<Vec3> momentum;
    std::vector<Vec3> velocity;
    std::vector<Vec3> f_int;
    std::vector<Vec3> f_ext;
    std::vector<Vec3> accel;
    std::vector<Vec3> momentum_bar;
    std::vector<Vec3> velocity_bar;

    std::size_t n_nodes() const { return mass.size(); }
    double total_mass() const;
    Vec3 total_momentum() const;
};

//! Main background grid; degree must be 1..3.
BackgroundGrid make_grid(const Vec3& origin, const Vec3& extent, const Index3& elements, int degree);

//---------------------------------------------------------------------------//
// Boundary conditions
//---------------------------------------------------------------------------//

enum class Face
{
    x_min,
    x_max,
    y_min,
    y_max,
    z_min,
    z_max
};

enum class ConstraintKind
{
    //! All velocity components zero.
    fixed,
    //! Listed components zero (the face normal for face selectors).
    roller,
    //! One-sided normal constraint: no penetration, free separation.
    wall
};

struct Box
{
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();
    bool contains(const Vec3& x) const
    {
        return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    }
};

struct BoundaryCondition
{
    std::variant<Face, Box> selector = Face::x_min;
    ConstraintKind kind = ConstraintKind::fixed;
    //! Constrained axes for a roller on a region selector.
    std::array<bool, 3> axes{false, false, false};
};

struct BoundaryConditionSet
{
    std::vector<BoundaryCondition> conditions;
    //! Zero the out-of-plane (z) component at every control point.
    bool plane_strain = false;
};

//! A boundary condition resolved to concrete control points.
struct NodeConstraint
{
    std::vector<std::size_t> nodes;
    ConstraintKind kind = ConstraintKind::fixed;
    std::array<bool, 3> axes{true, true, true};
    //! Wall only: normal axis and the sign of the admissible normal
    //! component (+1 for a min face, -1 for a max face).
    int normal_axis = 0;
    double admissible_sign = 1.0;
};

struct ResolvedBoundary
{
    std::vector<NodeConstraint> constraints;
    bool plane_strain = false;
};

/*!
 * Map selectors to control points. Throws ConfigError when a selector
 * reaches a control point off the background domain boundary, matches
 * nothing, or is malformed.
 */
ResolvedBoundary resolve_boundary(const TensorBasis3D& tb, const BoundaryConditionSet& bcs);

enum class GridField
{
    velocity,
    acceleration,
    updated_velocity
};

/*!
 * Zero constrained components of one nodal field. For wall constraints on
 * the acceleration the current nodal velocity and the step size are needed
 * so that v + dt * a stays admissible; pass dt > 0 in that case.
 */
void apply_bcs(BackgroundGrid& grid, const ResolvedBoundary& bcs, GridField which, double dt = 0.0);
void apply_bcs(BackgroundGrid& grid, const BoundaryConditionSet& bcs, GridField which, double dt = 0.0);

//---------------------------------------------------------------------------//
// Transfers
//---------------------------------------------------------------------------//

void reset(BackgroundGrid& grid);

//! m_i = sum N_i m_p; (m v)_i = sum N_i m_p v_p. Throws OutOfDomainError.
void scatter_mass_momentum(BackgroundGrid& grid, const ParticleList& particles);

//! v_i = (m v)_i / m_i where m_i > mass_cutoff, else 0.
void nodal_velocity(BackgroundGrid& grid, double mass_cutoff);

//! Relative cutoff used by the solver: factor * mean particle mass.
double default_mass_cutoff(const ParticleList& particles, double factor = 1e-12);

std::string face_name(Face f);
Face parse_face(const std::string& s);

} // namespace fbarmpm

#endif // FBARMPM_GRID_HPP
