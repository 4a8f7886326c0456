//---------------------------------------------------------------------------//
/*!
 * \file grid.cpp
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/grid.hpp"

#include "fbarmpm/detail/stencil_loop.hpp"

#include <algorithm>
#include <cmath>

namespace fbarmpm
{

double BackgroundGrid::total_mass() const
{
    double m = 0.0;
    for (double mi : mass)
        m += mi;
    return m;
}

Vec3 BackgroundGrid::total_momentum() const
{
    Vec3 p = Vec3::Zero();
    for (const Vec3& pi : momentum)
        p += pi;
    return p;
}

BackgroundGrid make_grid(const Vec3& origin, const Vec3& extent, const Index3& elements, int degree)
{
    if (degree < 1 || degree > max_degree)
        throw ConfigError("background degree must be in 1..3, got " + std::to_string(degree));
    BackgroundGrid g;
    g.basis = make_tensor_basis(origin, extent, elements, degree);
    const std::size_t n = g.basis.n_nodes();
    g.mass.assign(n, 0.0);
    for (auto* field : {&g.momentum, &g.velocity, &g.f_int, &g.f_ext, &g.accel, &g.momentum_bar,
                        &g.velocity_bar})
        field->assign(n, Vec3::Zero());
    return g;
}

//---------------------------------------------------------------------------//
std::string face_name(Face f)
{
    switch (f)
    {
    case Face::x_min:
        return "x_min";
    case Face::x_max:
        return "x_max";
    case Face::y_min:
        return "y_min";
    case Face::y_max:
        return "y_max";
    case Face::z_min:
        return "z_min";
    case Face::z_max:
        return "z_max";
    }
    return "?";
}

Face parse_face(const std::string& s)
{
    for (Face f : {Face::x_min, Face::x_max, Face::y_min, Face::y_max, Face::z_min, Face::z_max})
        if (face_name(f) == s)
            return f;
    throw ConfigError("unknown face '" + s + "'");
}

namespace
{

bool on_domain_boundary(const TensorBasis3D& tb, const Index3& ijk)
{
    for (int a = 0; a < 3; ++a)
        if (ijk[a] == 0 || ijk[a] == tb.n_basis(a) - 1)
            return true;
    return false;
}

} // namespace

ResolvedBoundary resolve_boundary(const TensorBasis3D& tb, const BoundaryConditionSet& bcs)
{
    ResolvedBoundary out;
    out.plane_strain = bcs.plane_strain;
    const Index3 n{tb.n_basis(0), tb.n_basis(1), tb.n_basis(2)};

    for (const BoundaryCondition& bc : bcs.conditions)
    {
        NodeConstraint nc;
        nc.kind = bc.kind;
        if (const Face* face = std::get_if<Face>(&bc.selector))
        {
            const int axis = static_cast<int>(*face) / 2;
            const bool is_min = static_cast<int>(*face) % 2 == 0;
            const int layer = is_min ? 0 : n[axis] - 1;
            for (int k = 0; k < n[2]; ++k)
                for (int j = 0; j < n[1]; ++j)
                    for (int i = 0; i < n[0]; ++i)
                    {
                        const Index3 ijk{i, j, k};
                        if (ijk[axis] == layer)
                            nc.nodes.push_back(tb.flat(i, j, k));
                    }
            nc.normal_axis = axis;
            nc.admissible_sign = is_min ? 1.0 : -1.0;
            if (bc.kind == ConstraintKind::roller || bc.kind == ConstraintKind::wall)
            {
                nc.axes = {false, false, false};
                nc.axes[axis] = true;
            }
        }
        else
        {
            const Box& box = std::get<Box>(bc.selector);
            if (bc.kind == ConstraintKind::wall)
                throw ConfigError("wall constraints need a face selector");
            for (std::size_t idx = 0; idx < tb.n_nodes(); ++idx)
            {
                const Index3 ijk = tb.unflatten(idx);
                const Vec3 cp(tb.greville(0, ijk[0]), tb.greville(1, ijk[1]), tb.greville(2, ijk[2]));
                if (!box.contains(cp))
                    continue;
                if (!on_domain_boundary(tb, ijk))
                    throw ConfigError("boundary region selector reaches interior control point " +
                                      std::to_string(idx));
                nc.nodes.push_back(idx);
            }
            if (nc.nodes.empty())
                throw ConfigError("boundary region selector matches no control point");
            if (bc.kind == ConstraintKind::roller)
            {
                nc.axes = bc.axes;
                if (!(nc.axes[0] || nc.axes[1] || nc.axes[2]))
                    throw ConfigError("roller region constraint without constrained axes");
            }
        }
        out.constraints.push_back(std::move(nc));
    }
    return out;
}

namespace
{

std::vector<Vec3>& field_of(BackgroundGrid& grid, GridField which)
{
    switch (which)
    {
    case GridField::velocity:
        return grid.velocity;
    case GridField::acceleration:
        return grid.accel;
    case GridField::updated_velocity:
        return grid.velocity_bar;
    }
    return grid.velocity;
}

} // namespace

void apply_bcs(BackgroundGrid& grid, const ResolvedBoundary& bcs, GridField which, double dt)
{
    std::vector<Vec3>& f = field_of(grid, which);

    for (const NodeConstraint& nc : bcs.constraints)
    {
        if (nc.kind == ConstraintKind::wall)
        {
            const int a = nc.normal_axis;
            const double s = nc.admissible_sign;
            if (which == GridField::acceleration)
            {
                if (!(dt > 0.0))
                    throw ConfigError("wall constraint on acceleration needs a positive time step");
                // Keep s * (v + dt a) >= 0.
                for (std::size_t n : nc.nodes)
                {
                    const double v_next = grid.velocity[n][a] + dt * f[n][a];
                    if (s * v_next < 0.0)
                        f[n][a] = -grid.velocity[n][a] / dt;
                }
            }
            else
            {
                for (std::size_t n : nc.nodes)
                    if (s * f[n][a] < 0.0)
                        f[n][a] = 0.0;
            }
            continue;
        }
        for (std::size_t n : nc.nodes)
            for (int a = 0; a < 3; ++a)
                if (nc.axes[a])
                    f[n][a] = 0.0;
    }

    if (bcs.plane_strain)
        for (Vec3& v : f)
            v[2] = 0.0;
}

void apply_bcs(BackgroundGrid& grid, const BoundaryConditionSet& bcs, GridField which, double dt)
{
    apply_bcs(grid, resolve_boundary(grid.basis, bcs), which, dt);
}

//---------------------------------------------------------------------------//
void reset(BackgroundGrid& grid)
{
    std::fill(grid.mass.begin(), grid.mass.end(), 0.0);
    for (auto* field : {&grid.momentum, &grid.velocity, &grid.f_int, &grid.f_ext, &grid.accel,
                        &grid.momentum_bar, &grid.velocity_bar})
        std::fill(field->begin(), field->end(), Vec3::Zero());
}

void scatter_mass_momentum(BackgroundGrid& grid, const ParticleList& particles)
{
    const TensorBasis3D& tb = grid.basis;
    detail::with_width(tb.degree + 1, [&](auto w) {
        constexpr int W = decltype(w)::value;
        for (const MaterialPoint& mp : particles)
        {
            const Stencil s = make_stencil(tb, mp.x);
            const Vec3 mv = mp.mass * mp.v;
            detail::for_each_value<W>(tb, s, [&](std::size_t n, double wgt) {
                grid.mass[n] += wgt * mp.mass;
                grid.momentum[n] += wgt * mv;
            });
        }
    });
}

void nodal_velocity(BackgroundGrid& grid, double mass_cutoff)
{
    for (std::size_t n = 0; n < grid.n_nodes(); ++n)
    {
        if (grid.mass[n] > mass_cutoff)
            grid.velocity[n] = grid.momentum[n] / grid.mass[n];
        else
            grid.velocity[n].setZero();
    }
}

double default_mass_cutoff(const ParticleList& particles, double factor)
{
    if (particles.empty())
        return 0.0;
    double m = 0.0;
    for (const MaterialPoint& mp : particles)
        m += mp.mass;
    return factor * m / static_cast<double>(particles.size());
}

} // namespace fbarmpm
