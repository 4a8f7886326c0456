//---------------------------------------------------------------------------//
/*!
 * \file solver.cpp
 * \brief MUSL cycle. Basis data is evaluated once per step at the start
 *        positions and reused by every transfer of that step.
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/solver.hpp"

#include "fbarmpm/detail/stencil_loop.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>

namespace fbarmpm
{

namespace
{

std::string where(const SimState& s, std::size_t particle)
{
    std::ostringstream os;
    os.precision(17);
    os << "step " << s.step_count + 1 << " (t = " << s.time << "), particle " << particle << ": ";
    return os.str();
}

// Re-throw a numeric failure with step/particle context, keeping its type.
template <class Fn>
void with_context(const SimState& s, std::size_t particle, Fn&& fn)
{
    try
    {
        fn();
    }
    catch (const OutOfDomainError& e)
    {
        throw OutOfDomainError(where(s, particle) + e.what());
    }
    catch (const NumericError& e)
    {
        throw NumericError(where(s, particle) + e.what());
    }
}

void compute_stencils(SimState& s)
{
    const std::size_t np = s.particles.size();
    for (std::size_t p = 0; p < np; ++p)
        with_context(s, p, [&] { s.stencils[p] = make_stencil(s.grid.basis, s.particles[p].x); });
    // Projection stencils left by the previous step already sit at x^n.
    if (s.projection && !s.projection_stencils_current)
        for (std::size_t p = 0; p < np; ++p)
            s.projection_stencils[p] = make_stencil(s.projection->basis, s.particles[p].x);
}

// Steps 1, 2, 4, 5: mass, momentum, internal and external force
// (f_ext = sum N m b is formed as m_i b in grid_update). The stress is
// folded with the z factor of the gradient once per layer.
template <int W>
void scatter_state(SimState& s)
{
    BackgroundGrid& g = s.grid;
    const TensorBasis3D& tb = g.basis;
    for (std::size_t p = 0; p < s.particles.size(); ++p)
    {
        const MaterialPoint& mp = s.particles[p];
        const Stencil& st = s.stencils[p];
        const detail::PlanarWeights<W> pw(st);
        const double m = mp.mass;
        const Vec3 mv = m * mp.v;
        const Mat3 sv = mp.effective_stress * mp.volume;
        for (int k = 0; k < W; ++k)
        {
            const double nz = st.val[2][k];
            const double dz = st.der[2][k];
            double c0[3], c1[3], c2[3];
            for (int a = 0; a < 3; ++a)
            {
                c0[a] = sv(a, 0) * nz;
                c1[a] = sv(a, 1) * nz;
                c2[a] = sv(a, 2) * dz;
            }
            for (int j = 0; j < W; ++j)
            {
                const std::size_t row = detail::row_start(tb, st, j, k);
                for (int i = 0; i < W; ++i)
                {
                    const std::size_t n = row + i;
                    const double w = pw.n[j][i] * nz;
                    g.mass[n] += w * m;
                    Vec3& mom = g.momentum[n];
                    Vec3& fi = g.f_int[n];
                    for (int a = 0; a < 3; ++a)
                    {
                        mom[a] += w * mv[a];
                        fi[a] -= c0[a] * pw.dx[j][i] + c1[a] * pw.dy[j][i] + c2[a] * pw.n[j][i];
                    }
                }
            }
        }
        // Traction loads.
        const Vec3& fp = s.point_forces[p];
        if (fp[0] != 0.0 || fp[1] != 0.0 || fp[2] != 0.0)
            detail::for_each_value<W>(tb, st, [&](std::size_t n, double w) { g.f_ext[n] += w * fp; });
    }
}

// Steps 3, 6, 7.
void grid_update(SimState& s, double dt)
{
    BackgroundGrid& g = s.grid;
    if (s.body_force != Vec3::Zero())
        for (std::size_t n = 0; n < g.n_nodes(); ++n)
            g.f_ext[n] += g.mass[n] * s.body_force;
    nodal_velocity(g, s.mass_cutoff);
    apply_bcs(g, s.resolved_bcs, GridField::velocity);
    for (std::size_t n = 0; n < g.n_nodes(); ++n)
    {
        if (g.mass[n] > s.mass_cutoff)
            g.accel[n] = (g.f_int[n] + g.f_ext[n]) / g.mass[n];
        else
            g.accel[n].setZero();
        if (!g.accel[n].allFinite())
        {
            std::ostringstream os;
            os << "step " << s.step_count + 1 << ": non-finite acceleration at control point " << n;
            throw NumericError(os.str());
        }
    }
    apply_bcs(g, s.resolved_bcs, GridField::acceleration, dt);
    for (std::size_t n = 0; n < g.n_nodes(); ++n)
        g.velocity[n] += dt * g.accel[n];
    apply_bcs(g, s.resolved_bcs, GridField::velocity);
}

// Steps 8 and 9 in one sweep: gather the grid update to the particle, then
// scatter its new momentum.
template <int W>
void move_particles(SimState& s, double dt)
{
    BackgroundGrid& g = s.grid;
    const TensorBasis3D& tb = g.basis;
    for (std::size_t p = 0; p < s.particles.size(); ++p)
    {
        MaterialPoint& mp = s.particles[p];
        const Stencil& st = s.stencils[p];
        double a[3] = {};
        double v[3] = {};
        detail::for_each_value<W>(tb, st, [&](std::size_t n, double w) {
            const Vec3& an = g.accel[n];
            const Vec3& vn = g.velocity[n];
            for (int c = 0; c < 3; ++c)
            {
                a[c] += w * an[c];
                v[c] += w * vn[c];
            }
        });
        for (int c = 0; c < 3; ++c)
        {
            mp.v[c] += dt * a[c];
            mp.x[c] += dt * v[c];
        }
        if (!tb.contains(mp.x) || !mp.x.allFinite())
        {
            std::ostringstream os;
            os.precision(17);
            os << where(s, p) << "material point left the background domain at (" << mp.x[0] << ", "
               << mp.x[1] << ", " << mp.x[2] << ")";
            throw OutOfDomainError(os.str());
        }
        const Vec3 mv = mp.mass * mp.v;
        detail::for_each_value<W>(tb, st, [&](std::size_t n, double w) {
            Vec3& mb = g.momentum_bar[n];
            for (int c = 0; c < 3; ++c)
                mb[c] += w * mv[c];
        });
    }
}

// Step 10.
void updated_grid_velocity(SimState& s)
{
    BackgroundGrid& g = s.grid;
    for (std::size_t n = 0; n < g.n_nodes(); ++n)
    {
        if (g.mass[n] > s.mass_cutoff)
            g.velocity_bar[n] = g.momentum_bar[n] / g.mass[n];
        else
            g.velocity_bar[n].setZero();
    }
    apply_bcs(g, s.resolved_bcs, GridField::updated_velocity);
}

// Step 11: (grad v)_ab = sum_i vbar_i,a dN_i/dx_b, summed per z-layer.
template <int W>
void velocity_gradients(SimState& s)
{
    const BackgroundGrid& g = s.grid;
    const TensorBasis3D& tb = g.basis;
    for (std::size_t p = 0; p < s.particles.size(); ++p)
    {
        const Stencil& st = s.stencils[p];
        const detail::PlanarWeights<W> pw(st);
        double l[3][3] = {};
        for (int k = 0; k < W; ++k)
        {
            double sx[3] = {}, sy[3] = {}, sn[3] = {};
            for (int j = 0; j < W; ++j)
            {
                const std::size_t row = detail::row_start(tb, st, j, k);
                for (int i = 0; i < W; ++i)
                {
                    const Vec3& v = g.velocity_bar[row + i];
                    for (int a = 0; a < 3; ++a)
                    {
                        sx[a] += v[a] * pw.dx[j][i];
                        sy[a] += v[a] * pw.dy[j][i];
                        sn[a] += v[a] * pw.n[j][i];
                    }
                }
            }
            const double nz = st.val[2][k];
            const double dz = st.der[2][k];
            for (int a = 0; a < 3; ++a)
            {
                l[a][0] += sx[a] * nz;
                l[a][1] += sy[a] * nz;
                l[a][2] += sn[a] * dz;
            }
        }
        Mat3& out = s.particles[p].grad_v;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                out(a, b) = l[a][b];
    }
}

// Divergence projection and the modified velocity gradient, evaluated with
// the start-of-step positions and volumes.
void project_divergence(SimState& s)
{
    const ProjectionGrid& pg = *s.projection;
    const std::size_t np = s.particles.size();
    s.scratch_a.resize(np);
    s.scratch_b.resize(np);
    for (std::size_t p = 0; p < np; ++p)
    {
        s.scratch_a[p] = trace(s.particles[p].grad_v);
        s.scratch_b[p] = s.particles[p].volume;
    }
    const ProjectionField pf = project(s.scratch_a, s.scratch_b, s.projection_stencils, pg, s.volume_cutoff);
    for (std::size_t p = 0; p < np; ++p)
    {
        MaterialPoint& mp = s.particles[p];
        mp.grad_v = modified_velocity_gradient(mp.grad_v, reconstruct(pf, pg, s.projection_stencils[p]));
    }
}

// Steps 12 to 15.
void update_particles(SimState& s, double dt)
{
    double work = 0.0;
    for (std::size_t p = 0; p < s.particles.size(); ++p)
    {
        MaterialPoint& mp = s.particles[p];
        with_context(s, p, [&] {
            const Mat3 old_stress = mp.stress;
            update_deformation_gradient(mp, mp.grad_v, dt);
            update_stress(mp, s.materials[static_cast<std::size_t>(mp.material)], mp.grad_v, dt);
            const Mat3 d = 0.5 * (mp.grad_v + mp.grad_v.transpose());
            work += dt * mp.volume * (0.5 * (old_stress + mp.stress)).cwiseProduct(d).sum();
            if (!mp.stress.allFinite())
                throw NumericError("non-finite stress");
            mp.effective_stress = mp.stress;
        });
    }
    s.internal_energy += work;
}

} // namespace

//---------------------------------------------------------------------------//
SimState make_sim_state(BackgroundGrid grid, ParticleList particles, std::vector<Material> materials,
                        BoundaryConditionSet bcs, const Vec3& body_force,
                        std::vector<TractionLoad> tractions, ProjectionMode projection)
{
    SimState s;
    s.grid = std::move(grid);
    s.particles = std::move(particles);
    s.materials = std::move(materials);
    s.bcs = std::move(bcs);
    s.resolved_bcs = resolve_boundary(s.grid.basis, s.bcs);
    s.body_force = body_force;
    s.tractions = std::move(tractions);

    if (s.materials.empty())
        throw ConfigError("simulation needs at least one material");
    for (std::size_t p = 0; p < s.particles.size(); ++p)
    {
        const int m = s.particles[p].material;
        if (m < 0 || static_cast<std::size_t>(m) >= s.materials.size())
            throw ConfigError("particle " + std::to_string(p) + " references an unknown material");
        if (!s.grid.basis.contains(s.particles[p].x))
            throw ConfigError("particle " + std::to_string(p) + " starts outside the background");
    }

    const int pdeg = projection_degree(s.grid.basis.degree, projection);
    if (pdeg >= 0)
        s.projection = make_projection_grid(s.grid.basis, pdeg);

    for (MaterialPoint& mp : s.particles)
        mp.effective_stress = mp.stress;

    s.point_forces.assign(s.particles.size(), Vec3::Zero());
    for (const TractionLoad& t : s.tractions)
    {
        if (t.particles.empty())
            throw ConfigError("traction load selects no particles");
        const Vec3 share = t.total_force / static_cast<double>(t.particles.size());
        for (std::size_t p : t.particles)
        {
            if (p >= s.particles.size())
                throw ConfigError("traction load references an unknown particle");
            s.point_forces[p] += share;
        }
    }

    s.mass_cutoff = default_mass_cutoff(s.particles);
    std::vector<double> v0(s.particles.size());
    for (std::size_t p = 0; p < s.particles.size(); ++p)
        v0[p] = s.particles[p].volume0;
    s.volume_cutoff = default_volume_cutoff(v0);
    s.stencils.resize(s.particles.size());
    if (s.projection)
        s.projection_stencils.resize(s.particles.size());
    return s;
}

void validate(const TimeControls& tc)
{
    if (!(tc.dt > 0.0) || !std::isfinite(tc.dt))
        throw ConfigError("time step dt must be positive");
    if (!(tc.t_end >= 0.0) || !std::isfinite(tc.t_end))
        throw ConfigError("t_end must be non-negative");
    if (tc.cadence < 1)
        throw ConfigError("output cadence must be at least 1");
}

long step_target(const TimeControls& tc)
{
    const double ratio = tc.t_end / tc.dt;
    const double nearest = std::round(ratio);
    if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest))
        return static_cast<long>(nearest);
    return static_cast<long>(std::ceil(ratio));
}

double cfl_limit(const SimState& state, double cfl_factor)
{
    double c = 0.0;
    for (const Material& m : state.materials)
        c = std::max(c, elastic_part(m).wave_speed());
    const Vec3& h = state.grid.basis.h;
    return cfl_factor * h.minCoeff() / c;
}

void step(SimState& s, const TimeControls& tc)
{
    const double dt = tc.dt;
    if (s.stencils.size() != s.particles.size())
        s.stencils.resize(s.particles.size());
    if (s.projection && s.projection_stencils.size() != s.particles.size())
    {
        s.projection_stencils.resize(s.particles.size());
        s.projection_stencils_current = false;
    }

    compute_stencils(s);
    reset(s.grid);

    const int width = s.grid.basis.degree + 1;
    detail::with_width(width, [&](auto w) { scatter_state<decltype(w)::value>(s); });
    grid_update(s, dt);

    detail::with_width(width, [&](auto w) { move_particles<decltype(w)::value>(s, dt); });
    updated_grid_velocity(s);
    detail::with_width(width, [&](auto w) { velocity_gradients<decltype(w)::value>(s); });

    if (s.projection)
        project_divergence(s);

    update_particles(s, dt);

    if (s.projection)
    {
        for (std::size_t p = 0; p < s.particles.size(); ++p)
            s.projection_stencils[p] = make_stencil(s.projection->basis, s.particles[p].x);
        double_bar_stress(s.particles, *s.projection, s.projection_stencils, s.volume_cutoff);
        s.projection_stencils_current = true;
    }

    ++s.step_count;
    s.time = static_cast<double>(s.step_count) * dt;
}

RunSummary run(SimState& state, const TimeControls& tc, std::span<const Observer> observers)
{
    validate(tc);
    const auto t0 = std::chrono::steady_clock::now();

    const double limit = cfl_limit(state, tc.cfl_factor);
    if (tc.dt > limit)
        std::cerr << "warning: dt = " << tc.dt << " exceeds the CFL estimate " << limit << "\n";

    const long target = step_target(tc);
    RunSummary summary;
    while (state.step_count < target)
    {
        step(state, tc);
        ++summary.steps;
        if (state.step_count % tc.cadence == 0 || state.step_count == target)
            for (const Observer& obs : observers)
                obs(state);
    }

    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    summary.final_time = state.time;
    summary.momentum = total_momentum(state.particles);
    summary.kinetic_energy = kinetic_energy(state.particles);
    summary.internal_energy = state.internal_energy;
    return summary;
}

} // namespace fbarmpm
