//---------------------------------------------------------------------------//
/*!
 * \file fbar.cpp
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/fbar.hpp"

#include "fbarmpm/detail/stencil_loop.hpp"

namespace fbarmpm
{

std::string to_string(ProjectionMode m)
{
    switch (m)
    {
    case ProjectionMode::off:
        return "off";
    case ProjectionMode::constants:
        return "constants";
    case ProjectionMode::pminus1:
        return "pminus1";
    }
    return "off";
}

ProjectionMode parse_projection_mode(const std::string& s)
{
    if (s == "off")
        return ProjectionMode::off;
    if (s == "constants")
        return ProjectionMode::constants;
    if (s == "pminus1")
        return ProjectionMode::pminus1;
    throw ConfigError("unknown projection mode '" + s + "' (expected off, constants or pminus1)");
}

int projection_degree(int main_degree, ProjectionMode mode)
{
    switch (mode)
    {
    case ProjectionMode::off:
        return -1;
    case ProjectionMode::constants:
        return 0;
    case ProjectionMode::pminus1:
        return main_degree - 1;
    }
    return -1;
}

ProjectionGrid make_projection_grid(const TensorBasis3D& main, int degree)
{
    if (degree < 0 || degree >= main.degree)
        throw ConfigError("projection degree must be below the background degree");
    return ProjectionGrid{make_tensor_basis(main.origin, main.extent, main.elements, degree)};
}

double default_volume_cutoff(std::span<const double> volumes, double factor)
{
    if (volumes.empty())
        return 0.0;
    double v = 0.0;
    for (double vi : volumes)
        v += vi;
    return factor * v / static_cast<double>(volumes.size());
}

ProjectionField project(std::span<const double> field, std::span<const double> volumes,
                        std::span<const Stencil> stencils, const ProjectionGrid& pg,
                        double volume_cutoff)
{
    const TensorBasis3D& tb = pg.basis;
    const std::size_t n = tb.n_nodes();
    ProjectionField pf;
    pf.numerator.assign(n, 0.0);
    pf.denominator.assign(n, 0.0);
    pf.values.assign(n, 0.0);
    pf.active.assign(n, false);

    detail::with_width(tb.degree + 1, [&](auto w) {
        constexpr int W = decltype(w)::value;
        for (std::size_t p = 0; p < field.size(); ++p)
        {
            const double qv = field[p] * volumes[p];
            const double vol = volumes[p];
            detail::for_each_value<W>(tb, stencils[p], [&](std::size_t j, double wgt) {
                pf.numerator[j] += wgt * qv;
                pf.denominator[j] += wgt * vol;
            });
        }
    });

    for (std::size_t j = 0; j < n; ++j)
    {
        if (pf.denominator[j] > volume_cutoff)
        {
            pf.values[j] = pf.numerator[j] / pf.denominator[j];
            pf.active[j] = true;
        }
    }
    return pf;
}

ProjectionField project(std::span<const double> field, const ParticleList& particles,
                        const ProjectionGrid& pg, double volume_cutoff)
{
    if (field.size() != particles.size())
        throw ConfigError("projected field size does not match the particle count");
    std::vector<double> volumes(particles.size());
    std::vector<Stencil> stencils(particles.size());
    for (std::size_t p = 0; p < particles.size(); ++p)
    {
        volumes[p] = particles[p].volume;
        stencils[p] = make_stencil(pg.basis, particles[p].x);
    }
    if (volume_cutoff < 0.0)
        volume_cutoff = default_volume_cutoff(volumes);
    return project(field, volumes, stencils, pg, volume_cutoff);
}

double reconstruct(const ProjectionField& pf, const ProjectionGrid& pg, const Stencil& s)
{
    double q = 0.0;
    detail::with_width(s.width, [&](auto w) {
        constexpr int W = decltype(w)::value;
        detail::for_each_value<W>(pg.basis, s,
                                  [&](std::size_t j, double wgt) { q += wgt * pf.values[j]; });
    });
    return q;
}

double reconstruct(const ProjectionField& pf, const ProjectionGrid& pg, const Vec3& x)
{
    return reconstruct(pf, pg, make_stencil(pg.basis, x));
}

Mat3 modified_velocity_gradient(const Mat3& grad_v, double recon_div)
{
    Mat3 out = grad_v;
    const double shift = (recon_div - trace(grad_v)) / 3.0;
    out(0, 0) += shift;
    out(1, 1) += shift;
    out(2, 2) += shift;
    return out;
}

void double_bar_stress(ParticleList& particles, const ProjectionGrid& pg,
                       std::span<const Stencil> stencils, double volume_cutoff)
{
    std::vector<double> hydro(particles.size());
    std::vector<double> volumes(particles.size());
    for (std::size_t p = 0; p < particles.size(); ++p)
    {
        hydro[p] = trace(particles[p].stress) / 3.0;
        volumes[p] = particles[p].volume;
    }
    const ProjectionField pf = project(hydro, volumes, stencils, pg, volume_cutoff);
    for (std::size_t p = 0; p < particles.size(); ++p)
    {
        const double shift = reconstruct(pf, pg, stencils[p]) - hydro[p];
        Mat3& s = particles[p].effective_stress;
        s = particles[p].stress;
        s(0, 0) += shift;
        s(1, 1) += shift;
        s(2, 2) += shift;
    }
}

void double_bar_stress(ParticleList& particles, const ProjectionGrid& pg, double volume_cutoff)
{
    std::vector<Stencil> stencils(particles.size());
    std::vector<double> volumes(particles.size());
    for (std::size_t p = 0; p < particles.size(); ++p)
    {
        stencils[p] = make_stencil(pg.basis, particles[p].x);
        volumes[p] = particles[p].volume;
    }
    if (volume_cutoff < 0.0)
        volume_cutoff = default_volume_cutoff(volumes);
    double_bar_stress(particles, pg, stencils, volume_cutoff);
}

ConstraintRatio constraint_ratio(int degree, int n_sd, bool projection_enabled)
{
    if (degree < 1 || degree > max_degree)
        throw ConfigError("constraint ratio needs degree 1..3");
    if (n_sd < 1 || n_sd > 3)
        throw ConfigError("constraint ratio needs 1..3 spatial dimensions");
    auto ipow = [](int b, int e) {
        int r = 1;
        for (int i = 0; i < e; ++i)
            r *= b;
        return r;
    };
    ConstraintRatio r;
    r.equations = n_sd * ipow(degree, n_sd);
    if (projection_enabled)
    {
        // binomial(degree - 1 + n_sd, n_sd)
        int c = 1;
        for (int i = 1; i <= n_sd; ++i)
            c = c * (degree - 1 + i) / i;
        r.constraints = c;
    }
    else
        r.constraints = ipow(degree + 1, n_sd) - 1;
    return r;
}

} // namespace fbarmpm
