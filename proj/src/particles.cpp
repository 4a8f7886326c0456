//---------------------------------------------------------------------------//
/*!
 * \file particles.cpp
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/particles.hpp"

#include "fbarmpm/detail/stencil_loop.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbarmpm
{

bool mask_contains(const GeometryMask& mask, const Vec3& x)
{
    struct Visitor
    {
        const Vec3& x;
        bool operator()(const NoMask&) const { return true; }
        bool operator()(const PolygonXYMask& m) const
        {
            const std::size_t n = m.vertices.size();
            for (std::size_t i = 0; i < n; ++i)
            {
                const auto& a = m.vertices[i];
                const auto& b = m.vertices[(i + 1) % n];
                const double cross = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
                if (cross < 0.0)
                    return false;
            }
            return true;
        }
        bool operator()(const CylinderZMask& m) const
        {
            const double dx = x[0] - m.center[0];
            const double dy = x[1] - m.center[1];
            return dx * dx + dy * dy <= m.radius * m.radius && x[2] >= m.z_lo && x[2] <= m.z_hi;
        }
    };
    return std::visit(Visitor{x}, mask);
}

ParticleList init_block(const ParticleBlock& block, const BackgroundGrid& grid)
{
    const TensorBasis3D& tb = grid.basis;
    if (!tb.contains(block.box.lo) || !tb.contains(block.box.hi))
        throw ConfigError("particle block box exceeds the background domain");
    for (int a = 0; a < 3; ++a)
    {
        if (!(block.box.lo[a] < block.box.hi[a]))
            throw ConfigError("particle block box is empty");
        if (block.ppc[a] < 1)
            throw ConfigError("particles per cell must be positive");
    }
    if (!(block.density > 0.0))
        throw ConfigError("particle block density must be positive");
    if (const auto* poly = std::get_if<PolygonXYMask>(&block.mask); poly && poly->vertices.size() < 3)
        throw ConfigError("polygon mask needs at least three vertices");

    std::array<int, 3> c_lo{};
    std::array<int, 3> c_hi{};
    for (int a = 0; a < 3; ++a)
    {
        c_lo[a] = static_cast<int>(std::floor((block.box.lo[a] - tb.origin[a]) / tb.h[a]));
        c_hi[a] = static_cast<int>(std::ceil((block.box.hi[a] - tb.origin[a]) / tb.h[a]));
        c_lo[a] = std::clamp(c_lo[a], 0, tb.elements[a] - 1);
        c_hi[a] = std::clamp(c_hi[a], c_lo[a] + 1, tb.elements[a]);
    }

    const int per_cell = block.ppc[0] * block.ppc[1] * block.ppc[2];
    const double v0 = tb.cell_volume() / per_cell;
    const double m0 = block.density * v0;

    ParticleList out;
    // Cell-major ordering keeps the particles of one cell contiguous.
    for (int ck = c_lo[2]; ck < c_hi[2]; ++ck)
        for (int cj = c_lo[1]; cj < c_hi[1]; ++cj)
            for (int ci = c_lo[0]; ci < c_hi[0]; ++ci)
                for (int sk = 0; sk < block.ppc[2]; ++sk)
                    for (int sj = 0; sj < block.ppc[1]; ++sj)
                        for (int si = 0; si < block.ppc[0]; ++si)
                        {
                            const Vec3 x(tb.origin[0] + (ci + (si + 0.5) / block.ppc[0]) * tb.h[0],
                                         tb.origin[1] + (cj + (sj + 0.5) / block.ppc[1]) * tb.h[1],
                                         tb.origin[2] + (ck + (sk + 0.5) / block.ppc[2]) * tb.h[2]);
                            if (!block.box.contains(x) || !mask_contains(block.mask, x))
                                continue;
                            MaterialPoint mp;
                            mp.mass = m0;
                            mp.volume0 = v0;
                            mp.volume = v0;
                            mp.x = x;
                            mp.x0 = x;
                            mp.material = block.material;
                            out.push_back(mp);
                        }
    return out;
}

void update_particle_kinematics(MaterialPoint& mp, const BackgroundGrid& grid, const Stencil& s,
                                double dt)
{
    Vec3 a = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    detail::with_width(s.width, [&](auto w) {
        constexpr int W = decltype(w)::value;
        detail::for_each_value<W>(grid.basis, s, [&](std::size_t n, double wgt) {
            const Vec3& an = grid.accel[n];
            const Vec3& vn = grid.velocity[n];
            for (int c = 0; c < 3; ++c)
            {
                a[c] += wgt * an[c];
                v[c] += wgt * vn[c];
            }
        });
    });
    mp.v += dt * a;
    mp.x += dt * v;
    if (!grid.basis.contains(mp.x) || !mp.x.allFinite())
    {
        std::ostringstream os;
        os.precision(17);
        os << "material point left the background domain at (" << mp.x[0] << ", " << mp.x[1] << ", "
           << mp.x[2] << ")";
        throw OutOfDomainError(os.str());
    }
}

void update_particle_kinematics(MaterialPoint& mp, const BackgroundGrid& grid, double dt)
{
    update_particle_kinematics(mp, grid, make_stencil(grid.basis, mp.x), dt);
}

void update_deformation_gradient(MaterialPoint& mp, const Mat3& grad_v, double dt)
{
    const Mat3 inc = Mat3::Identity() + dt * grad_v;
    const Mat3 f_new = inc * mp.F;
    const double j = f_new.determinant();
    if (!(j > 0.0) || !std::isfinite(j))
    {
        std::ostringstream os;
        os.precision(17);
        os << "inverted or degenerate material point: det(F) = " << j << " at (" << mp.x[0] << ", "
           << mp.x[1] << ", " << mp.x[2] << ")";
        throw NumericError(os.str());
    }
    mp.F = f_new;
    mp.volume = j * mp.volume0;
}

double total_mass(const ParticleList& particles)
{
    double m = 0.0;
    for (const MaterialPoint& mp : particles)
        m += mp.mass;
    return m;
}

Vec3 total_momentum(const ParticleList& particles)
{
    Vec3 p = Vec3::Zero();
    for (const MaterialPoint& mp : particles)
        p += mp.mass * mp.v;
    return p;
}

double kinetic_energy(const ParticleList& particles)
{
    double e = 0.0;
    for (const MaterialPoint& mp : particles)
        e += 0.5 * mp.mass * mp.v.squaredNorm();
    return e;
}

} // namespace fbarmpm
