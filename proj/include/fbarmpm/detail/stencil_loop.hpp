//---------------------------------------------------------------------------//
/*!
 * \file stencil_loop.hpp
 * \brief Compile-time sized loops over the support of a Stencil.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_DETAIL_STENCIL_LOOP_HPP
#define FBARMPM_DETAIL_STENCIL_LOOP_HPP

#include "fbarmpm/splines.hpp"

#include <type_traits>

namespace fbarmpm::detail
{

template <class Fn>
decltype(auto) with_width(int width, Fn&& fn)
{
    switch (width)
    {
    case 1:
        return fn(std::integral_constant<int, 1>{});
    case 2:
        return fn(std::integral_constant<int, 2>{});
    case 3:
        return fn(std::integral_constant<int, 3>{});
    default:
        return fn(std::integral_constant<int, 4>{});
    }
}

//! fn(node, weight) over the W^3 supported control points, k-j-i order.
template <int W, class Fn>
inline void for_each_value(const TensorBasis3D& tb, const Stencil& s, Fn&& fn)
{
    const std::size_t nx = static_cast<std::size_t>(tb.axes[0].n_basis);
    const std::size_t nxy = nx * static_cast<std::size_t>(tb.axes[1].n_basis);
    const std::size_t base = tb.flat(s.first[0], s.first[1], s.first[2]);
    double nxy_w[W][W];
    for (int j = 0; j < W; ++j)
        for (int i = 0; i < W; ++i)
            nxy_w[j][i] = s.val[0][i] * s.val[1][j];
    for (int k = 0; k < W; ++k)
    {
        const double nz = s.val[2][k];
        for (int j = 0; j < W; ++j)
        {
            const std::size_t row = base + k * nxy + j * nx;
            for (int i = 0; i < W; ++i)
                fn(row + i, nxy_w[j][i] * nz);
        }
    }
}

//! fn(node, weight, gradient) over the W^3 supported control points.
template <int W, class Fn>
inline void for_each_weight(const TensorBasis3D& tb, const Stencil& s, Fn&& fn)
{
    const std::size_t nx = static_cast<std::size_t>(tb.axes[0].n_basis);
    const std::size_t nxy = nx * static_cast<std::size_t>(tb.axes[1].n_basis);
    const std::size_t base = tb.flat(s.first[0], s.first[1], s.first[2]);
    double nxy_w[W][W];
    double dx_w[W][W];
    double dy_w[W][W];
    for (int j = 0; j < W; ++j)
        for (int i = 0; i < W; ++i)
        {
            nxy_w[j][i] = s.val[0][i] * s.val[1][j];
            dx_w[j][i] = s.der[0][i] * s.val[1][j];
            dy_w[j][i] = s.val[0][i] * s.der[1][j];
        }
    for (int k = 0; k < W; ++k)
    {
        const double nz = s.val[2][k];
        const double dz = s.der[2][k];
        for (int j = 0; j < W; ++j)
        {
            const std::size_t row = base + k * nxy + j * nx;
            for (int i = 0; i < W; ++i)
            {
                const Vec3 grad(dx_w[j][i] * nz, dy_w[j][i] * nz, nxy_w[j][i] * dz);
                fn(row + i, nxy_w[j][i] * nz, grad);
            }
        }
    }
}

//! In-plane factors of a stencil, shared by its W z-layers.
template <int W>
struct PlanarWeights
{
    double n[W][W];
    double dx[W][W];
    double dy[W][W];

    explicit PlanarWeights(const Stencil& s)
    {
        for (int j = 0; j < W; ++j)
            for (int i = 0; i < W; ++i)
            {
                n[j][i] = s.val[0][i] * s.val[1][j];
                dx[j][i] = s.der[0][i] * s.val[1][j];
                dy[j][i] = s.val[0][i] * s.der[1][j];
            }
    }
};

//! First control point of row (j, k) of a stencil.
inline std::size_t row_start(const TensorBasis3D& tb, const Stencil& s, int j, int k)
{
    return tb.flat(s.first[0], s.first[1] + j, s.first[2] + k);
}

} // namespace fbarmpm::detail

#endif // FBARMPM_DETAIL_STENCIL_LOOP_HPP
