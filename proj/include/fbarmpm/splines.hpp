//---------------------------------------------------------------------------//
/*!
 * \file splines.hpp
 * \brief Open uniform B-spline bases and their tensor products on
 *        axis-aligned background grids.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_SPLINES_HPP
#define FBARMPM_SPLINES_HPP

#include "fbarmpm/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace fbarmpm
{

constexpr int max_degree = 3;
constexpr int max_width = max_degree + 1;

//---------------------------------------------------------------------------//
/*!
 * \brief 1D knot vector.
 *
 * Holds n_basis + degree + 1 non-decreasing knots. Open vectors repeat the
 * end values degree+1 times. Degree 0 (piecewise constants, one knot per
 * element boundary) is only used for projection spaces.
 */
struct KnotVector
{
    int degree = 0;
    int n_basis = 0;
    std::vector<double> knots;

    int n_elements() const { return n_basis - degree; }
    double lower() const { return knots.front(); }
    double upper() const { return knots.back(); }
};

//! Nonzero window of a 1D basis at one point.
struct BasisEvaluation
{
    int first_index = 0;
    int count = 0;
    std::array<double, max_width> values{};
    std::array<double, max_width> derivs{};

    std::span<const double> value_span() const { return {values.data(), static_cast<std::size_t>(count)}; }
    std::span<const double> deriv_span() const { return {derivs.data(), static_cast<std::size_t>(count)}; }
};

/*!
 * Open knot vector with n_elements equal intervals on [x_min, x_max].
 * Throws ConfigError unless n_elements >= 1, 1 <= degree <= 3 and
 * x_min < x_max.
 */
KnotVector make_open_uniform_knots(int n_elements, int degree, double x_min, double x_max);

//! Same as make_open_uniform_knots but also accepts degree 0.
KnotVector make_uniform_knots(int n_elements, int degree, double x_min, double x_max);

/*!
 * Cox-de Boor evaluation of the degree+1 nonzero basis functions and their
 * first derivatives at x. Elements are half-open [k_i, k_i+1) except the last,
 * which also owns the right endpoint. Throws OutOfDomainError outside
 * [lower, upper].
 */
BasisEvaluation eval_basis_1d(const KnotVector& kv, double x);

//---------------------------------------------------------------------------//
/*!
 * \brief Tensor-product B-spline basis on a uniform Cartesian background.
 *
 * Each axis carries a knot vector in parametric (element) units, so the
 * physical map is xi = (x - origin) / h.
 */
struct TensorBasis3D
{
    int degree = 1;
    std::array<KnotVector, 3> axes;
    Vec3 origin = Vec3::Zero();
    Vec3 extent = Vec3::Ones();
    Vec3 h = Vec3::Ones();
    Index3 elements{1, 1, 1};
    //! Per axis, the p + 1 nonzero basis functions of every element as
    //! polynomials in the local coordinate u = xi - e in [0, 1]:
    //! poly[a][(e * (p + 1) + r) * (p + 1) + m] multiplies u^m.
    std::array<std::vector<double>, 3> poly;

    int n_basis(int axis) const { return axes[axis].n_basis; }
    std::size_t n_nodes() const
    {
        return static_cast<std::size_t>(axes[0].n_basis) * axes[1].n_basis * axes[2].n_basis;
    }
    //! Flat x-fastest lexicographic control point index.
    std::size_t flat(int i, int j, int k) const
    {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(axes[0].n_basis) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(axes[1].n_basis) * k);
    }
    Index3 unflatten(std::size_t idx) const;
    Vec3 upper() const { return origin + extent; }
    bool contains(const Vec3& x) const;
    double cell_volume() const { return h[0] * h[1] * h[2]; }
    //! Greville abscissa of control point i on the given axis (physical units).
    double greville(int axis, int i) const;
};

//! Build a tensor basis of the given degree (0..3) on the box
//! [origin, origin + extent] split into `elements` cells.
TensorBasis3D make_tensor_basis(const Vec3& origin, const Vec3& extent, const Index3& elements,
                                int degree);

//---------------------------------------------------------------------------//
/*!
 * \brief Per-axis basis data for one point; the tensor product is formed on
 *        the fly.
 *
 * Values multiply as (Nx * Ny) * Nz and gradient components as
 * ((dNx * Ny) * Nz, (Nx * dNy) * Nz, (Nx * Ny) * dNz) everywhere in the code,
 * so every transfer sees bit-identical weights.
 */
struct Stencil
{
    int width = 0;
    Index3 first{0, 0, 0};
    std::array<std::array<double, max_width>, 3> val{};
    std::array<std::array<double, max_width>, 3> der{};
};

//! Throws OutOfDomainError if x is outside the background.
Stencil make_stencil(const TensorBasis3D& tb, const Vec3& x);

//! Dense listing of the (p+1)^3 supported control points.
struct Basis3DEvaluation
{
    std::vector<std::size_t> indices;
    std::vector<double> values;
    std::vector<Vec3> gradients;
};

Basis3DEvaluation eval_basis_3d(const TensorBasis3D& tb, const Vec3& x);

} // namespace fbarmpm

#endif // FBARMPM_SPLINES_HPP
