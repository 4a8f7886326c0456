//---------------------------------------------------------------------------//
/*!
 * \file splines.cpp
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/splines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fbarmpm
{

namespace
{

// Cox-de Boor triangle for the nonzero functions on knot span `span`
// (knots[span] <= x < knots[span+1]), plus first derivatives. The lower
// triangle of ndu keeps the knot differences reused by the derivative.
void cox_de_boor(const double* knots, int span, int p, double x, double* values, double* derivs)
{
    double ndu[max_width][max_width];
    double left[max_width];
    double right[max_width];

    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j)
    {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r)
        {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[r][j - 1] / ndu[j][r];
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    for (int r = 0; r <= p; ++r)
        values[r] = ndu[r][p];

    if (p == 0)
    {
        derivs[0] = 0.0;
        return;
    }
    for (int r = 0; r <= p; ++r)
    {
        double d = 0.0;
        if (r >= 1)
            d += ndu[r - 1][p - 1] / ndu[p][r - 1];
        if (r <= p - 1)
            d -= ndu[r][p - 1] / ndu[p][r];
        derivs[r] = p * d;
    }
}

std::string describe_point(const Vec3& x)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << x[0] << ", " << x[1] << ", " << x[2] << ")";
    return os.str();
}

// Cox-de Boor recursion carried out on polynomial coefficients in
// u = xi - e, for each element e of a parametric knot vector.
std::vector<double> element_polynomials(const KnotVector& kv)
{
    const int p = kv.degree;
    const int w = p + 1;
    const double* t = kv.knots.data();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(kv.n_elements() * w * w));
    for (int e = 0; e < kv.n_elements(); ++e)
    {
        const int span = e + p;
        const double xe = t[span];
        // n[q] holds N_{span - k + q, k} at the current degree k.
        double n[max_width][max_width] = {{1.0}};
        for (int k = 1; k <= p; ++k)
        {
            double next[max_width][max_width] = {};
            for (int q = 0; q <= k; ++q)
            {
                const int i = span - k + q;
                if (q >= 1 && t[i + k] > t[i])
                {
                    const double inv = 1.0 / (t[i + k] - t[i]);
                    for (int m = 0; m < k; ++m)
                    {
                        next[q][m + 1] += n[q - 1][m] * inv;
                        next[q][m] += n[q - 1][m] * (xe - t[i]) * inv;
                    }
                }
                if (q < k && t[i + k + 1] > t[i + 1])
                {
                    const double inv = 1.0 / (t[i + k + 1] - t[i + 1]);
                    for (int m = 0; m < k; ++m)
                    {
                        next[q][m + 1] -= n[q][m] * inv;
                        next[q][m] += n[q][m] * (t[i + k + 1] - xe) * inv;
                    }
                }
            }
            std::copy(&next[0][0], &next[0][0] + max_width * max_width, &n[0][0]);
        }
        for (int r = 0; r < w; ++r)
            out.insert(out.end(), n[r], n[r] + w);
    }
    return out;
}

} // namespace

//---------------------------------------------------------------------------//
KnotVector make_uniform_knots(int n_elements, int degree, double x_min, double x_max)
{
    if (degree < 0 || degree > max_degree)
        throw ConfigError("B-spline degree must be in 0..3, got " + std::to_string(degree));
    if (n_elements < 1)
        throw ConfigError("knot vector needs at least one element");
    if (!(x_min < x_max))
        throw ConfigError("knot vector domain is empty");

    KnotVector kv;
    kv.degree = degree;
    kv.n_basis = n_elements + degree;
    kv.knots.reserve(static_cast<std::size_t>(n_elements + 2 * degree + 1));
    for (int i = 0; i < degree; ++i)
        kv.knots.push_back(x_min);
    const double h = (x_max - x_min) / n_elements;
    for (int e = 0; e <= n_elements; ++e)
        kv.knots.push_back(e == n_elements ? x_max : x_min + e * h);
    for (int i = 0; i < degree; ++i)
        kv.knots.push_back(x_max);
    return kv;
}

KnotVector make_open_uniform_knots(int n_elements, int degree, double x_min, double x_max)
{
    if (degree < 1 || degree > max_degree)
        throw ConfigError("background degree must be in 1..3, got " + std::to_string(degree));
    return make_uniform_knots(n_elements, degree, x_min, x_max);
}

BasisEvaluation eval_basis_1d(const KnotVector& kv, double x)
{
    if (!(x >= kv.lower() && x <= kv.upper()))
    {
        std::ostringstream os;
        os.precision(17);
        os << "point " << x << " outside basis domain [" << kv.lower() << ", " << kv.upper() << "]";
        throw OutOfDomainError(os.str());
    }
    const int p = kv.degree;
    // Last span index owning a nonempty interval.
    const int last = kv.n_basis - 1;
    int span = last;
    if (x < kv.upper())
    {
        auto it = std::upper_bound(kv.knots.begin() + p, kv.knots.begin() + last + 1, x);
        span = static_cast<int>(it - kv.knots.begin()) - 1;
    }
    BasisEvaluation ev;
    ev.first_index = span - p;
    ev.count = p + 1;
    cox_de_boor(kv.knots.data(), span, p, x, ev.values.data(), ev.derivs.data());
    return ev;
}

//---------------------------------------------------------------------------//
TensorBasis3D make_tensor_basis(const Vec3& origin, const Vec3& extent, const Index3& elements,
                                int degree)
{
    TensorBasis3D tb;
    tb.degree = degree;
    tb.origin = origin;
    tb.extent = extent;
    tb.elements = elements;
    for (int a = 0; a < 3; ++a)
    {
        if (!(extent[a] > 0.0))
            throw ConfigError("background extent must be positive on every axis");
        if (elements[a] < 1)
            throw ConfigError("background needs at least one element per axis");
        tb.axes[a] = make_uniform_knots(elements[a], degree, 0.0, static_cast<double>(elements[a]));
        tb.h[a] = extent[a] / elements[a];
        tb.poly[a] = element_polynomials(tb.axes[a]);
    }
    return tb;
}

Index3 TensorBasis3D::unflatten(std::size_t idx) const
{
    const auto nx = static_cast<std::size_t>(axes[0].n_basis);
    const auto ny = static_cast<std::size_t>(axes[1].n_basis);
    return {static_cast<int>(idx % nx), static_cast<int>((idx / nx) % ny),
            static_cast<int>(idx / (nx * ny))};
}

bool TensorBasis3D::contains(const Vec3& x) const
{
    for (int a = 0; a < 3; ++a)
        if (!(x[a] >= origin[a] && x[a] <= origin[a] + extent[a]))
            return false;
    return true;
}

double TensorBasis3D::greville(int axis, int i) const
{
    const KnotVector& kv = axes[axis];
    double xi = 0.0;
    if (kv.degree == 0)
        xi = i + 0.5;
    else
    {
        for (int k = 1; k <= kv.degree; ++k)
            xi += kv.knots[static_cast<std::size_t>(i + k)];
        xi /= kv.degree;
    }
    return origin[axis] + xi * h[axis];
}

namespace
{

template <int P>
void fill_stencil(const TensorBasis3D& tb, const Vec3& x, Stencil& s)
{
    constexpr int w = P + 1;
    for (int a = 0; a < 3; ++a)
    {
        const int n = tb.elements[a];
        const double xi = std::clamp((x[a] - tb.origin[a]) / tb.h[a], 0.0, static_cast<double>(n));
        const int e = std::min(static_cast<int>(xi), n - 1);
        s.first[a] = e;
        const double u = xi - e;
        const double inv_h = 1.0 / tb.h[a];
        const double* c = tb.poly[a].data() + static_cast<std::size_t>(e * w * w);
        for (int r = 0; r < w; ++r, c += w)
        {
            double v = c[P];
            double d = 0.0;
            for (int m = P - 1; m >= 0; --m)
            {
                d = d * u + v;
                v = v * u + c[m];
            }
            s.val[a][r] = v;
            s.der[a][r] = d * inv_h;
        }
    }
}

} // namespace

Stencil make_stencil(const TensorBasis3D& tb, const Vec3& x)
{
    if (!tb.contains(x))
        throw OutOfDomainError("point " + describe_point(x) + " outside background domain");

    Stencil s;
    s.width = tb.degree + 1;
    switch (tb.degree)
    {
    case 0:
        fill_stencil<0>(tb, x, s);
        break;
    case 1:
        fill_stencil<1>(tb, x, s);
        break;
    case 2:
        fill_stencil<2>(tb, x, s);
        break;
    default:
        fill_stencil<3>(tb, x, s);
        break;
    }
    return s;
}

Basis3DEvaluation eval_basis_3d(const TensorBasis3D& tb, const Vec3& x)
{
    const Stencil s = make_stencil(tb, x);
    const int w = s.width;
    Basis3DEvaluation out;
    const auto n = static_cast<std::size_t>(w * w * w);
    out.indices.reserve(n);
    out.values.reserve(n);
    out.gradients.reserve(n);
    for (int k = 0; k < w; ++k)
        for (int j = 0; j < w; ++j)
            for (int i = 0; i < w; ++i)
            {
                out.indices.push_back(tb.flat(s.first[0] + i, s.first[1] + j, s.first[2] + k));
                out.values.push_back(s.val[0][i] * s.val[1][j] * s.val[2][k]);
                out.gradients.emplace_back(s.der[0][i] * s.val[1][j] * s.val[2][k],
                                           s.val[0][i] * s.der[1][j] * s.val[2][k],
                                           s.val[0][i] * s.val[1][j] * s.der[2][k]);
            }
    return out;
}

} // namespace fbarmpm
