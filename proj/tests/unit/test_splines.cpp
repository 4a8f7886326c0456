#include "fbarmpm/splines.hpp"

#include <doctest.h>

#include <random>

using namespace fbarmpm;

namespace
{

// Textbook recursive Cox-de Boor with the 0/0 = 0 convention. Right endpoint
// handled by the usual "last nonempty interval is closed" rule.
double cox_de_boor(const std::vector<double>& k, int i, int p, double x)
{
    if (p == 0)
    {
        if (k[i] <= x && x < k[i + 1])
            return 1.0;
        if (x == k.back() && k[i] < k[i + 1] && k[i + 1] == k.back())
            return 1.0;
        return 0.0;
    }
    double out = 0.0;
    if (k[i + p] > k[i])
        out += (x - k[i]) / (k[i + p] - k[i]) * cox_de_boor(k, i, p - 1, x);
    if (k[i + p + 1] > k[i + 1])
        out += (k[i + p + 1] - x) / (k[i + p + 1] - k[i + 1]) * cox_de_boor(k, i + 1, p - 1, x);
    return out;
}

double value_at(const BasisEvaluation& be, int i)
{
    const int r = i - be.first_index;
    return (r >= 0 && r < be.count) ? be.values[r] : 0.0;
}

} // namespace

TEST_CASE("open uniform knots")
{
    SUBCASE("linear")
    {
        const KnotVector kv = make_open_uniform_knots(2, 1, 0.0, 2.0);
        CHECK(kv.knots == std::vector<double>{0, 0, 1, 2, 2});
        CHECK(kv.n_basis == 3);
    }
    SUBCASE("quadratic")
    {
        const KnotVector kv = make_open_uniform_knots(2, 2, 0.0, 2.0);
        CHECK(kv.knots == std::vector<double>{0, 0, 0, 1, 2, 2, 2});
        CHECK(kv.n_basis == 4);
    }
    SUBCASE("single element cubic")
    {
        const KnotVector kv = make_open_uniform_knots(1, 3, 0.0, 1.0);
        CHECK(kv.knots == std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1});
        CHECK(kv.n_basis == 4);
    }
    SUBCASE("structure")
    {
        for (int p = 1; p <= 3; ++p)
            for (int n = 1; n <= 7; ++n)
            {
                const KnotVector kv = make_open_uniform_knots(n, p, -1.5, 4.0);
                REQUIRE(kv.knots.size() == static_cast<std::size_t>(kv.n_basis + p + 1));
                CHECK(kv.n_elements() == n);
                for (std::size_t i = 1; i < kv.knots.size(); ++i)
                    CHECK(kv.knots[i] >= kv.knots[i - 1]);
                for (int r = 0; r <= p; ++r)
                {
                    CHECK(kv.knots[r] == -1.5);
                    CHECK(kv.knots[kv.knots.size() - 1 - r] == 4.0);
                }
                CHECK(kv.knots[p + 1] > -1.5);
            }
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS(make_open_uniform_knots(0, 2, 0.0, 1.0), ConfigError);
        CHECK_THROWS_AS(make_open_uniform_knots(3, 0, 0.0, 1.0), ConfigError);
        CHECK_THROWS_AS(make_open_uniform_knots(3, 4, 0.0, 1.0), ConfigError);
        CHECK_THROWS_AS(make_open_uniform_knots(3, 2, 1.0, 1.0), ConfigError);
        CHECK_THROWS_AS(make_open_uniform_knots(3, 2, 2.0, 1.0), ConfigError);
    }
}

TEST_CASE("1d basis hand values")
{
    const KnotVector lin = make_open_uniform_knots(4, 1, 0.0, 4.0);
    BasisEvaluation be = eval_basis_1d(lin, 2.5);
    CHECK(be.count == 2);
    CHECK(be.first_index == 2);
    CHECK(be.values[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(be.values[1] == doctest::Approx(0.5).epsilon(1e-15));

    // Interior element [2,3] of 5 on the open quadratic vector.
    const KnotVector quad = make_open_uniform_knots(5, 2, 0.0, 5.0);
    be = eval_basis_1d(quad, 2.5);
    REQUIRE(be.count == 3);
    CHECK(be.values[0] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(be.values[1] == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(be.values[2] == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(be.derivs[0] == doctest::Approx(-0.5));
    CHECK(be.derivs[1] == doctest::Approx(0.0));
    CHECK(be.derivs[2] == doctest::Approx(0.5));

    // Bernstein cubic at the midpoint: (1, 3, 3, 1) / 8.
    const KnotVector cub = make_open_uniform_knots(1, 3, 0.0, 1.0);
    be = eval_basis_1d(cub, 0.5);
    CHECK(be.values[0] == doctest::Approx(0.125));
    CHECK(be.values[1] == doctest::Approx(0.375));
    CHECK(be.values[2] == doctest::Approx(0.375));
    CHECK(be.values[3] == doctest::Approx(0.125));
}

TEST_CASE("1d basis matches recursive oracle")
{
    std::mt19937_64 rng(7);
    for (int p = 1; p <= 3; ++p)
    {
        const KnotVector kv = make_open_uniform_knots(6, p, -2.0, 1.0);
        std::uniform_real_distribution<double> u(kv.lower(), kv.upper());
        std::vector<double> xs{kv.lower(), kv.upper(), -1.5, 0.0};
        for (int s = 0; s < 200; ++s)
            xs.push_back(u(rng));
        for (double x : xs)
        {
            const BasisEvaluation be = eval_basis_1d(kv, x);
            CHECK(be.count == p + 1);
            double sum = 0.0;
            double dsum = 0.0;
            for (int i = 0; i < kv.n_basis; ++i)
            {
                const double ref = cox_de_boor(kv.knots, i, p, x);
                CHECK(value_at(be, i) == doctest::Approx(ref).epsilon(1e-12));
            }
            for (int r = 0; r < be.count; ++r)
            {
                CHECK(be.values[r] >= 0.0);
                sum += be.values[r];
                dsum += be.derivs[r];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            CHECK(std::abs(dsum) <= 1e-10);
        }
    }
}

TEST_CASE("1d basis domain")
{
    const KnotVector kv = make_open_uniform_knots(3, 2, 0.0, 3.0);
    CHECK_THROWS_AS(eval_basis_1d(kv, -1e-9), OutOfDomainError);
    CHECK_THROWS_AS(eval_basis_1d(kv, 3.0 + 1e-9), OutOfDomainError);
    CHECK_THROWS_AS(eval_basis_1d(kv, std::nan("")), OutOfDomainError);
    // Open vectors interpolate at the ends.
    BasisEvaluation be = eval_basis_1d(kv, 0.0);
    CHECK(be.first_index == 0);
    CHECK(be.values[0] == 1.0);
    be = eval_basis_1d(kv, 3.0);
    CHECK(be.first_index + be.count == kv.n_basis);
    CHECK(be.values[be.count - 1] == 1.0);
    // Interior knot belongs to the element on its right.
    be = eval_basis_1d(kv, 1.0);
    CHECK(be.first_index == 1);
}

TEST_CASE("tensor basis")
{
    const TensorBasis3D tb = make_tensor_basis(Vec3(0, 0, 0), Vec3(2, 2, 2), {2, 2, 2}, 1);
    const Basis3DEvaluation e = eval_basis_3d(tb, Vec3(0.5, 0.5, 0.5));
    REQUIRE(e.values.size() == 8);
    for (double v : e.values)
        CHECK(v == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(tb.n_nodes() == 27);
    CHECK(tb.flat(1, 0, 0) == 1);
    CHECK(tb.flat(0, 1, 0) == 3);
    CHECK(tb.flat(0, 0, 1) == 9);
    CHECK(tb.unflatten(tb.flat(2, 1, 2)) == Index3{2, 1, 2});
    CHECK_THROWS_AS(eval_basis_3d(tb, Vec3(0.5, 2.5, 0.5)), OutOfDomainError);
    CHECK_THROWS_AS(make_tensor_basis(Vec3::Zero(), Vec3(1, -1, 1), {1, 1, 1}, 2), ConfigError);
}

TEST_CASE("tensor basis properties at random points")
{
    std::mt19937_64 rng(11);
    const Vec3 origin(-1.0, 0.5, 2.0);
    const Vec3 extent(3.0, 2.0, 1.5);
    const Index3 elements{6, 4, 3};
    for (int p = 1; p <= 3; ++p)
    {
        const TensorBasis3D tb = make_tensor_basis(origin, extent, elements, p);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst_fd = 0.0;
        for (int s = 0; s < 1000; ++s)
        {
            const Vec3 x = origin + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(extent);
            const Basis3DEvaluation e = eval_basis_3d(tb, x);
            REQUIRE(e.values.size() == static_cast<std::size_t>((p + 1) * (p + 1) * (p + 1)));
            double sum = 0.0;
            Vec3 gsum = Vec3::Zero();
            for (std::size_t a = 0; a < e.values.size(); ++a)
            {
                CHECK(e.values[a] >= 0.0);
                sum += e.values[a];
                gsum += e.gradients[a];
            }
            CHECK(std::abs(sum - 1.0) <= 1e-12);
            CHECK(gsum.cwiseAbs().maxCoeff() <= 1e-10);

            if (s % 10 != 0)
                continue;
            // Central differences with step 1e-6 h; skip points whose stencil
            // would straddle a knot line, where higher derivatives jump.
            for (int axis = 0; axis < 3; ++axis)
            {
                const double d = 1e-6 * tb.h[axis];
                const double xi = (x[axis] - origin[axis]) / tb.h[axis];
                const double frac = xi - std::floor(xi);
                if (frac < 1e-5 || frac > 1 - 1e-5)
                    continue;
                Vec3 xp = x, xm = x;
                xp[axis] += d;
                xm[axis] -= d;
                const Basis3DEvaluation ep = eval_basis_3d(tb, xp);
                const Basis3DEvaluation em = eval_basis_3d(tb, xm);
                REQUIRE(ep.indices == e.indices);
                REQUIRE(em.indices == e.indices);
                double scale = 0.0;
                for (const Vec3& g : e.gradients)
                    scale = std::max(scale, std::abs(g[axis]));
                for (std::size_t a = 0; a < e.values.size(); ++a)
                {
                    const double fd = (ep.values[a] - em.values[a]) / (2 * d);
                    worst_fd = std::max(worst_fd, std::abs(fd - e.gradients[a][axis]) / scale);
                }
            }
        }
        CHECK(worst_fd <= 1e-5);
    }
}

TEST_CASE("linear reproduction")
{
    // Control values of a linear field are its values at the Greville points.
    const Vec3 a(0.3, -1.2, 2.5);
    const double b = 0.7;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 1; p <= 3; ++p)
    {
        const TensorBasis3D tb = make_tensor_basis(Vec3(1, 2, 3), Vec3(4, 2, 3), {5, 3, 4}, p);
        std::vector<double> ctrl(tb.n_nodes());
        for (std::size_t n = 0; n < ctrl.size(); ++n)
        {
            const Index3 ijk = tb.unflatten(n);
            const Vec3 g(tb.greville(0, ijk[0]), tb.greville(1, ijk[1]), tb.greville(2, ijk[2]));
            ctrl[n] = a.dot(g) + b;
        }
        for (int s = 0; s < 100; ++s)
        {
            const Vec3 x = tb.origin + Vec3(u(rng), u(rng), u(rng)).cwiseProduct(tb.extent);
            const Basis3DEvaluation e = eval_basis_3d(tb, x);
            double f = 0.0;
            Vec3 g = Vec3::Zero();
            for (std::size_t k = 0; k < e.indices.size(); ++k)
            {
                f += e.values[k] * ctrl[e.indices[k]];
                g += e.gradients[k] * ctrl[e.indices[k]];
            }
            CHECK(std::abs(f - (a.dot(x) + b)) <= 1e-10);
            CHECK((g - a).norm() <= 1e-10);
        }
    }
}

TEST_CASE("stencil agrees with dense evaluation")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int p = 1; p <= 3; ++p)
    {
        const TensorBasis3D tb = make_tensor_basis(Vec3::Zero(), Vec3(3, 3, 3), {3, 3, 3}, p);
        for (int s = 0; s < 50; ++s)
        {
            const Vec3 x = Vec3(u(rng), u(rng), u(rng)) * 3.0;
            const Stencil st = make_stencil(tb, x);
            CHECK(st.width == p + 1);
            for (int axis = 0; axis < 3; ++axis)
            {
                const BasisEvaluation be = eval_basis_1d(tb.axes[axis], (x[axis] - tb.origin[axis]) / tb.h[axis]);
                CHECK(st.first[axis] == be.first_index);
                for (int r = 0; r < st.width; ++r)
                {
                    CHECK(st.val[axis][r] == doctest::Approx(be.values[r]).epsilon(1e-13));
                    CHECK(st.der[axis][r] == doctest::Approx(be.derivs[r] / tb.h[axis]).epsilon(1e-12));
                }
            }
        }
    }
}

TEST_CASE("greville abscissae")
{
    const TensorBasis3D tb = make_tensor_basis(Vec3::Zero(), Vec3(4, 1, 1), {4, 1, 1}, 2);
    CHECK(tb.greville(0, 0) == doctest::Approx(0.0));
    CHECK(tb.greville(0, 1) == doctest::Approx(0.5));
    CHECK(tb.greville(0, 2) == doctest::Approx(1.5));
    CHECK(tb.greville(0, 5) == doctest::Approx(4.0));
}
