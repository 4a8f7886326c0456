#include "fbarmpm/constitutive.hpp"

#include <doctest.h>

#include <Eigen/Geometry>

#include <random>

using namespace fbarmpm;

namespace
{

double frob(const Mat3& a) { return std::sqrt(a.cwiseProduct(a).sum()); }

// Consistency parameter by bisection on the same scalar equation.
double bisect_delta_gamma(double s_norm, double eps_p, const J2Params& p)
{
    const double c = std::sqrt(2.0 / 3.0);
    auto g = [&](double dg) { return s_norm - 2.0 * p.elastic.mu * dg - c * p.flow_stress(eps_p + c * dg); };
    double lo = 0.0;
    double hi = s_norm / (2.0 * p.elastic.mu);
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Mat3 random_symmetric(std::mt19937_64& rng, double scale)
{
    std::normal_distribution<double> n(0.0, scale);
    Mat3 a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            a(i, j) = n(rng);
    return 0.5 * (a + a.transpose());
}

} // namespace

TEST_CASE("elastic parameters")
{
    const ElasticParams e = make_elastic(1000.0, 0.499, 1.0);
    CHECK(e.lambda / e.mu == doctest::Approx(2 * 0.499 / (1 - 2 * 0.499)).epsilon(1e-12));
    CHECK(e.lambda / e.mu == doctest::Approx(499.0).epsilon(1e-12));
    CHECK(e.mu == doctest::Approx(1000.0 / (2 * 1.499)).epsilon(1e-12));
    const ElasticParams bar = make_elastic(100.0, 0.0, 1.0);
    CHECK(bar.wave_speed() == doctest::Approx(10.0).epsilon(1e-14));
    CHECK_THROWS_AS(make_elastic(0.0, 0.3, 1.0), ConfigError);
    CHECK_THROWS_AS(make_elastic(1.0, 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(make_elastic(1.0, -1.0, 1.0), ConfigError);
    CHECK_THROWS_AS(make_elastic(1.0, 0.3, 0.0), ConfigError);
}

TEST_CASE("hardening")
{
    const ElasticParams e = make_elastic(78.2e9, 0.3, 2700.0);
    const J2Params perfect = make_j2(e, 0.29e9, PerfectPlasticity{});
    CHECK(perfect.flow_stress(0.7) == 0.29e9);
    CHECK(perfect.flow_stress_slope(0.7) == 0.0);
    const J2Params pl = make_j2(e, 0.29e9, PowerLawHardening{125.0, 0.1});
    CHECK(pl.flow_stress(0.0) == doctest::Approx(0.29e9));
    CHECK(pl.flow_stress(0.2) == doctest::Approx(0.29e9 * std::pow(26.0, 0.1)));
    const double d = 1e-7;
    CHECK(pl.flow_stress_slope(0.2) ==
          doctest::Approx((pl.flow_stress(0.2 + d) - pl.flow_stress(0.2 - d)) / (2 * d)).epsilon(1e-6));
    CHECK_THROWS_AS(make_j2(e, 0.0, PerfectPlasticity{}), ConfigError);
    CHECK_THROWS_AS(make_j2(e, 1.0, PowerLawHardening{-125.0, 0.1}), ConfigError);
}

TEST_CASE("elastic rate update")
{
    const ElasticParams p = make_elastic(200.0, 0.25, 1.0);
    std::mt19937_64 rng(1);
    const Mat3 s0 = random_symmetric(rng, 5.0);
    CHECK(elastic_rate_update(s0, Mat3::Zero(), Mat3::Zero(), 0.1, p) == s0);

    Mat3 D = Mat3::Zero();
    D(0, 0) = 0.2;
    const double dt = 0.05;
    const Mat3 s = elastic_rate_update(Mat3::Zero(), D, Mat3::Zero(), dt, p);
    CHECK(s(0, 0) == doctest::Approx((p.lambda + 2 * p.mu) * 0.2 * dt).epsilon(1e-14));
    CHECK(s(1, 1) == doctest::Approx(p.lambda * 0.2 * dt).epsilon(1e-14));
    CHECK(s(2, 2) == doctest::Approx(p.lambda * 0.2 * dt).epsilon(1e-14));
    CHECK(s(0, 1) == 0.0);

    // Small spin on a uniaxial state: compare with the exact rotation.
    Mat3 uni = Mat3::Zero();
    uni(0, 0) = 10.0;
    Mat3 W = Mat3::Zero();
    const double rate = 0.3;
    W(1, 0) = rate;
    W(0, 1) = -rate;
    const double h = 1e-3;
    const Mat3 rot = elastic_rate_update(uni, Mat3::Zero(), W, h, p);
    const Mat3 R = Eigen::AngleAxisd(rate * h, Vec3::UnitZ()).toRotationMatrix();
    const Mat3 exact = R * uni * R.transpose();
    CHECK(std::abs(von_mises(rot) - von_mises(uni)) <= 10.0 * 10.0 * (rate * h) * (rate * h));
    CHECK(frob(rot - exact) <= 10.0 * 10.0 * (rate * h) * (rate * h));
    CHECK(frob(rot - rot.transpose()) <= 1e-12 * frob(rot));
}

TEST_CASE("radial return")
{
    const ElasticParams e = make_elastic(1e5, 0.3, 1.0);
    const J2Params perfect = make_j2(e, 1.5e4, PerfectPlasticity{});

    SUBCASE("elastic trial is unchanged")
    {
        Mat3 s = Mat3::Zero();
        s = -3e4 * Mat3::Identity();
        s(0, 1) = s(1, 0) = 100.0;
        const ReturnMapResult r = j2_radial_return(s, 0.01, perfect);
        CHECK_FALSE(r.plastic);
        CHECK(r.stress == s);
        CHECK(r.eps_plastic == 0.01);
        CHECK(r.delta_gamma == 0.0);
    }
    SUBCASE("perfect plasticity lands on the yield surface")
    {
        Mat3 s = Mat3::Zero();
        s(0, 0) = 4e4;
        s(1, 1) = -1e4;
        s(0, 2) = s(2, 0) = 7e3;
        const ReturnMapResult r = j2_radial_return(s, 0.0, perfect);
        CHECK(r.plastic);
        CHECK(frob(deviator(r.stress)) == doctest::Approx(std::sqrt(2.0 / 3.0) * 1.5e4).epsilon(1e-10));
        CHECK(trace(r.stress) == doctest::Approx(trace(s)).epsilon(1e-15));
        CHECK(r.eps_plastic > 0.0);
    }
    SUBCASE("oracle over random trial states")
    {
        const ElasticParams al = make_elastic(78.2e9, 0.3, 2700.0);
        const J2Params models[] = {make_j2(al, 0.29e9, PowerLawHardening{125.0, 0.1}),
                                   make_j2(al, 0.29e9, PerfectPlasticity{}), perfect};
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (const J2Params& p : models)
        {
            double worst_f = 0.0;
            double worst_dg = 0.0;
            for (int c = 0; c < 3000; ++c)
            {
                const double eps0 = c % 4 == 0 ? 0.0 : 2.0 * u(rng);
                const Mat3 s = random_symmetric(rng, 2.0 * p.yield_stress);
                const ReturnMapResult r = j2_radial_return(s, eps0, p);
                CHECK(r.eps_plastic >= eps0);
                CHECK(frob(deviator(r.stress)) <= frob(deviator(s)) * (1 + 1e-15));
                CHECK(std::abs(trace(r.stress) - trace(s)) <= 1e-14 * frob(s));
                // Dissipation proxy: the removed stress points along the flow direction.
                CHECK((s - r.stress).cwiseProduct(deviator(s)).sum() >= 0.0);
                if (!r.plastic)
                {
                    CHECK(yield_function(s, eps0, p) <= 0.0);
                    continue;
                }
                worst_f = std::max(worst_f, std::abs(yield_function(r.stress, r.eps_plastic, p)));
                const double ref = bisect_delta_gamma(frob(deviator(s)), eps0, p);
                worst_dg = std::max(worst_dg, std::abs(r.delta_gamma - ref) / ref);
            }
            CHECK(worst_f <= 1e-8 * p.yield_stress);
            CHECK(worst_dg <= 1e-10);
        }
    }
}

TEST_CASE("update_stress")
{
    const ElasticParams e = make_elastic(100.0, 0.2, 1.0);
    MaterialPoint mp;
    Mat3 L = Mat3::Zero();
    L(0, 1) = 0.4;
    update_stress(mp, Material{e}, L, 0.1);
    // Simple shear: D01 = 0.2, so s01 = 2 mu D01 dt.
    CHECK(mp.stress(0, 1) == doctest::Approx(2 * e.mu * 0.2 * 0.1));
    CHECK(mp.stress(0, 1) == mp.stress(1, 0));
    CHECK(mp.eps_plastic == 0.0);

    const J2Params j2 = make_j2(e, 1.0, PerfectPlasticity{});
    MaterialPoint pp;
    Mat3 big = Mat3::Zero();
    big(0, 0) = 1.0;
    update_stress(pp, Material{j2}, big, 1.0);
    CHECK(pp.eps_plastic > 0.0);
    CHECK(yield_function(pp.stress, pp.eps_plastic, j2) == doctest::Approx(0.0).scale(1.0));
}
