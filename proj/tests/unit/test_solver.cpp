#include "fbarmpm/solver.hpp"

#include <doctest.h>

#include <random>

using namespace fbarmpm;

namespace
{

// A 2x2x1 m block of elastic material in the middle of a 4x4x2 m background.
SimState block_state(int degree, ProjectionMode mode, BoundaryConditionSet bcs = {},
                     Vec3 body_force = Vec3::Zero())
{
    BackgroundGrid g = make_grid(Vec3::Zero(), Vec3(4, 4, 2), {8, 8, 4}, degree);
    ParticleBlock b;
    b.box = {Vec3(1, 1, 0.5), Vec3(3, 3, 1.5)};
    b.ppc = {2, 2, 2};
    b.density = 10.0;
    ParticleList ps = init_block(b, g);
    std::vector<Material> mats{make_elastic(1000.0, 0.3, 10.0)};
    return make_sim_state(std::move(g), std::move(ps), std::move(mats), std::move(bcs), body_force, {},
                          mode);
}

} // namespace

TEST_CASE("time controls")
{
    TimeControls tc{2e-4, 0.5, 100, 1.0};
    CHECK_NOTHROW(validate(tc));
    CHECK(step_target(tc) == 2500);
    CHECK(step_target({1e-8, 4e-5, 1, 1.0}) == 4000);
    CHECK(step_target({0.3, 1.0, 1, 1.0}) == 4);
    CHECK(step_target({0.1, 0.0, 1, 1.0}) == 0);
    CHECK_THROWS_AS(validate({0.0, 1.0, 1, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate({-1.0, 1.0, 1, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate({0.1, -1.0, 1, 1.0}), ConfigError);
    CHECK_THROWS_AS(validate({0.1, 1.0, 0, 1.0}), ConfigError);
}

TEST_CASE("state assembly")
{
    const SimState s = block_state(2, ProjectionMode::pminus1);
    CHECK(s.particles.size() == 4 * 4 * 2 * 8);
    REQUIRE(s.projection.has_value());
    CHECK(s.projection->degree() == 1);
    CHECK(s.mass_cutoff == doctest::Approx(1e-12 * s.particles[0].mass));
    CHECK(cfl_limit(s) == doctest::Approx(0.5 / make_elastic(1000.0, 0.3, 10.0).wave_speed()));
    CHECK_FALSE(block_state(2, ProjectionMode::off).projection.has_value());
    CHECK(block_state(1, ProjectionMode::pminus1).projection->degree() == 0);
    CHECK(block_state(3, ProjectionMode::constants).projection->degree() == 0);
}

TEST_CASE("momentum is conserved without constraints or loads")
{
    for (ProjectionMode mode : {ProjectionMode::off, ProjectionMode::constants, ProjectionMode::pminus1})
        for (int p = 1; p <= 3; ++p)
        {
            SimState s = block_state(p, mode);
            std::mt19937_64 rng(100 + p);
            std::normal_distribution<double> n(0.0, 0.05);
            for (MaterialPoint& mp : s.particles)
                mp.v = Vec3(n(rng), n(rng), n(rng));
            const Vec3 p0 = total_momentum(s.particles);
            const double m = total_mass(s.particles);
            const TimeControls tc{1e-3, 0.02, 1, 1.0};
            run(s, tc);
            CHECK(s.step_count == 20);
            const Vec3 p1 = total_momentum(s.particles);
            CHECK((p1 - p0).norm() <= 1e-12 * m);
            CHECK(total_mass(s.particles) == m);
        }
}

TEST_CASE("rigid translation and free fall")
{
    SUBCASE("uniform velocity")
    {
        SimState s = block_state(2, ProjectionMode::pminus1);
        const Vec3 v(0.5, -0.25, 0.125);
        for (MaterialPoint& mp : s.particles)
            mp.v = v;
        const ParticleList before = s.particles;
        run(s, {1e-3, 0.1, 10, 1.0});
        for (std::size_t p = 0; p < before.size(); ++p)
        {
            CHECK((s.particles[p].v - v).norm() <= 1e-12);
            CHECK((s.particles[p].x - (before[p].x + 0.1 * v)).norm() <= 1e-12);
            CHECK(s.particles[p].effective_stress.cwiseAbs().maxCoeff() <= 1e-9);
            CHECK(std::abs(s.particles[p].volume - before[p].volume) <= 1e-12);
        }
    }
    SUBCASE("body force")
    {
        const Vec3 b(0.0, 0.0, -2.0);
        SimState s = block_state(2, ProjectionMode::off, {}, b);
        const ParticleList before = s.particles;
        const double dt = 1e-3;
        run(s, {dt, 0.2, 50, 1.0});
        const double t = s.time;
        CHECK(t == doctest::Approx(0.2));
        for (std::size_t p = 0; p < before.size(); ++p)
        {
            CHECK((s.particles[p].v - b * t).norm() <= 1e-12);
            // Symplectic Euler: x = x0 + b dt^2 n(n+1)/2.
            const double n = static_cast<double>(s.step_count);
            CHECK((s.particles[p].x - (before[p].x + b * dt * dt * n * (n + 1) / 2)).norm() <= 1e-12);
        }
    }
}

TEST_CASE("constraints stop the body")
{
    BoundaryConditionSet bcs;
    bcs.conditions.push_back({Face::z_min, ConstraintKind::wall, {}});
    BackgroundGrid g = make_grid(Vec3::Zero(), Vec3(2, 2, 2), {4, 4, 4}, 2);
    ParticleBlock b;
    b.box = {Vec3(0.5, 0.5, 0.0), Vec3(1.5, 1.5, 0.5)};
    b.ppc = {2, 2, 2};
    ParticleList ps = init_block(b, g);
    for (MaterialPoint& mp : ps)
        mp.v = Vec3(0, 0, -1);
    SimState s = make_sim_state(std::move(g), std::move(ps), {make_elastic(1e4, 0.3, 1.0)}, bcs,
                                Vec3::Zero(), {}, ProjectionMode::off);
    run(s, {1e-3, 0.05, 10, 1.0});
    double lowest = 1e9;
    for (const MaterialPoint& mp : s.particles)
        lowest = std::min(lowest, mp.x[2]);
    CHECK(lowest > 0.0);
    // The wall has taken out the downward momentum.
    CHECK(total_momentum(s.particles)[2] > -0.5 * total_mass(s.particles));
}

TEST_CASE("observers follow the cadence")
{
    SimState s = block_state(1, ProjectionMode::off);
    std::vector<long> seen;
    const std::vector<Observer> obs{[&](const SimState& st) { seen.push_back(st.step_count); }};
    const RunSummary r = run(s, {0.01, 0.105, 4, 1.0}, obs);
    CHECK(r.steps == 11);
    CHECK(seen == std::vector<long>{4, 8, 11});
    CHECK(r.final_time == doctest::Approx(0.11));
}

TEST_CASE("failures carry context")
{
    SimState s = block_state(2, ProjectionMode::off);
    for (MaterialPoint& mp : s.particles)
        mp.v = Vec3(100.0, 0, 0);
    try
    {
        run(s, {0.01, 1.0, 1, 1.0});
        FAIL("expected the block to leave the background");
    }
    catch (const OutOfDomainError& e)
    {
        const std::string msg = e.what();
        CHECK(msg.find("step") != std::string::npos);
        CHECK(msg.find("particle") != std::string::npos);
    }
}

TEST_CASE("runs are bit-reproducible")
{
    auto once = [] {
        SimState s = block_state(2, ProjectionMode::pminus1, {}, Vec3(0, -1, 0));
        for (std::size_t p = 0; p < s.particles.size(); ++p)
            s.particles[p].v = Vec3(0.01 * std::sin(static_cast<double>(p)), 0, 0);
        run(s, {1e-3, 0.03, 1, 1.0});
        return s.particles;
    };
    const ParticleList a = once();
    const ParticleList b = once();
    REQUIRE(a.size() == b.size());
    for (std::size_t p = 0; p < a.size(); ++p)
    {
        CHECK(a[p].x == b[p].x);
        CHECK(a[p].v == b[p].v);
        CHECK(a[p].effective_stress == b[p].effective_stress);
    }
}
