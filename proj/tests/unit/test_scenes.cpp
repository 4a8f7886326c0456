#include "fbarmpm/io.hpp"
#include "fbarmpm/scenes.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace fbarmpm;

namespace
{

std::size_t count(const SceneConfig& cfg) { return make_state(cfg).particles.size(); }

} // namespace

TEST_CASE("particle counts")
{
    CHECK(count(vibrating_bar_scene(1, 2, ProjectionMode::pminus1)) == 768);
    CHECK(count(vibrating_bar_scene(2, 2, ProjectionMode::pminus1)) == 4000);
    CHECK(count(cook_membrane_scene(1, 2, ProjectionMode::pminus1)) == 6710);
    CHECK(count(cook_membrane_scene(2, 2, ProjectionMode::pminus1)) == 26900);
    CHECK(count(cook_membrane_scene(3, 1, ProjectionMode::off)) == 107534);
    CHECK(count(elastoplastic_collapse_scene(2, ProjectionMode::pminus1)) == 12800);
    CHECK(count(elastoplastic_collapse_scene(2, ProjectionMode::off, 1)) == 3200);
    CHECK(count(taylor_bar_scene(TaylorResolution::full, 2, ProjectionMode::pminus1)) == 162876);
    CHECK(count(taylor_bar_scene(TaylorResolution::desk, 2, ProjectionMode::pminus1)) >= 20000);
}

TEST_CASE("scene parameters")
{
    const SceneConfig bar = vibrating_bar_scene(3, 2, ProjectionMode::pminus1);
    CHECK(bar.grid.elements == Index3{50, 10, 1});
    CHECK(bar.time.dt == doctest::Approx(5e-5));
    CHECK(bar.time.t_end == 0.5);
    CHECK(elastic_part(bar.materials[0].model).wave_speed() == doctest::Approx(10.0));

    const SceneConfig cook = cook_membrane_scene(2, 2, ProjectionMode::pminus1);
    CHECK(cook.grid.elements == Index3{50, 62, 1});
    CHECK(cook.grid.extent == Vec3(49, 61, 1));
    CHECK(cook.time.dt == doctest::Approx(1e-4));
    CHECK(cook.time.t_end == 3.0);
    const ElasticParams& e = elastic_part(cook.materials[0].model);
    CHECK(e.lambda / e.mu == doctest::Approx(499.0));

    const SceneConfig col = elastoplastic_collapse_scene(2, ProjectionMode::pminus1);
    CHECK(col.grid.elements == Index3{30, 20, 1});
    CHECK(step_target(col.time) == 600);
    CHECK(col.body_force[1] == doctest::Approx(-3000.0));

    const SceneConfig tb = taylor_bar_scene(TaylorResolution::desk, 2, ProjectionMode::pminus1);
    CHECK(tb.grid.elements == Index3{10, 10, 20});
    CHECK(tb.time.dt == 2e-8);
    CHECK(step_target(tb.time) == 2000);
    const SceneConfig tp = taylor_bar_scene(TaylorResolution::full, 2, ProjectionMode::pminus1);
    CHECK(tp.grid.elements == Index3{20, 20, 40});
    CHECK(tp.time.dt == 1e-8);

    CHECK_THROWS_AS(vibrating_bar_scene(4, 2, ProjectionMode::off), ConfigError);
    CHECK_THROWS_AS(cook_membrane_scene(0, 2, ProjectionMode::off), ConfigError);
    CHECK_THROWS_AS(vibrating_bar_scene(1, 4, ProjectionMode::off), ConfigError);
}

TEST_CASE("builders are pure and validate")
{
    for (const std::string& name : scene_names())
    {
        CAPTURE(name);
        const SceneConfig a = make_scene(name);
        const SceneConfig b = make_scene(name);
        CHECK_NOTHROW(validate(a));
        CHECK(config_to_yaml(a) == config_to_yaml(b));
    }
    CHECK(is_scene_name("cook_membrane"));
    CHECK_FALSE(is_scene_name("cooks_membrane"));
    CHECK_THROWS_AS(make_scene("nope"), ConfigError);
    CHECK_THROWS_AS(make_scene("taylor_bar", {std::nullopt, std::nullopt, 3}), ConfigError);
    const SceneConfig lin = make_scene("vibrating_bar", {1, ProjectionMode::pminus1, std::nullopt});
    CHECK(make_state(lin).projection->degree() == 0);
}

TEST_CASE("vibrating bar analytic solution")
{
    for (double x : {0.0, 3.0, 12.5, 20.0, 25.0})
        CHECK(vibrating_bar_analytic(x, 0.0) == 0.0);
    for (double t : {0.1, 0.5, 1.25, 2.0})
    {
        CHECK(std::abs(vibrating_bar_analytic(0.0, t)) <= 1e-17);
        CHECK(std::abs(vibrating_bar_analytic(25.0, t)) <= 1e-15);
    }
    const double peak = 0.1 * 25.0 / (std::numbers::pi * 10.0);
    CHECK(vibrating_bar_analytic(12.5, 1.25) == doctest::Approx(peak).epsilon(1e-14));
    CHECK(peak == doctest::Approx(0.07958).epsilon(1e-4));
    double best = 0.0;
    for (int i = 0; i <= 1000; ++i)
        best = std::max(best, vibrating_bar_analytic(25.0 * i / 1000, 1.25));
    CHECK(best == doctest::Approx(peak).epsilon(1e-12));
}

TEST_CASE("l2 displacement error")
{
    ParticleList ps(5);
    for (std::size_t p = 0; p < ps.size(); ++p)
    {
        ps[p].x0 = Vec3(static_cast<double>(p) * 5.0, 1.0, 0.5);
        ps[p].volume = 1.0 + static_cast<double>(p);
    }
    auto exact = [](double x, double t) { return vibrating_bar_analytic(x, t); };
    for (MaterialPoint& mp : ps)
        mp.x = mp.x0 + Vec3(exact(mp.x0[0], 0.7), 0, 0);
    CHECK(l2_displacement_error(ps, 0.7, exact) <= 1e-15);
    for (MaterialPoint& mp : ps)
        mp.x[1] += 0.003;
    CHECK(l2_displacement_error(ps, 0.7, exact) == doctest::Approx(0.003).epsilon(1e-12));
    CHECK(l2_displacement_error(ParticleList{}, 0.7, exact) == 0.0);
}

TEST_CASE("bar dimensions")
{
    const SimState s = make_state(taylor_bar_scene(TaylorResolution::desk, 2, ProjectionMode::pminus1));
    const auto [r, h] = final_bar_dimensions(s.particles);
    // Sub-cell spacing 0.12 cm / 5.
    const double spacing = 0.024;
    CHECK(r <= 0.391);
    CHECK(r >= 0.391 - spacing / 2);
    CHECK(h <= 2.346);
    CHECK(h >= 2.346 - spacing / 2);

    ParticleList moved = s.particles;
    for (MaterialPoint& mp : moved)
        mp.x[2] -= 1e-3;
    const auto [r2, h2] = final_bar_dimensions(moved);
    CHECK(r2 == r);
    CHECK(h2 == doctest::Approx(h - 0.1));

    // Pushing one particle outward can only grow the radius.
    moved[0].x[0] += 1e-3;
    CHECK(final_bar_dimensions(moved).first >= r2);
}

TEST_CASE("pressure roughness")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    ParticleList ps(600);
    for (MaterialPoint& mp : ps)
    {
        mp.x = Vec3(u(rng), u(rng), 0.25 * u(rng));
        mp.volume = 0.01;
    }
    auto set_pressure = [&](auto f) {
        for (MaterialPoint& mp : ps)
        {
            const double p = f(mp.x);
            mp.effective_stress = Mat3::Zero();
            mp.effective_stress.diagonal().setConstant(p);
            mp.effective_stress(0, 1) = mp.effective_stress(1, 0) = 50.0;
        }
    };
    set_pressure([](const Vec3&) { return -7.0; });
    CHECK(pressure_roughness(ps, 0.6) <= 1e-12);
    set_pressure([](const Vec3& x) { return 3.0 * x[0] - 2.0 * x[1] + 0.5 * x[2] + 1.0; });
    CHECK(pressure_roughness(ps, 0.6) <= 1e-10);

    // Checkerboard noise of amplitude 1 around a gradient.
    set_pressure([](const Vec3& x) {
        const int parity = (static_cast<int>(x[0] / 0.2) + static_cast<int>(x[1] / 0.2)) % 2;
        return 10.0 * x[0] + (parity ? 1.0 : -1.0);
    });
    const double rough = pressure_roughness(ps, 0.6);
    CHECK(rough > 0.5);
    CHECK(rough < 1.5);
}

TEST_CASE("max vertical displacement")
{
    ParticleList ps(3);
    ps[1].x = Vec3(0, -0.3, 0);
    ps[2].x = Vec3(0.9, 0.2, -1.0);
    CHECK(max_vertical_displacement(ps) == doctest::Approx(0.3));
    ps[2].x[1] = 0.5;
    CHECK(max_vertical_displacement(ps) == doctest::Approx(0.5));
}

TEST_CASE("metric recorder")
{
    const SceneConfig cfg = cook_membrane_scene(1, 2, ProjectionMode::pminus1);
    const SimState s = make_state(cfg);
    const MetricRecorder rec(cfg, s);
    CHECK(rec.names() == cfg.metrics);
    const std::vector<double> v0 = rec.evaluate(s);
    REQUIRE(v0.size() == cfg.metrics.size());
    for (double v : v0)
        CHECK(v == 0.0);
    BenchmarkMetrics bm;
    rec.record(s, bm);
    CHECK(bm.steps == std::vector<long>{0});
    CHECK(bm.last("tip_displacement") == 0.0);
    CHECK_FALSE(bm.last("nope").has_value());

    SceneConfig bad = cfg;
    bad.metrics.push_back("nonsense");
    CHECK_THROWS_AS(validate(bad), ConfigError);
    bad = cfg;
    bad.probe.reset();
    CHECK_THROWS_AS(validate(bad), ConfigError);
}
