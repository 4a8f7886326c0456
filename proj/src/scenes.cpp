//---------------------------------------------------------------------------//
/*!
 * \file scenes.cpp
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/scenes.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_map>

namespace fbarmpm
{

namespace
{

template <class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

BoundaryCondition face_bc(Face f, ConstraintKind kind)
{
    BoundaryCondition bc;
    bc.selector = f;
    bc.kind = kind;
    return bc;
}

void check_level(int level, int lo, int hi, const char* scene)
{
    if (level < lo || level > hi)
        throw ConfigError(std::string(scene) + ": level must be " + std::to_string(lo) + ".." +
                          std::to_string(hi) + ", got " + std::to_string(level));
}

void check_degree(int degree)
{
    if (degree < 1 || degree > max_degree)
        throw ConfigError("degree must be 1..3, got " + std::to_string(degree));
}

std::size_t material_index(const SceneConfig& cfg, const std::string& name)
{
    for (std::size_t i = 0; i < cfg.materials.size(); ++i)
        if (cfg.materials[i].name == name)
            return i;
    throw ConfigError("bodies.material: unknown material '" + name + "'");
}

} // namespace

const std::vector<std::string>& metric_names()
{
    static const std::vector<std::string> names{
        "l2_displacement_error", "tip_displacement", "max_vertical_displacement", "pressure_roughness",
        "bar_radius_cm",         "bar_height_cm",    "kinetic_energy",            "internal_energy"};
    return names;
}

void validate(const SceneConfig& cfg)
{
    const GridSpec& g = cfg.grid;
    check_degree(g.degree);
    for (int a = 0; a < 3; ++a)
    {
        if (g.elements[static_cast<std::size_t>(a)] < 1)
            throw ConfigError("grid.elements: every entry must be at least 1");
        if (!(g.extent[a] > 0.0) || !std::isfinite(g.extent[a]))
            throw ConfigError("grid.extent: every entry must be positive");
    }
    if (cfg.materials.empty())
        throw ConfigError("materials: at least one material is required");
    for (std::size_t i = 0; i < cfg.materials.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.materials.size(); ++j)
            if (cfg.materials[i].name == cfg.materials[j].name)
                throw ConfigError("materials: duplicate name '" + cfg.materials[i].name + "'");
    if (cfg.bodies.empty())
        throw ConfigError("bodies: at least one body is required");
    for (const BodySpec& b : cfg.bodies)
    {
        material_index(cfg, b.material);
        for (int a = 0; a < 3; ++a)
            if (b.ppc[static_cast<std::size_t>(a)] < 1)
                throw ConfigError("bodies.ppc: every entry must be at least 1");
        if (const auto* sv = std::get_if<SineVelocityX>(&b.velocity); sv && !(sv->length > 0.0))
            throw ConfigError("bodies.velocity.length must be positive");
    }
    for (const TractionSpec& t : cfg.tractions)
        if (!(t.area > 0.0))
            throw ConfigError("tractions.area must be positive");
    for (const std::string& m : cfg.metrics)
        if (std::find(metric_names().begin(), metric_names().end(), m) == metric_names().end())
            throw ConfigError("metrics: unknown metric '" + m + "'");
    if (std::find(cfg.metrics.begin(), cfg.metrics.end(), "tip_displacement") != cfg.metrics.end() &&
        !cfg.probe)
        throw ConfigError("metrics: tip_displacement needs a probe point");
    validate(cfg.time);
}

SimState make_state(const SceneConfig& cfg)
{
    validate(cfg);
    BackgroundGrid grid = make_grid(cfg.grid.origin, cfg.grid.extent, cfg.grid.elements, cfg.grid.degree);

    std::vector<Material> materials;
    for (const MaterialSpec& m : cfg.materials)
        materials.push_back(m.model);

    ParticleList particles;
    for (const BodySpec& b : cfg.bodies)
    {
        const std::size_t mi = material_index(cfg, b.material);
        ParticleBlock block;
        block.box = b.box;
        block.ppc = b.ppc;
        block.density = elastic_part(materials[mi]).density;
        block.mask = b.mask;
        block.material = static_cast<int>(mi);
        ParticleList body = init_block(block, grid);
        for (MaterialPoint& mp : body)
        {
            std::visit(overloaded{[&](const UniformVelocity& u) { mp.v = u.value; },
                                  [&](const SineVelocityX& s) {
                                      mp.v = Vec3::Zero();
                                      mp.v[0] = s.amplitude * std::sin(std::numbers::pi * mp.x[0] / s.length);
                                  }},
                       b.velocity);
        }
        particles.insert(particles.end(), body.begin(), body.end());
    }

    std::vector<TractionLoad> loads;
    for (const TractionSpec& t : cfg.tractions)
    {
        TractionLoad load;
        load.total_force = t.traction * t.area;
        for (std::size_t p = 0; p < particles.size(); ++p)
            if (t.region.contains(particles[p].x0))
                load.particles.push_back(p);
        loads.push_back(std::move(load));
    }

    return make_sim_state(std::move(grid), std::move(particles), std::move(materials), cfg.boundary,
                          cfg.body_force, std::move(loads), cfg.projection);
}

//---------------------------------------------------------------------------//
// Benchmarks
//---------------------------------------------------------------------------//

SceneConfig vibrating_bar_scene(int level, int degree, ProjectionMode projection)
{
    check_level(level, 1, 3, "vibrating_bar");
    check_degree(degree);
    static const Index3 elements[3] = {{12, 2, 1}, {25, 5, 1}, {50, 10, 1}};
    const double length = 25.0;

    SceneConfig cfg;
    cfg.name = "vibrating_bar";
    cfg.grid = GridSpec{Vec3::Zero(), Vec3(length, 5.0, 1.0), elements[level - 1], degree};
    cfg.projection = projection;
    cfg.materials.push_back({"bar", make_elastic(100.0, 0.0, 1.0)});

    BodySpec body;
    body.material = "bar";
    body.box = Box{Vec3::Zero(), cfg.grid.extent};
    body.ppc = {4, 4, 2};
    body.velocity = SineVelocityX{0.1, length};
    cfg.bodies.push_back(body);

    cfg.boundary.conditions = {face_bc(Face::x_min, ConstraintKind::fixed),
                               face_bc(Face::x_max, ConstraintKind::fixed)};
    cfg.boundary.plane_strain = true;
    cfg.time.dt = 2e-4 * std::pow(2.0, 1 - level);
    cfg.time.t_end = 0.5;
    cfg.time.cadence = 100 << (level - 1);
    cfg.metrics = {"l2_displacement_error", "kinetic_energy"};
    return cfg;
}

double vibrating_bar_analytic(double x, double t, double v0, double length, double wave_speed)
{
    const double pi = std::numbers::pi;
    return v0 * length / (pi * wave_speed) * std::sin(pi * wave_speed * t / length) *
           std::sin(pi * x / length);
}

SceneConfig cook_membrane_scene(int level, int degree, ProjectionMode projection)
{
    check_level(level, 1, 3, "cook_membrane");
    check_degree(degree);
    const int scale = 1 << (level - 1);

    SceneConfig cfg;
    cfg.name = "cook_membrane";
    cfg.grid = GridSpec{Vec3::Zero(), Vec3(49.0, 61.0, 1.0), Index3{25 * scale, 31 * scale, 1}, degree};
    cfg.projection = projection;
    cfg.materials.push_back({"membrane", make_elastic(1000.0, 0.499, 1.0)});

    BodySpec body;
    body.material = "membrane";
    body.box = Box{Vec3::Zero(), Vec3(48.0, 60.0, 1.0)};
    body.ppc = {3, 3, 2};
    body.mask = PolygonXYMask{{{0.0, 0.0}, {48.0, 44.0}, {48.0, 60.0}, {0.0, 44.0}}};
    cfg.bodies.push_back(body);

    // Shear load on the last particle column; 0.25 N/m over the 16 m end.
    const double spacing = 49.0 / cfg.grid.elements[0] / body.ppc[0];
    TractionSpec load;
    load.region = Box{Vec3(48.0 - spacing, 0.0, 0.0), Vec3(48.0, 61.0, 1.0)};
    load.traction = Vec3(0.0, 0.25, 0.0);
    load.area = 16.0;
    cfg.tractions.push_back(load);

    cfg.boundary.conditions = {face_bc(Face::x_min, ConstraintKind::fixed)};
    cfg.boundary.plane_strain = true;
    cfg.time.dt = 2e-4 * std::pow(2.0, 1 - level);
    cfg.time.t_end = 3.0;
    cfg.time.cadence = 250 << (level - 1);
    cfg.probe = Vec3(48.0, 60.0, 0.5);
    cfg.metrics = {"tip_displacement", "pressure_roughness", "kinetic_energy"};
    return cfg;
}

SceneConfig elastoplastic_collapse_scene(int degree, ProjectionMode projection, int level)
{
    check_level(level, 1, 2, "elastoplastic_collapse");
    check_degree(degree);
    const int scale = level == 2 ? 2 : 1;

    SceneConfig cfg;
    cfg.name = "elastoplastic_collapse";
    cfg.grid = GridSpec{Vec3::Zero(), Vec3(15.0, 10.0, 1.0), Index3{15 * scale, 10 * scale, 1}, degree};
    cfg.projection = projection;
    cfg.materials.push_back({"soil", make_j2(make_elastic(1e5, 0.3, 1.0), 1.5e4, PerfectPlasticity{})});

    BodySpec body;
    body.material = "soil";
    body.box = Box{Vec3::Zero(), Vec3(8.0, 8.0, 1.0)};
    body.ppc = {5, 5, 2};
    cfg.bodies.push_back(body);

    cfg.body_force = Vec3(0.0, -3000.0, 0.0);
    cfg.boundary.conditions = {face_bc(Face::x_min, ConstraintKind::roller),
                               face_bc(Face::y_min, ConstraintKind::fixed)};
    cfg.boundary.plane_strain = true;
    cfg.time.dt = 5e-4;
    cfg.time.t_end = 0.3;
    cfg.time.cadence = 100;
    cfg.metrics = {"max_vertical_displacement", "pressure_roughness", "kinetic_energy"};
    return cfg;
}

SceneConfig taylor_bar_scene(TaylorResolution resolution, int degree, ProjectionMode projection)
{
    check_degree(degree);
    const bool full = resolution == TaylorResolution::full;
    const double radius = 0.391e-2;
    const double height = 2.346e-2;

    SceneConfig cfg;
    cfg.name = "taylor_bar";
    cfg.grid = GridSpec{Vec3::Zero(), Vec3(1.2e-2, 1.2e-2, 2.4e-2),
                        full ? Index3{20, 20, 40} : Index3{10, 10, 20}, degree};
    cfg.projection = projection;
    cfg.materials.push_back({"aluminium", make_j2(make_elastic(78.2e9, 0.3, 2700.0), 0.29e9,
                                                  PowerLawHardening{125.0, 0.1})});

    BodySpec body;
    body.material = "aluminium";
    body.box = Box{Vec3::Zero(), Vec3(radius, radius, height)};
    body.ppc = {5, 5, 5};
    body.mask = CylinderZMask{{0.0, 0.0}, radius, 0.0, height};
    body.velocity = UniformVelocity{Vec3(0.0, 0.0, -373.0)};
    cfg.bodies.push_back(body);

    cfg.boundary.conditions = {face_bc(Face::x_min, ConstraintKind::roller),
                               face_bc(Face::y_min, ConstraintKind::roller),
                               face_bc(Face::z_min, ConstraintKind::wall)};
    cfg.time.dt = full ? 1e-8 : 2e-8;
    cfg.time.t_end = 4e-5;
    cfg.time.cadence = full ? 400 : 200;
    cfg.metrics = {"bar_radius_cm", "bar_height_cm", "kinetic_energy"};
    return cfg;
}

const std::vector<std::string>& scene_names()
{
    static const std::vector<std::string> names{"vibrating_bar", "cook_membrane", "elastoplastic_collapse",
                                                "taylor_bar"};
    return names;
}

bool is_scene_name(const std::string& name)
{
    return std::find(scene_names().begin(), scene_names().end(), name) != scene_names().end();
}

SceneConfig make_scene(const std::string& name, const SceneOptions& opts)
{
    const int p = opts.degree.value_or(2);
    const ProjectionMode proj = opts.projection.value_or(ProjectionMode::pminus1);
    if (name == "vibrating_bar")
        return vibrating_bar_scene(opts.level.value_or(1), p, proj);
    if (name == "cook_membrane")
        return cook_membrane_scene(opts.level.value_or(1), p, proj);
    if (name == "elastoplastic_collapse")
        return elastoplastic_collapse_scene(p, proj, opts.level.value_or(2));
    if (name == "taylor_bar")
    {
        const int level = opts.level.value_or(1);
        check_level(level, 1, 2, "taylor_bar");
        return taylor_bar_scene(level == 2 ? TaylorResolution::full : TaylorResolution::desk, p, proj);
    }
    throw ConfigError("unknown scene '" + name + "'");
}

//---------------------------------------------------------------------------//
// Diagnostics
//---------------------------------------------------------------------------//

std::pair<double, double> final_bar_dimensions(const ParticleList& particles,
                                               const std::array<double, 2>& axis_xy)
{
    double r = 0.0;
    double h = 0.0;
    for (const MaterialPoint& mp : particles)
    {
        r = std::max(r, std::hypot(mp.x[0] - axis_xy[0], mp.x[1] - axis_xy[1]));
        h = std::max(h, mp.x[2]);
    }
    return {100.0 * r, 100.0 * h};
}

double max_vertical_displacement(const ParticleList& particles)
{
    double d = 0.0;
    for (const MaterialPoint& mp : particles)
        d = std::max(d, std::abs(mp.x[1] - mp.x0[1]));
    return d;
}

double pressure_roughness(const ParticleList& particles, double radius)
{
    if (particles.empty())
        return 0.0;
    if (!(radius > 0.0))
        throw ConfigError("pressure roughness radius must be positive");

    // Bin particles into cubes of side `radius`.
    Vec3 lo = particles.front().x;
    for (const MaterialPoint& mp : particles)
        lo = lo.cwiseMin(mp.x);
    auto cell_of = [&](const Vec3& x) {
        return Index3{static_cast<int>(std::floor((x[0] - lo[0]) / radius)),
                      static_cast<int>(std::floor((x[1] - lo[1]) / radius)),
                      static_cast<int>(std::floor((x[2] - lo[2]) / radius))};
    };
    auto key = [](const Index3& c) {
        return (static_cast<std::uint64_t>(c[0] + 1) << 42) ^ (static_cast<std::uint64_t>(c[1] + 1) << 21) ^
               static_cast<std::uint64_t>(c[2] + 1);
    };
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> bins;
    for (std::size_t p = 0; p < particles.size(); ++p)
        bins[key(cell_of(particles[p].x))].push_back(p);

    const double r2 = radius * radius;
    std::vector<std::size_t> nbrs;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < particles.size(); ++i)
    {
        const Vec3& xi = particles[i].x;
        const Index3 c = cell_of(xi);
        nbrs.clear();
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                {
                    auto it = bins.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
                    if (it == bins.end())
                        continue;
                    for (std::size_t j : it->second)
                        if ((particles[j].x - xi).squaredNorm() <= r2)
                            nbrs.push_back(j);
                }

        Eigen::MatrixXd a(static_cast<Eigen::Index>(nbrs.size()), 4);
        Eigen::VectorXd q(static_cast<Eigen::Index>(nbrs.size()));
        for (std::size_t k = 0; k < nbrs.size(); ++k)
        {
            const MaterialPoint& mp = particles[nbrs[k]];
            const Vec3 d = (mp.x - xi) / radius;
            const auto row = static_cast<Eigen::Index>(k);
            a(row, 0) = 1.0;
            a.block<1, 3>(row, 1) = d.transpose();
            q[row] = trace(mp.effective_stress) / 3.0;
        }
        // Rank-revealing solve so that flat neighbourhoods (a single
        // particle layer) still give the best constant/planar fit.
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
        cod.setThreshold(1e-10);
        const Eigen::VectorXd coef = cod.solve(q);
        const double res = trace(particles[i].effective_stress) / 3.0 - coef[0];
        num += particles[i].volume * res * res;
        den += particles[i].volume;
    }
    return std::sqrt(num / den);
}

std::optional<double> BenchmarkMetrics::last(const std::string& name) const
{
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end() || rows.empty())
        return std::nullopt;
    return rows.back()[static_cast<std::size_t>(it - names.begin())];
}

MetricRecorder::MetricRecorder(const SceneConfig& cfg, const SimState& initial) : names_(cfg.metrics)
{
    roughness_radius_ = 1.5 * initial.grid.basis.h.minCoeff();
    if (cfg.probe)
    {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < initial.particles.size(); ++p)
        {
            const double d = (initial.particles[p].x0 - *cfg.probe).squaredNorm();
            if (d < best)
            {
                best = d;
                probe_particle_ = p;
            }
        }
    }
    for (const BodySpec& b : cfg.bodies)
    {
        if (const auto* s = std::get_if<SineVelocityX>(&b.velocity))
        {
            v0_ = s->amplitude;
            length_ = s->length;
            const ElasticParams& e = elastic_part(cfg.materials[material_index(cfg, b.material)].model);
            wave_speed_ = std::sqrt(e.youngs_modulus / e.density);
        }
        if (const auto* c = std::get_if<CylinderZMask>(&b.mask))
            axis_ = c->center;
    }
}

std::vector<double> MetricRecorder::evaluate(const SimState& s) const
{
    std::vector<double> out;
    out.reserve(names_.size());
    for (const std::string& n : names_)
    {
        if (n == "l2_displacement_error")
            out.push_back(l2_displacement_error(s.particles, s.time, [&](double x, double t) {
                return vibrating_bar_analytic(x, t, v0_, length_, wave_speed_);
            }));
        else if (n == "tip_displacement")
        {
            const MaterialPoint& mp = s.particles.at(probe_particle_);
            out.push_back(mp.x[1] - mp.x0[1]);
        }
        else if (n == "max_vertical_displacement")
            out.push_back(max_vertical_displacement(s.particles));
        else if (n == "pressure_roughness")
            out.push_back(pressure_roughness(s.particles, roughness_radius_));
        else if (n == "bar_radius_cm")
            out.push_back(final_bar_dimensions(s.particles, axis_).first);
        else if (n == "bar_height_cm")
            out.push_back(final_bar_dimensions(s.particles, axis_).second);
        else if (n == "kinetic_energy")
            out.push_back(kinetic_energy(s.particles));
        else if (n == "internal_energy")
            out.push_back(s.internal_energy);
        else
            throw ConfigError("metrics: unknown metric '" + n + "'");
    }
    return out;
}

void MetricRecorder::record(const SimState& state, BenchmarkMetrics& out) const
{
    if (out.names.empty())
        out.names = names_;
    out.steps.push_back(state.step_count);
    out.times.push_back(state.time);
    out.rows.push_back(evaluate(state));
}

} // namespace fbarmpm
