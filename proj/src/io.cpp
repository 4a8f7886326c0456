//---------------------------------------------------------------------------//
/*!
 * \file io.cpp
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/io.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

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

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt(const Vec3& v)
{
    return "[" + fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]) + "]";
}

std::string at_line(const YAML::Node& n)
{
    const YAML::Mark m = n.Mark();
    if (m.is_null())
        return "";
    return " (line " + std::to_string(m.line + 1) + ")";
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

void expect_map(const YAML::Node& n, const std::string& path)
{
    if (!n.IsMap())
        throw ConfigError(path + ": expected a mapping" + at_line(n));
}

void check_keys(const YAML::Node& n, std::initializer_list<const char*> allowed, const std::string& path)
{
    expect_map(n, path.empty() ? "config" : path);
    for (const auto& kv : n)
    {
        const std::string key = kv.first.as<std::string>();
        const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok)
            throw ConfigError("unknown key '" + join(path, key) + "'" + at_line(kv.first));
    }
}

YAML::Node required(const YAML::Node& n, const char* key, const std::string& path)
{
    YAML::Node v = n[key];
    if (!v)
        throw ConfigError("missing key '" + join(path, key) + "'" + at_line(n));
    return v;
}

template <class T>
T scalar(const YAML::Node& v, const std::string& key)
{
    if (!v.IsScalar())
        throw ConfigError(key + ": expected a scalar" + at_line(v));
    try
    {
        return v.as<T>();
    }
    catch (const YAML::Exception&)
    {
        throw ConfigError(key + ": invalid value '" + v.Scalar() + "'" + at_line(v));
    }
}

double get_double(const YAML::Node& n, const char* key, const std::string& path)
{
    return scalar<double>(required(n, key, path), join(path, key));
}

template <std::size_t N>
std::array<double, N> get_array(const YAML::Node& v, const std::string& key)
{
    if (!v.IsSequence() || v.size() != N)
        throw ConfigError(key + ": expected a list of " + std::to_string(N) + " numbers" + at_line(v));
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i)
        out[i] = scalar<double>(v[i], key);
    return out;
}

Vec3 get_vec3(const YAML::Node& v, const std::string& key)
{
    const auto a = get_array<3>(v, key);
    return Vec3(a[0], a[1], a[2]);
}

Index3 get_index3(const YAML::Node& v, const std::string& key)
{
    if (!v.IsSequence() || v.size() != 3)
        throw ConfigError(key + ": expected a list of 3 integers" + at_line(v));
    return {scalar<int>(v[0], key), scalar<int>(v[1], key), scalar<int>(v[2], key)};
}

Box get_box(const YAML::Node& n, const std::string& path)
{
    check_keys(n, {"lo", "hi"}, path);
    return Box{get_vec3(required(n, "lo", path), join(path, "lo")),
               get_vec3(required(n, "hi", path), join(path, "hi"))};
}

template <class Fn>
auto rethrow_as(const std::string& key, const YAML::Node& n, Fn&& fn)
{
    try
    {
        return fn();
    }
    catch (const ConfigError& e)
    {
        throw ConfigError(key + ": " + e.what() + at_line(n));
    }
}

MaterialSpec parse_material(const YAML::Node& n, const std::string& path)
{
    check_keys(n, {"name", "model", "youngs_modulus", "poisson_ratio", "density", "yield_stress", "hardening"},
               path);
    MaterialSpec m;
    m.name = scalar<std::string>(required(n, "name", path), join(path, "name"));
    const std::string model = scalar<std::string>(required(n, "model", path), join(path, "model"));
    const ElasticParams e = rethrow_as(path, n, [&] {
        return make_elastic(get_double(n, "youngs_modulus", path), get_double(n, "poisson_ratio", path),
                            get_double(n, "density", path));
    });
    if (model == "elastic")
    {
        if (n["yield_stress"] || n["hardening"])
            throw ConfigError(path + ": yield_stress/hardening need model j2" + at_line(n));
        m.model = e;
    }
    else if (model == "j2")
    {
        Hardening hard = PerfectPlasticity{};
        if (YAML::Node h = n["hardening"])
        {
            const std::string hp = join(path, "hardening");
            if (h.IsScalar() && h.Scalar() == "perfect")
                hard = PerfectPlasticity{};
            else
            {
                check_keys(h, {"type", "coefficient", "exponent"}, hp);
                const std::string type = scalar<std::string>(required(h, "type", hp), join(hp, "type"));
                if (type == "perfect")
                    hard = PerfectPlasticity{};
                else if (type == "power_law")
                    hard = PowerLawHardening{get_double(h, "coefficient", hp), get_double(h, "exponent", hp)};
                else
                    throw ConfigError(join(hp, "type") + ": unknown hardening '" + type + "'" + at_line(h));
            }
        }
        const double sy = get_double(n, "yield_stress", path);
        m.model = rethrow_as(path, n, [&] { return make_j2(e, sy, hard); });
    }
    else
        throw ConfigError(join(path, "model") + ": unknown model '" + model + "' (elastic or j2)" + at_line(n));
    return m;
}

GeometryMask parse_mask(const YAML::Node& n, const std::string& path)
{
    expect_map(n, path);
    const std::string type = scalar<std::string>(required(n, "type", path), join(path, "type"));
    if (type == "none")
    {
        check_keys(n, {"type"}, path);
        return NoMask{};
    }
    if (type == "polygon_xy")
    {
        check_keys(n, {"type", "vertices"}, path);
        const YAML::Node vs = required(n, "vertices", path);
        if (!vs.IsSequence())
            throw ConfigError(join(path, "vertices") + ": expected a list" + at_line(vs));
        PolygonXYMask m;
        for (const auto& v : vs)
            m.vertices.push_back(get_array<2>(v, join(path, "vertices")));
        return m;
    }
    if (type == "cylinder_z")
    {
        check_keys(n, {"type", "center", "radius", "z_lo", "z_hi"}, path);
        CylinderZMask m;
        m.center = get_array<2>(required(n, "center", path), join(path, "center"));
        m.radius = get_double(n, "radius", path);
        m.z_lo = get_double(n, "z_lo", path);
        m.z_hi = get_double(n, "z_hi", path);
        return m;
    }
    throw ConfigError(join(path, "type") + ": unknown mask '" + type + "'" + at_line(n));
}

VelocityInit parse_velocity(const YAML::Node& n, const std::string& path)
{
    expect_map(n, path);
    const std::string type = scalar<std::string>(required(n, "type", path), join(path, "type"));
    if (type == "uniform")
    {
        check_keys(n, {"type", "value"}, path);
        return UniformVelocity{get_vec3(required(n, "value", path), join(path, "value"))};
    }
    if (type == "sine_x")
    {
        check_keys(n, {"type", "amplitude", "length"}, path);
        return SineVelocityX{get_double(n, "amplitude", path), get_double(n, "length", path)};
    }
    throw ConfigError(join(path, "type") + ": unknown velocity '" + type + "'" + at_line(n));
}

BodySpec parse_body(const YAML::Node& n, const std::string& path)
{
    check_keys(n, {"material", "box", "ppc", "mask", "velocity"}, path);
    BodySpec b;
    b.material = scalar<std::string>(required(n, "material", path), join(path, "material"));
    b.box = get_box(required(n, "box", path), join(path, "box"));
    b.ppc = get_index3(required(n, "ppc", path), join(path, "ppc"));
    if (YAML::Node m = n["mask"])
        b.mask = parse_mask(m, join(path, "mask"));
    if (YAML::Node v = n["velocity"])
        b.velocity = parse_velocity(v, join(path, "velocity"));
    return b;
}

ConstraintKind parse_kind(const std::string& s, const std::string& key, const YAML::Node& n)
{
    if (s == "fixed")
        return ConstraintKind::fixed;
    if (s == "roller")
        return ConstraintKind::roller;
    if (s == "wall")
        return ConstraintKind::wall;
    throw ConfigError(key + ": unknown constraint '" + s + "' (fixed, roller or wall)" + at_line(n));
}

std::string kind_name(ConstraintKind k)
{
    switch (k)
    {
    case ConstraintKind::fixed:
        return "fixed";
    case ConstraintKind::roller:
        return "roller";
    case ConstraintKind::wall:
        return "wall";
    }
    return "fixed";
}

BoundaryCondition parse_bc(const YAML::Node& n, const std::string& path)
{
    check_keys(n, {"face", "box", "kind", "axes"}, path);
    BoundaryCondition bc;
    const YAML::Node face = n["face"];
    const YAML::Node box = n["box"];
    if (static_cast<bool>(face) == static_cast<bool>(box))
        throw ConfigError(path + ": exactly one of face or box is required" + at_line(n));
    if (face)
        bc.selector = rethrow_as(join(path, "face"), face,
                                 [&] { return parse_face(scalar<std::string>(face, join(path, "face"))); });
    else
        bc.selector = get_box(box, join(path, "box"));
    bc.kind = parse_kind(scalar<std::string>(required(n, "kind", path), join(path, "kind")), join(path, "kind"),
                         n);
    if (YAML::Node axes = n["axes"])
    {
        if (!axes.IsSequence())
            throw ConfigError(join(path, "axes") + ": expected a list of x, y, z" + at_line(axes));
        for (const auto& a : axes)
        {
            const std::string s = scalar<std::string>(a, join(path, "axes"));
            if (s == "x")
                bc.axes[0] = true;
            else if (s == "y")
                bc.axes[1] = true;
            else if (s == "z")
                bc.axes[2] = true;
            else
                throw ConfigError(join(path, "axes") + ": unknown axis '" + s + "'" + at_line(a));
        }
    }
    return bc;
}

template <class Fn>
void for_each_item(const YAML::Node& seq, const std::string& key, Fn&& fn)
{
    if (!seq.IsSequence())
        throw ConfigError(key + ": expected a list" + at_line(seq));
    for (std::size_t i = 0; i < seq.size(); ++i)
        fn(seq[i], key + "[" + std::to_string(i) + "]");
}

SceneConfig parse_node(const YAML::Node& root)
{
    check_keys(root, {"name", "grid", "projection", "materials", "bodies", "boundary", "body_force", "tractions",
                      "time", "probe", "metrics"},
               "");
    SceneConfig cfg;
    if (YAML::Node n = root["name"])
        cfg.name = scalar<std::string>(n, "name");

    const YAML::Node g = required(root, "grid", "");
    check_keys(g, {"origin", "extent", "elements", "degree"}, "grid");
    if (YAML::Node o = g["origin"])
        cfg.grid.origin = get_vec3(o, "grid.origin");
    cfg.grid.extent = get_vec3(required(g, "extent", "grid"), "grid.extent");
    cfg.grid.elements = get_index3(required(g, "elements", "grid"), "grid.elements");
    cfg.grid.degree = scalar<int>(required(g, "degree", "grid"), "grid.degree");

    if (YAML::Node p = root["projection"])
        cfg.projection = rethrow_as("projection", p,
                                    [&] { return parse_projection_mode(scalar<std::string>(p, "projection")); });
    if (cfg.projection == ProjectionMode::pminus1 && cfg.grid.degree == 1)
        cfg.projection = ProjectionMode::constants;

    for_each_item(required(root, "materials", ""), "materials",
                  [&](const YAML::Node& n, const std::string& k) { cfg.materials.push_back(parse_material(n, k)); });
    for_each_item(required(root, "bodies", ""), "bodies",
                  [&](const YAML::Node& n, const std::string& k) { cfg.bodies.push_back(parse_body(n, k)); });

    if (YAML::Node b = root["boundary"])
    {
        check_keys(b, {"plane_strain", "conditions"}, "boundary");
        if (YAML::Node ps = b["plane_strain"])
            cfg.boundary.plane_strain = scalar<bool>(ps, "boundary.plane_strain");
        if (YAML::Node cs = b["conditions"])
            for_each_item(cs, "boundary.conditions", [&](const YAML::Node& n, const std::string& k) {
                cfg.boundary.conditions.push_back(parse_bc(n, k));
            });
    }
    if (YAML::Node bf = root["body_force"])
        cfg.body_force = get_vec3(bf, "body_force");
    if (YAML::Node ts = root["tractions"])
        for_each_item(ts, "tractions", [&](const YAML::Node& n, const std::string& k) {
            check_keys(n, {"region", "traction", "area"}, k);
            TractionSpec t;
            t.region = get_box(required(n, "region", k), join(k, "region"));
            t.traction = get_vec3(required(n, "traction", k), join(k, "traction"));
            t.area = get_double(n, "area", k);
            cfg.tractions.push_back(t);
        });

    const YAML::Node t = required(root, "time", "");
    check_keys(t, {"dt", "t_end", "cadence", "cfl_factor"}, "time");
    cfg.time.dt = get_double(t, "dt", "time");
    cfg.time.t_end = get_double(t, "t_end", "time");
    if (YAML::Node c = t["cadence"])
        cfg.time.cadence = scalar<int>(c, "time.cadence");
    if (YAML::Node c = t["cfl_factor"])
        cfg.time.cfl_factor = scalar<double>(c, "time.cfl_factor");

    if (YAML::Node p = root["probe"])
        cfg.probe = get_vec3(p, "probe");
    if (YAML::Node ms = root["metrics"])
        for_each_item(ms, "metrics",
                      [&](const YAML::Node& n, const std::string& k) { cfg.metrics.push_back(scalar<std::string>(n, k)); });

    validate(cfg);
    return cfg;
}

YAML::Node load_yaml(const std::string& text)
{
    try
    {
        return YAML::Load(text);
    }
    catch (const YAML::ParserException& e)
    {
        throw ConfigError("syntax error at line " + std::to_string(e.mark.line + 1) + ", column " +
                          std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

} // namespace

//---------------------------------------------------------------------------//
SceneConfig parse_config(const std::string& text)
{
    const YAML::Node root = load_yaml(text);
    try
    {
        return parse_node(root);
    }
    catch (const YAML::Exception& e)
    {
        throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

SceneConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_yaml(const SceneConfig& cfg)
{
    std::ostringstream os;
    os << "name: " << cfg.name << "\n";
    os << "grid:\n"
       << "  origin: " << fmt(cfg.grid.origin) << "\n"
       << "  extent: " << fmt(cfg.grid.extent) << "\n"
       << "  elements: [" << cfg.grid.elements[0] << ", " << cfg.grid.elements[1] << ", "
       << cfg.grid.elements[2] << "]\n"
       << "  degree: " << cfg.grid.degree << "\n";
    os << "projection: " << to_string(cfg.projection) << "\n";

    os << "materials:\n";
    for (const MaterialSpec& m : cfg.materials)
    {
        const ElasticParams& e = elastic_part(m.model);
        os << "  - name: " << m.name << "\n"
           << "    model: " << (std::holds_alternative<J2Params>(m.model) ? "j2" : "elastic") << "\n"
           << "    youngs_modulus: " << fmt(e.youngs_modulus) << "\n"
           << "    poisson_ratio: " << fmt(e.poisson_ratio) << "\n"
           << "    density: " << fmt(e.density) << "\n";
        if (const auto* j2 = std::get_if<J2Params>(&m.model))
        {
            os << "    yield_stress: " << fmt(j2->yield_stress) << "\n";
            std::visit(overloaded{[&](const PerfectPlasticity&) { os << "    hardening: perfect\n"; },
                                  [&](const PowerLawHardening& h) {
                                      os << "    hardening: {type: power_law, coefficient: " << fmt(h.coefficient)
                                         << ", exponent: " << fmt(h.exponent) << "}\n";
                                  }},
                       j2->hardening);
        }
    }

    os << "bodies:\n";
    for (const BodySpec& b : cfg.bodies)
    {
        os << "  - material: " << b.material << "\n"
           << "    box: {lo: " << fmt(b.box.lo) << ", hi: " << fmt(b.box.hi) << "}\n"
           << "    ppc: [" << b.ppc[0] << ", " << b.ppc[1] << ", " << b.ppc[2] << "]\n";
        std::visit(overloaded{[&](const NoMask&) {},
                              [&](const PolygonXYMask& m) {
                                  os << "    mask:\n      type: polygon_xy\n      vertices:\n";
                                  for (const auto& v : m.vertices)
                                      os << "        - [" << fmt(v[0]) << ", " << fmt(v[1]) << "]\n";
                              },
                              [&](const CylinderZMask& m) {
                                  os << "    mask: {type: cylinder_z, center: [" << fmt(m.center[0]) << ", "
                                     << fmt(m.center[1]) << "], radius: " << fmt(m.radius)
                                     << ", z_lo: " << fmt(m.z_lo) << ", z_hi: " << fmt(m.z_hi) << "}\n";
                              }},
                   b.mask);
        std::visit(overloaded{[&](const UniformVelocity& u) {
                                  os << "    velocity: {type: uniform, value: " << fmt(u.value) << "}\n";
                              },
                              [&](const SineVelocityX& s) {
                                  os << "    velocity: {type: sine_x, amplitude: " << fmt(s.amplitude)
                                     << ", length: " << fmt(s.length) << "}\n";
                              }},
                   b.velocity);
    }

    os << "boundary:\n"
       << "  plane_strain: " << (cfg.boundary.plane_strain ? "true" : "false") << "\n";
    if (!cfg.boundary.conditions.empty())
    {
        os << "  conditions:\n";
        for (const BoundaryCondition& bc : cfg.boundary.conditions)
        {
            if (const Face* f = std::get_if<Face>(&bc.selector))
                os << "    - face: " << face_name(*f) << "\n";
            else
            {
                const Box& b = std::get<Box>(bc.selector);
                os << "    - box: {lo: " << fmt(b.lo) << ", hi: " << fmt(b.hi) << "}\n";
            }
            os << "      kind: " << kind_name(bc.kind) << "\n";
            if (bc.axes[0] || bc.axes[1] || bc.axes[2])
            {
                os << "      axes: [";
                const char* names[3] = {"x", "y", "z"};
                bool first = true;
                for (int a = 0; a < 3; ++a)
                    if (bc.axes[static_cast<std::size_t>(a)])
                    {
                        os << (first ? "" : ", ") << names[a];
                        first = false;
                    }
                os << "]\n";
            }
        }
    }
    os << "body_force: " << fmt(cfg.body_force) << "\n";
    if (!cfg.tractions.empty())
    {
        os << "tractions:\n";
        for (const TractionSpec& t : cfg.tractions)
            os << "  - region: {lo: " << fmt(t.region.lo) << ", hi: " << fmt(t.region.hi) << "}\n"
               << "    traction: " << fmt(t.traction) << "\n"
               << "    area: " << fmt(t.area) << "\n";
    }
    os << "time:\n"
       << "  dt: " << fmt(cfg.time.dt) << "\n"
       << "  t_end: " << fmt(cfg.time.t_end) << "\n"
       << "  cadence: " << cfg.time.cadence << "\n"
       << "  cfl_factor: " << fmt(cfg.time.cfl_factor) << "\n";
    if (cfg.probe)
        os << "probe: " << fmt(*cfg.probe) << "\n";
    os << "metrics: [";
    for (std::size_t i = 0; i < cfg.metrics.size(); ++i)
        os << (i ? ", " : "") << cfg.metrics[i];
    os << "]\n";
    return os.str();
}

//---------------------------------------------------------------------------//
// Snapshots
//---------------------------------------------------------------------------//

SnapshotRow snapshot_row(long id, const MaterialPoint& mp)
{
    SnapshotRow r;
    r.id = id;
    r.x = mp.x;
    r.v = mp.v;
    r.hydrostatic_stress = trace(mp.effective_stress) / 3.0;
    r.von_mises = von_mises(mp.effective_stress);
    r.eps_plastic = mp.eps_plastic;
    r.volume = mp.volume;
    return r;
}

void write_snapshot(const ParticleList& particles, std::ostream& os)
{
    os << snapshot_magic << "\n" << snapshot_header << "\n";
    std::string line;
    for (std::size_t p = 0; p < particles.size(); ++p)
    {
        const SnapshotRow r = snapshot_row(static_cast<long>(p), particles[p]);
        line = std::to_string(r.id);
        for (double v : {r.x[0], r.x[1], r.x[2], r.v[0], r.v[1], r.v[2], r.hydrostatic_stress, r.von_mises,
                         r.eps_plastic, r.volume})
        {
            line += ',';
            line += fmt(v);
        }
        line += '\n';
        os << line;
    }
}

void write_snapshot(const ParticleList& particles, const std::filesystem::path& path)
{
    std::ofstream out = open_out(path);
    write_snapshot(particles, out);
}

std::vector<SnapshotRow> read_snapshot(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line))
        throw ConfigError("snapshot: empty file");
    if (line.rfind("# fbarmpm-snapshot ", 0) != 0)
        throw ConfigError("snapshot: missing version line");
    if (line != snapshot_magic)
        throw ConfigError("snapshot: unsupported version '" + line.substr(19) + "'");
    if (!std::getline(is, line) || line != snapshot_header)
        throw ConfigError("snapshot: unexpected column header");

    std::vector<SnapshotRow> rows;
    long lineno = 2;
    while (std::getline(is, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        std::array<double, 10> v{};
        SnapshotRow r;
        std::istringstream ls(line);
        std::string cell;
        int col = 0;
        try
        {
            while (std::getline(ls, cell, ','))
            {
                if (col == 0)
                    r.id = std::stol(cell);
                else if (col <= 10)
                    v[static_cast<std::size_t>(col - 1)] = std::stod(cell);
                ++col;
            }
        }
        catch (const std::exception&)
        {
            throw ConfigError("snapshot: bad number on line " + std::to_string(lineno));
        }
        if (col != 11)
            throw ConfigError("snapshot: expected 11 columns on line " + std::to_string(lineno));
        r.x = Vec3(v[0], v[1], v[2]);
        r.v = Vec3(v[3], v[4], v[5]);
        r.hydrostatic_stress = v[6];
        r.von_mises = v[7];
        r.eps_plastic = v[8];
        r.volume = v[9];
        rows.push_back(r);
    }
    return rows;
}

std::vector<SnapshotRow> read_snapshot(const std::filesystem::path& path)
{
    std::ifstream in = open_in(path);
    return read_snapshot(in);
}

//---------------------------------------------------------------------------//
// Series and convergence
//---------------------------------------------------------------------------//

void write_series(const BenchmarkMetrics& metrics, std::ostream& os)
{
    os << "step,time";
    for (const std::string& n : metrics.names)
        os << ',' << n;
    os << '\n';
    for (std::size_t r = 0; r < metrics.rows.size(); ++r)
    {
        os << metrics.steps[r] << ',' << fmt(metrics.times[r]);
        for (double v : metrics.rows[r])
            os << ',' << fmt(v);
        os << '\n';
    }
}

void write_series(const BenchmarkMetrics& metrics, const std::filesystem::path& path)
{
    std::ofstream out = open_out(path);
    write_series(metrics, out);
}

std::vector<ConvergenceRow> convergence_report(const std::vector<ConvergenceRun>& runs)
{
    std::vector<ConvergenceRow> rows;
    for (std::size_t i = 0; i < runs.size(); ++i)
    {
        ConvergenceRow r{runs[i].level, runs[i].h, runs[i].error, std::nullopt};
        if (i > 0)
            r.order = std::log2(runs[i - 1].error / runs[i].error);
        rows.push_back(r);
    }
    return rows;
}

std::string format_convergence_report(const std::vector<ConvergenceRow>& rows)
{
    std::ostringstream os;
    os << "level,h,error,order\n";
    for (const ConvergenceRow& r : rows)
    {
        os << r.level << ',' << fmt(r.h) << ',' << fmt(r.error) << ',';
        if (r.order)
            os << fmt(*r.order);
        os << '\n';
    }
    return os.str();
}

//---------------------------------------------------------------------------//
// Run driver
//---------------------------------------------------------------------------//

SceneConfig resolve_manifest(const RunManifest& m)
{
    SceneConfig cfg;
    if (is_scene_name(m.source))
        cfg = make_scene(m.source, SceneOptions{m.degree, m.projection, m.level});
    else
    {
        if (!std::filesystem::exists(m.source))
            throw ConfigError("'" + m.source + "' is neither a scene name nor a config file");
        if (m.level)
            throw ConfigError("--level only applies to named scenes");
        cfg = load_config(m.source);
        if (m.degree)
            cfg.grid.degree = *m.degree;
        if (m.projection)
            cfg.projection = *m.projection;
    }
    if (cfg.projection == ProjectionMode::pminus1 && cfg.grid.degree == 1)
        cfg.projection = ProjectionMode::constants;
    if (m.dt)
        cfg.time.dt = *m.dt;
    if (m.t_end)
        cfg.time.t_end = *m.t_end;
    if (m.cadence)
        cfg.time.cadence = *m.cadence;
    validate(cfg);
    return cfg;
}

std::string manifest_to_yaml(const RunManifest& m)
{
    std::ostringstream os;
    os << "source: " << m.source << "\n";
    if (m.degree)
        os << "degree: " << *m.degree << "\n";
    if (m.projection)
        os << "projection: " << to_string(*m.projection) << "\n";
    if (m.level)
        os << "level: " << *m.level << "\n";
    if (m.dt)
        os << "dt: " << fmt(*m.dt) << "\n";
    if (m.t_end)
        os << "t_end: " << fmt(*m.t_end) << "\n";
    if (m.cadence)
        os << "cadence: " << *m.cadence << "\n";
    os << "output_dir: " << m.output_dir.string() << "\n";
    os << "deterministic: " << (m.deterministic ? "true" : "false") << "\n";
    return os.str();
}

RunManifest parse_manifest(const std::string& text)
{
    const YAML::Node root = load_yaml(text);
    check_keys(root, {"source", "degree", "projection", "level", "dt", "t_end", "cadence", "output_dir",
                      "deterministic"},
               "");
    RunManifest m;
    m.source = scalar<std::string>(required(root, "source", ""), "source");
    if (YAML::Node n = root["degree"])
        m.degree = scalar<int>(n, "degree");
    if (YAML::Node n = root["projection"])
        m.projection = parse_projection_mode(scalar<std::string>(n, "projection"));
    if (YAML::Node n = root["level"])
        m.level = scalar<int>(n, "level");
    if (YAML::Node n = root["dt"])
        m.dt = scalar<double>(n, "dt");
    if (YAML::Node n = root["t_end"])
        m.t_end = scalar<double>(n, "t_end");
    if (YAML::Node n = root["cadence"])
        m.cadence = scalar<int>(n, "cadence");
    if (YAML::Node n = root["output_dir"])
        m.output_dir = scalar<std::string>(n, "output_dir");
    if (YAML::Node n = root["deterministic"])
        m.deterministic = scalar<bool>(n, "deterministic");
    return m;
}

RunResult execute(const RunManifest& m, bool write_files)
{
    RunResult res;
    res.config = resolve_manifest(m);
    SimState state = make_state(res.config);
    const MetricRecorder recorder(res.config, state);

    auto snapshot = [&](const SimState& s) {
        if (!write_files)
            return;
        char name[40];
        std::snprintf(name, sizeof name, "snapshot_%06ld.csv", s.step_count);
        const std::filesystem::path p = m.output_dir / name;
        write_snapshot(s.particles, p);
        res.snapshots.push_back(p);
    };

    if (write_files)
    {
        std::filesystem::create_directories(m.output_dir);
        open_out(m.output_dir / "manifest.yaml") << manifest_to_yaml(m);
        open_out(m.output_dir / "config.yaml") << config_to_yaml(res.config);
    }
    recorder.record(state, res.metrics);
    snapshot(state);

    const std::vector<Observer> observers{[&](const SimState& s) {
        recorder.record(s, res.metrics);
        snapshot(s);
    }};
    res.summary = run(state, res.config.time, observers);

    if (write_files)
        write_series(res.metrics, m.output_dir / "series.csv");
    return res;
}

} // namespace fbarmpm
