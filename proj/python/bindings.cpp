#include "fbarmpm/io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace fbarmpm;

namespace
{

struct Simulation
{
    SceneConfig config;
    SimState state;
    MetricRecorder recorder;

    explicit Simulation(SceneConfig cfg)
        : config(std::move(cfg)), state(make_state(config)), recorder(config, state)
    {
    }

    void advance(long n)
    {
        for (long i = 0; i < n; ++i)
            step(state, config.time);
    }

    RunSummary run_to_end() { return run(state, config.time); }

    py::array_t<double> vectors(Vec3 MaterialPoint::*field) const
    {
        py::array_t<double> out({static_cast<py::ssize_t>(state.particles.size()), py::ssize_t{3}});
        auto a = out.mutable_unchecked<2>();
        for (std::size_t p = 0; p < state.particles.size(); ++p)
            for (int c = 0; c < 3; ++c)
                a(p, c) = (state.particles[p].*field)[c];
        return out;
    }

    py::array_t<double> matrices(Mat3 MaterialPoint::*field) const
    {
        py::array_t<double> out(
            {static_cast<py::ssize_t>(state.particles.size()), py::ssize_t{3}, py::ssize_t{3}});
        auto a = out.mutable_unchecked<3>();
        for (std::size_t p = 0; p < state.particles.size(); ++p)
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    a(p, i, j) = (state.particles[p].*field)(i, j);
        return out;
    }

    py::array_t<double> scalars(double MaterialPoint::*field) const
    {
        py::array_t<double> out(static_cast<py::ssize_t>(state.particles.size()));
        auto a = out.mutable_unchecked<1>();
        for (std::size_t p = 0; p < state.particles.size(); ++p)
            a(p) = state.particles[p].*field;
        return out;
    }

    std::map<std::string, double> metrics() const
    {
        std::map<std::string, double> out;
        const std::vector<double> v = recorder.evaluate(state);
        for (std::size_t i = 0; i < v.size(); ++i)
            out[recorder.names()[i]] = v[i];
        return out;
    }
};

SceneOptions options(std::optional<int> degree, std::optional<std::string> projection, std::optional<int> level)
{
    SceneOptions o;
    o.degree = degree;
    if (projection)
        o.projection = parse_projection_mode(*projection);
    o.level = level;
    return o;
}

py::dict summary_dict(const RunSummary& s)
{
    py::dict d;
    d["wall_seconds"] = s.wall_seconds;
    d["steps"] = s.steps;
    d["final_time"] = s.final_time;
    d["momentum"] = s.momentum;
    d["kinetic_energy"] = s.kinetic_energy;
    d["internal_energy"] = s.internal_energy;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "B-spline material point method with F-bar projection";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    auto numeric = py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<OutOfDomainError>(m, "OutOfDomainError", numeric.ptr());

    m.def(
        "eval_basis_1d",
        [](int n_elements, int degree, double x_min, double x_max, double x) {
            const BasisEvaluation e = eval_basis_1d(make_open_uniform_knots(n_elements, degree, x_min, x_max), x);
            const auto v = e.value_span();
            const auto d = e.deriv_span();
            return py::make_tuple(e.first_index, std::vector<double>(v.begin(), v.end()),
                                  std::vector<double>(d.begin(), d.end()));
        },
        py::arg("n_elements"), py::arg("degree"), py::arg("x_min"), py::arg("x_max"), py::arg("x"),
        "First basis index, values and derivatives of the nonzero open uniform B-splines at x.");

    m.def(
        "eval_basis_3d",
        [](const Vec3& origin, const Vec3& extent, const Index3& elements, int degree, const Vec3& x) {
            const Basis3DEvaluation e = eval_basis_3d(make_tensor_basis(origin, extent, elements, degree), x);
            Eigen::MatrixX3d g(static_cast<Eigen::Index>(e.gradients.size()), 3);
            for (std::size_t a = 0; a < e.gradients.size(); ++a)
                g.row(static_cast<Eigen::Index>(a)) = e.gradients[a].transpose();
            return py::make_tuple(e.indices, e.values, g);
        },
        py::arg("origin"), py::arg("extent"), py::arg("elements"), py::arg("degree"), py::arg("x"));

    m.def(
        "radial_return",
        [](const Mat3& trial, double eps_p, double youngs_modulus, double poisson_ratio, double yield_stress,
           std::optional<double> coefficient, std::optional<double> exponent) {
            Hardening h = PerfectPlasticity{};
            if (coefficient || exponent)
                h = PowerLawHardening{coefficient.value_or(0.0), exponent.value_or(0.0)};
            const J2Params p = make_j2(make_elastic(youngs_modulus, poisson_ratio, 1.0), yield_stress, h);
            const ReturnMapResult r = j2_radial_return(trial, eps_p, p);
            py::dict d;
            d["stress"] = r.stress;
            d["eps_plastic"] = r.eps_plastic;
            d["delta_gamma"] = r.delta_gamma;
            d["plastic"] = r.plastic;
            d["yield_function"] = yield_function(r.stress, r.eps_plastic, p);
            return d;
        },
        py::arg("trial_stress"), py::arg("eps_p"), py::arg("youngs_modulus"), py::arg("poisson_ratio"),
        py::arg("yield_stress"), py::arg("coefficient") = py::none(), py::arg("exponent") = py::none(),
        "J2 radial return; power-law hardening when coefficient/exponent are given.");

    m.def(
        "constraint_ratio",
        [](int degree, int n_sd, bool projection) {
            const ConstraintRatio r = constraint_ratio(degree, n_sd, projection);
            return py::make_tuple(r.equations, r.constraints);
        },
        py::arg("degree"), py::arg("n_sd"), py::arg("projection"));

    m.def("projection_degree", [](int degree, const std::string& mode) {
        return projection_degree(degree, parse_projection_mode(mode));
    });

    m.def("scene_names", &scene_names);
    m.def(
        "scene_yaml",
        [](const std::string& name, std::optional<int> degree, std::optional<std::string> projection,
           std::optional<int> level) { return config_to_yaml(make_scene(name, options(degree, projection, level))); },
        py::arg("name"), py::arg("degree") = py::none(), py::arg("projection") = py::none(),
        py::arg("level") = py::none(), "Canonical YAML config of a named benchmark.");
    m.def(
        "normalize_config", [](const std::string& text) { return config_to_yaml(parse_config(text)); },
        py::arg("text"), "Parse and validate a YAML config and return it in canonical form.");

    py::class_<Simulation>(m, "Simulation")
        .def_static(
            "from_scene",
            [](const std::string& name, std::optional<int> degree, std::optional<std::string> projection,
               std::optional<int> level) {
                return std::make_unique<Simulation>(make_scene(name, options(degree, projection, level)));
            },
            py::arg("name"), py::arg("degree") = py::none(), py::arg("projection") = py::none(),
            py::arg("level") = py::none())
        .def_static(
            "from_yaml", [](const std::string& text) { return std::make_unique<Simulation>(parse_config(text)); },
            py::arg("text"))
        .def("step", &Simulation::advance, py::arg("n") = 1, py::call_guard<py::gil_scoped_release>())
        .def("run", [](Simulation& s) { return summary_dict(s.run_to_end()); })
        .def("metrics", &Simulation::metrics)
        .def_property_readonly("time", [](const Simulation& s) { return s.state.time; })
        .def_property_readonly("step_count", [](const Simulation& s) { return s.state.step_count; })
        .def_property_readonly("dt", [](const Simulation& s) { return s.config.time.dt; })
        .def_property_readonly("t_end", [](const Simulation& s) { return s.config.time.t_end; })
        .def_property_readonly("n_particles", [](const Simulation& s) { return s.state.particles.size(); })
        .def_property_readonly("positions", [](const Simulation& s) { return s.vectors(&MaterialPoint::x); })
        .def_property_readonly("initial_positions", [](const Simulation& s) { return s.vectors(&MaterialPoint::x0); })
        .def_property_readonly("velocities", [](const Simulation& s) { return s.vectors(&MaterialPoint::v); })
        .def_property_readonly("stress",
                               [](const Simulation& s) { return s.matrices(&MaterialPoint::effective_stress); })
        .def_property_readonly("deformation_gradients", [](const Simulation& s) { return s.matrices(&MaterialPoint::F); })
        .def_property_readonly("masses", [](const Simulation& s) { return s.scalars(&MaterialPoint::mass); })
        .def_property_readonly("volumes", [](const Simulation& s) { return s.scalars(&MaterialPoint::volume); })
        .def_property_readonly("plastic_strain", [](const Simulation& s) { return s.scalars(&MaterialPoint::eps_plastic); })
        .def("config_yaml", [](const Simulation& s) { return config_to_yaml(s.config); });

    m.def(
        "run",
        [](const std::string& source, std::optional<int> degree, std::optional<std::string> projection,
           std::optional<int> level, std::optional<double> dt, std::optional<double> t_end,
           std::optional<int> cadence, std::optional<std::filesystem::path> out) {
            RunManifest man;
            man.source = source;
            man.degree = degree;
            if (projection)
                man.projection = parse_projection_mode(*projection);
            man.level = level;
            man.dt = dt;
            man.t_end = t_end;
            man.cadence = cadence;
            if (out)
                man.output_dir = *out;
            RunResult r;
            {
                py::gil_scoped_release release;
                r = execute(man, out.has_value());
            }
            py::dict d = summary_dict(r.summary);
            py::dict series;
            for (std::size_t i = 0; i < r.metrics.names.size(); ++i)
            {
                std::vector<double> col;
                for (const auto& row : r.metrics.rows)
                    col.push_back(row[i]);
                series[py::str(r.metrics.names[i])] = col;
            }
            d["steps_recorded"] = r.metrics.steps;
            d["times"] = r.metrics.times;
            d["series"] = series;
            d["snapshots"] = r.snapshots;
            return d;
        },
        py::arg("source"), py::arg("degree") = py::none(), py::arg("projection") = py::none(),
        py::arg("level") = py::none(), py::arg("dt") = py::none(), py::arg("t_end") = py::none(),
        py::arg("cadence") = py::none(), py::arg("out") = py::none(),
        "Run a named scene or YAML config file. Files are written only when out is given.");

    m.def(
        "read_snapshot",
        [](const std::filesystem::path& path) {
            const std::vector<SnapshotRow> rows = read_snapshot(path);
            py::list out;
            for (const SnapshotRow& r : rows)
            {
                py::dict d;
                d["id"] = r.id;
                d["x"] = r.x;
                d["v"] = r.v;
                d["hydrostatic_stress"] = r.hydrostatic_stress;
                d["von_mises"] = r.von_mises;
                d["volume"] = r.volume;
                d["eps_plastic"] = r.eps_plastic;
                out.append(d);
            }
            return out;
        },
        py::arg("path"));
}
