// Command line driver: run a scene or config, run a convergence study, or
// list the built-in scenes.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include "fbarmpm/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace fbarmpm;

namespace
{

std::vector<int> parse_levels(const std::string& s)
{
    std::vector<int> out;
    const auto dots = s.find("..");
    try
    {
        if (dots != std::string::npos)
        {
            const int lo = std::stoi(s.substr(0, dots));
            const int hi = std::stoi(s.substr(dots + 2));
            if (lo > hi)
                throw ConfigError("--levels: empty range '" + s + "'");
            for (int l = lo; l <= hi; ++l)
                out.push_back(l);
        }
        else
        {
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(std::stoi(item));
        }
    }
    catch (const std::logic_error&)
    {
        throw ConfigError("--levels: expected a range like 1..3 or a list like 1,2,3, got '" + s + "'");
    }
    if (out.empty())
        throw ConfigError("--levels: no levels given");
    return out;
}

std::optional<ProjectionMode> projection_opt(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    return parse_projection_mode(s);
}

void print_summary(const RunResult& r)
{
    std::printf("%s: %ld steps to t = %.6g s in %.2f s wall\n", r.config.name.c_str(), r.summary.steps,
                r.summary.final_time, r.summary.wall_seconds);
    for (std::size_t i = 0; i < r.metrics.names.size(); ++i)
        std::printf("  %-26s %.10g\n", r.metrics.names[i].c_str(), r.metrics.rows.back()[i]);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Explicit B-spline material point solver with F-bar projection"};
    app.require_subcommand(1);

    RunManifest manifest;
    std::string projection;
    int degree = 0;
    int level = 0;
    int cadence = 0;
    double dt = 0.0;
    double t_end = -1.0;
    std::string out_dir = "out";

    CLI::App* run_cmd = app.add_subcommand("run", "Run a named scene or a YAML config file");
    run_cmd->add_option("scene", manifest.source, "Scene name or config path")->required();
    run_cmd->add_option("--degree", degree, "B-spline degree 1..3");
    run_cmd->add_option("--projection", projection, "off | constants | pminus1");
    run_cmd->add_option("--level", level, "Refinement level of a named scene");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--cadence", cadence, "Snapshot cadence in steps");
    run_cmd->add_option("--dt", dt, "Time step [s]");
    run_cmd->add_option("--tend", t_end, "End time [s]");

    std::string scene;
    std::string levels = "1..3";
    CLI::App* conv_cmd = app.add_subcommand("converge", "Run a scene over refinement levels");
    conv_cmd->add_option("scene", scene, "Scene name")->required();
    conv_cmd->add_option("--degree", degree, "B-spline degree 1..3");
    conv_cmd->add_option("--projection", projection, "off | constants | pminus1");
    conv_cmd->add_option("--levels", levels, "Levels, e.g. 1..3");
    conv_cmd->add_option("--out", out_dir, "Output directory");

    CLI::App* list_cmd = app.add_subcommand("list-scenes", "List the built-in scenes");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        if (*list_cmd)
        {
            for (const std::string& n : scene_names())
                std::cout << n << "\n";
            return 0;
        }

        if (*run_cmd)
        {
            if (run_cmd->count("--degree"))
                manifest.degree = degree;
            if (run_cmd->count("--level"))
                manifest.level = level;
            if (run_cmd->count("--cadence"))
                manifest.cadence = cadence;
            if (run_cmd->count("--dt"))
                manifest.dt = dt;
            if (run_cmd->count("--tend"))
                manifest.t_end = t_end;
            manifest.projection = projection_opt(projection);
            manifest.output_dir = out_dir;
            const RunResult r = execute(manifest);
            print_summary(r);
            std::printf("output written to %s\n", out_dir.c_str());
            return 0;
        }

        if (*conv_cmd)
        {
            if (!is_scene_name(scene))
                throw ConfigError("unknown scene '" + scene + "'");
            std::vector<ConvergenceRun> runs;
            for (int l : parse_levels(levels))
            {
                RunManifest m;
                m.source = scene;
                if (conv_cmd->count("--degree"))
                    m.degree = degree;
                m.projection = projection_opt(projection);
                m.level = l;
                m.output_dir = std::filesystem::path(out_dir) / ("level_" + std::to_string(l));
                const RunResult r = execute(m);
                print_summary(r);
                runs.push_back({l, r.config.grid.extent[0] / r.config.grid.elements[0],
                                r.metrics.rows.back().at(0)});
            }
            const std::string table = format_convergence_report(convergence_report(runs));
            std::filesystem::create_directories(out_dir);
            std::ofstream(std::filesystem::path(out_dir) / "convergence.csv") << table;
            std::cout << table;
            return 0;
        }
    }
    catch (const ConfigError& e)
    {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    }
    catch (const NumericError& e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
