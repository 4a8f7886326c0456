//---------------------------------------------------------------------------//
/*!
 * \file io.hpp
 * \brief Scene configuration files, particle snapshots, metric series,
 *        convergence tables and the run driver used by the CLI.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_IO_HPP
#define FBARMPM_IO_HPP

#include "fbarmpm/scenes.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fbarmpm
{

//---------------------------------------------------------------------------//
// Configuration
//---------------------------------------------------------------------------//

/*!
 * Parse a YAML scene description. Unknown keys are errors; YAML syntax
 * errors report the line. pminus1 on a linear grid resolves to constants.
 * The result is validated.
 */
SceneConfig parse_config(const std::string& text);
SceneConfig load_config(const std::filesystem::path& path);

//! YAML form accepted by parse_config (doubles at 17 significant digits).
std::string config_to_yaml(const SceneConfig& cfg);

//---------------------------------------------------------------------------//
// Snapshots
//---------------------------------------------------------------------------//

inline constexpr const char* snapshot_magic = "# fbarmpm-snapshot v1";
inline constexpr const char* snapshot_header =
    "id,x,y,z,vx,vy,vz,hydrostatic_stress,von_mises,eps_plastic,volume";

struct SnapshotRow
{
    long id = 0;
    Vec3 x = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    double hydrostatic_stress = 0.0;
    double von_mises = 0.0;
    double eps_plastic = 0.0;
    double volume = 0.0;
};

SnapshotRow snapshot_row(long id, const MaterialPoint& mp);

void write_snapshot(const ParticleList& particles, std::ostream& os);
void write_snapshot(const ParticleList& particles, const std::filesystem::path& path);

//! Throws ConfigError on a missing or unknown version line or a bad row.
std::vector<SnapshotRow> read_snapshot(std::istream& is);
std::vector<SnapshotRow> read_snapshot(const std::filesystem::path& path);

//---------------------------------------------------------------------------//
// Series and convergence
//---------------------------------------------------------------------------//

//! CSV with columns step,time,<metric names>.
void write_series(const BenchmarkMetrics& metrics, std::ostream& os);
void write_series(const BenchmarkMetrics& metrics, const std::filesystem::path& path);

struct ConvergenceRun
{
    int level = 0;
    double h = 0.0;
    double error = 0.0;
};

struct ConvergenceRow
{
    int level = 0;
    double h = 0.0;
    double error = 0.0;
    //! log2(e_{N-1} / e_N); empty on the first row.
    std::optional<double> order;
};

std::vector<ConvergenceRow> convergence_report(const std::vector<ConvergenceRun>& runs);
//! CSV level,h,error,order with a blank order where undefined.
std::string format_convergence_report(const std::vector<ConvergenceRow>& rows);

//---------------------------------------------------------------------------//
// Run driver
//---------------------------------------------------------------------------//

struct RunManifest
{
    //! Scene name or path to a YAML config.
    std::string source;
    std::optional<int> degree;
    std::optional<ProjectionMode> projection;
    std::optional<int> level;
    std::optional<double> dt;
    std::optional<double> t_end;
    //! Snapshot and series cadence in steps; the scene's own when empty.
    std::optional<int> cadence;
    std::filesystem::path output_dir = "out";
    //! Runs are always bit-reproducible; recorded for completeness.
    bool deterministic = true;
};

/*!
 * Resolve the manifest to a validated scene. Overrides are applied and
 * checked against the scene (level only applies to named scenes).
 */
SceneConfig resolve_manifest(const RunManifest& m);

std::string manifest_to_yaml(const RunManifest& m);
RunManifest parse_manifest(const std::string& text);

struct RunResult
{
    SceneConfig config;
    RunSummary summary;
    BenchmarkMetrics metrics;
    std::vector<std::filesystem::path> snapshots;
};

/*!
 * Run a manifest. Writes manifest.yaml, config.yaml, series.csv and
 * snapshot_<step>.csv (step 0, every cadence and the last step) into the
 * output directory, or nothing when write_files is false.
 */
RunResult execute(const RunManifest& m, bool write_files = true);

} // namespace fbarmpm

#endif // FBARMPM_IO_HPP
