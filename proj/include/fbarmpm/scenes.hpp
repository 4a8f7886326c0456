//---------------------------------------------------------------------------//
/*!
 * \file scenes.hpp
 * \brief Declarative scene descriptions, the four benchmark builders and
 *        their diagnostics.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_SCENES_HPP
#define FBARMPM_SCENES_HPP

#include "fbarmpm/solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fbarmpm
{

struct GridSpec
{
    Vec3 origin = Vec3::Zero();
    Vec3 extent = Vec3::Ones();
    Index3 elements{1, 1, 1};
    int degree = 2;
};

struct MaterialSpec
{
    std::string name;
    Material model = ElasticParams{};
};

struct UniformVelocity
{
    Vec3 value = Vec3::Zero();
};

//! v_x = amplitude * sin(pi x / length).
struct SineVelocityX
{
    double amplitude = 0.0;
    double length = 1.0;
};

using VelocityInit = std::variant<UniformVelocity, SineVelocityX>;

struct BodySpec
{
    std::string material;
    Box box;
    Index3 ppc{1, 1, 1};
    GeometryMask mask = NoMask{};
    VelocityInit velocity = UniformVelocity{};
};

//! Uniform traction on the particles whose initial position lies in region;
//! total force = traction * area.
struct TractionSpec
{
    Box region;
    Vec3 traction = Vec3::Zero();
    double area = 0.0;
};

struct SceneConfig
{
    std::string name = "custom";
    GridSpec grid;
    ProjectionMode projection = ProjectionMode::off;
    std::vector<MaterialSpec> materials;
    std::vector<BodySpec> bodies;
    BoundaryConditionSet boundary;
    Vec3 body_force = Vec3::Zero();
    std::vector<TractionSpec> tractions;
    TimeControls time;
    //! Point whose nearest initial particle is tracked by tip_displacement.
    std::optional<Vec3> probe;
    std::vector<std::string> metrics;
};

//! Names accepted in SceneConfig::metrics.
const std::vector<std::string>& metric_names();

/*!
 * Check everything that can be checked without building particles. Throws
 * ConfigError naming the offending key.
 */
void validate(const SceneConfig& cfg);

//! Build the simulation state (validates first).
SimState make_state(const SceneConfig& cfg);

//---------------------------------------------------------------------------//
// Benchmarks
//---------------------------------------------------------------------------//

//! Longitudinally vibrating bar with fixed ends; level 1..3.
SceneConfig vibrating_bar_scene(int level, int degree, ProjectionMode projection);

//! Exact displacement u(x, t) = v0 L / (pi c) sin(pi c t / L) sin(pi x / L).
double vibrating_bar_analytic(double x, double t, double v0 = 0.1, double length = 25.0,
                              double wave_speed = 10.0);

//! Cook's tapered membrane under an end shear load; level 1..3.
SceneConfig cook_membrane_scene(int level, int degree, ProjectionMode projection);

//! Plane strain block collapsing under body force. level 2 is the reference
//! 30x20 background, level 1 halves the elements per in-plane axis.
SceneConfig elastoplastic_collapse_scene(int degree, ProjectionMode projection, int level = 2);

enum class TaylorResolution
{
    desk,
    full
};

//! Quarter-symmetry Taylor impact against a rigid wall at z = 0.
SceneConfig taylor_bar_scene(TaylorResolution resolution, int degree, ProjectionMode projection);

struct SceneOptions
{
    std::optional<int> degree;
    std::optional<ProjectionMode> projection;
    std::optional<int> level;
};

const std::vector<std::string>& scene_names();
bool is_scene_name(const std::string& name);

/*!
 * Build a benchmark by name. Levels: vibrating_bar and cook_membrane 1..3
 * (default 1), elastoplastic_collapse 1..2 (default 2), taylor_bar 1 = desk,
 * 2 = full (default 1). Default degree 2 with pminus1 projection.
 */
SceneConfig make_scene(const std::string& name, const SceneOptions& opts = {});

//---------------------------------------------------------------------------//
// Diagnostics
//---------------------------------------------------------------------------//

/*!
 * sqrt(sum V |u - u_exact|^2 / sum V) with u = x - x0 and
 * u_exact = (exact(x0, t), 0, 0).
 */
template <class Exact>
double l2_displacement_error(const ParticleList& particles, double t, Exact&& exact)
{
    double num = 0.0;
    double den = 0.0;
    for (const MaterialPoint& mp : particles)
    {
        Vec3 e = mp.x - mp.x0;
        e[0] -= exact(mp.x0[0], t);
        num += mp.volume * e.squaredNorm();
        den += mp.volume;
    }
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

//! Radius (max distance of a particle from the axis through `axis_xy`
//! along z) and height (max z), both in cm.
std::pair<double, double> final_bar_dimensions(const ParticleList& particles,
                                               const std::array<double, 2>& axis_xy = {0.0, 0.0});

/*!
 * Roughness of the hydrostatic stress field: at every particle a linear
 * function is least-squares fitted to the hydrostatic stress of all
 * particles within `radius`; the result is the volume-weighted RMS of the
 * particle value minus the fit at the particle [Pa]. Zero for any globally
 * linear field.
 */
double pressure_roughness(const ParticleList& particles, double radius);

//! max over particles of |y - y0|.
double max_vertical_displacement(const ParticleList& particles);

//! Named scalar series sampled during a run.
struct BenchmarkMetrics
{
    std::vector<std::string> names;
    std::vector<long> steps;
    std::vector<double> times;
    std::vector<std::vector<double>> rows;

    std::optional<double> last(const std::string& name) const;
};

//! Evaluates the metrics named in a scene against a running state.
class MetricRecorder
{
  public:
    MetricRecorder(const SceneConfig& cfg, const SimState& initial);

    const std::vector<std::string>& names() const { return names_; }
    std::vector<double> evaluate(const SimState& state) const;
    void record(const SimState& state, BenchmarkMetrics& out) const;

  private:
    std::vector<std::string> names_;
    std::size_t probe_particle_ = 0;
    double v0_ = 0.0;
    double length_ = 1.0;
    double wave_speed_ = 1.0;
    double roughness_radius_ = 1.0;
    std::array<double, 2> axis_{0.0, 0.0};
};

} // namespace fbarmpm

#endif // FBARMPM_SCENES_HPP
