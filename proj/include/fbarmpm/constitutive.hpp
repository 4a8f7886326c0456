//---------------------------------------------------------------------------//
/*!
 * \file constitutive.hpp
 * \brief Hypoelastic (Jaumann rate) stress updates and J2 plasticity.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_CONSTITUTIVE_HPP
#define FBARMPM_CONSTITUTIVE_HPP

#include "fbarmpm/material_point.hpp"

#include <variant>

namespace fbarmpm
{

//! Isotropic linear elastic constants. lambda and mu are derived.
struct ElasticParams
{
    double youngs_modulus = 0.0;
    double poisson_ratio = 0.0;
    double density = 0.0;
    double lambda = 0.0;
    double mu = 0.0;

    //! Dilatational wave speed sqrt((lambda + 2 mu) / rho).
    double wave_speed() const;
};

//! Throws ConfigError unless E > 0, -1 < nu < 0.5 and rho > 0.
ElasticParams make_elastic(double youngs_modulus, double poisson_ratio, double density);

struct PerfectPlasticity
{
};

//! K(e) = sigma_Y (1 + A e)^m.
struct PowerLawHardening
{
    double coefficient = 0.0;
    double exponent = 0.0;
};

using Hardening = std::variant<PerfectPlasticity, PowerLawHardening>;

struct J2Params
{
    ElasticParams elastic;
    double yield_stress = 0.0;
    Hardening hardening = PerfectPlasticity{};

    //! Hardening function K(eps_p).
    double flow_stress(double eps_p) const;
    //! dK/d(eps_p).
    double flow_stress_slope(double eps_p) const;
};

//! Throws ConfigError unless sigma_Y > 0 and K is non-decreasing.
J2Params make_j2(const ElasticParams& elastic, double yield_stress, const Hardening& hardening);

using Material = std::variant<ElasticParams, J2Params>;

const ElasticParams& elastic_part(const Material& m);

/*!
 * Jaumann-rate hypoelastic update
 *   sigma + dt (lambda tr(D) I + 2 mu D + omega sigma + sigma omega^T),
 * symmetrized.
 */
Mat3 elastic_rate_update(const Mat3& stress, const Mat3& rate_of_deformation, const Mat3& spin,
                         double dt, const ElasticParams& p);

//! f = ||dev(sigma)|| - sqrt(2/3) K(eps_p), Frobenius norm.
double yield_function(const Mat3& stress, double eps_p, const J2Params& p);

struct ReturnMapResult
{
    Mat3 stress = Mat3::Zero();
    double eps_plastic = 0.0;
    double delta_gamma = 0.0;
    int iterations = 0;
    bool plastic = false;
};

/*!
 * Radial return of an elastic trial stress. The consistency parameter solves
 *   ||s_trial|| - 2 mu dg - sqrt(2/3) K(eps_p + sqrt(2/3) dg) = 0
 * by Newton iteration to |g| <= 1e-10 sigma_Y within 50 iterations, else
 * NumericError. The hydrostatic part is left untouched.
 */
ReturnMapResult j2_radial_return(const Mat3& trial_stress, double eps_p, const J2Params& p);

//! D and omega from L, rate update and (for J2) the return mapping.
void update_stress(MaterialPoint& mp, const Material& material, const Mat3& grad_v, double dt);

} // namespace fbarmpm

#endif // FBARMPM_CONSTITUTIVE_HPP
