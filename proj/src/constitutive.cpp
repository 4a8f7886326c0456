//---------------------------------------------------------------------------//
/*!
 * \file constitutive.cpp
 */
//---------------------------------------------------------------------------//

#include "fbarmpm/constitutive.hpp"

#include <cmath>
#include <sstream>

namespace fbarmpm
{

namespace
{
const double sqrt_two_thirds = std::sqrt(2.0 / 3.0);
}

double ElasticParams::wave_speed() const { return std::sqrt((lambda + 2.0 * mu) / density); }

ElasticParams make_elastic(double youngs_modulus, double poisson_ratio, double density)
{
    if (!(youngs_modulus > 0.0))
        throw ConfigError("youngs_modulus must be positive");
    if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5))
        throw ConfigError("poisson_ratio must lie in (-1, 0.5)");
    if (!(density > 0.0))
        throw ConfigError("density must be positive");
    ElasticParams p;
    p.youngs_modulus = youngs_modulus;
    p.poisson_ratio = poisson_ratio;
    p.density = density;
    p.mu = youngs_modulus / (2.0 * (1.0 + poisson_ratio));
    p.lambda = 2.0 * p.mu * poisson_ratio / (1.0 - 2.0 * poisson_ratio);
    return p;
}

double J2Params::flow_stress(double eps_p) const
{
    if (const auto* pl = std::get_if<PowerLawHardening>(&hardening))
        return yield_stress * std::pow(1.0 + pl->coefficient * eps_p, pl->exponent);
    return yield_stress;
}

double J2Params::flow_stress_slope(double eps_p) const
{
    if (const auto* pl = std::get_if<PowerLawHardening>(&hardening))
        return yield_stress * pl->coefficient * pl->exponent *
               std::pow(1.0 + pl->coefficient * eps_p, pl->exponent - 1.0);
    return 0.0;
}

J2Params make_j2(const ElasticParams& elastic, double yield_stress, const Hardening& hardening)
{
    if (!(yield_stress > 0.0))
        throw ConfigError("yield_stress must be positive");
    if (const auto* pl = std::get_if<PowerLawHardening>(&hardening))
    {
        if (!(pl->coefficient >= 0.0) || !(pl->exponent >= 0.0))
            throw ConfigError("power-law hardening needs non-negative coefficient and exponent");
    }
    return J2Params{elastic, yield_stress, hardening};
}

const ElasticParams& elastic_part(const Material& m)
{
    if (const auto* j2 = std::get_if<J2Params>(&m))
        return j2->elastic;
    return std::get<ElasticParams>(m);
}

Mat3 elastic_rate_update(const Mat3& stress, const Mat3& rate_of_deformation, const Mat3& spin,
                         double dt, const ElasticParams& p)
{
    const double tr_d = trace(rate_of_deformation);
    Mat3 rate = 2.0 * p.mu * rate_of_deformation + spin * stress + stress * spin.transpose();
    rate(0, 0) += p.lambda * tr_d;
    rate(1, 1) += p.lambda * tr_d;
    rate(2, 2) += p.lambda * tr_d;
    const Mat3 s = stress + dt * rate;
    return 0.5 * (s + s.transpose());
}

double yield_function(const Mat3& stress, double eps_p, const J2Params& p)
{
    return deviator(stress).norm() - sqrt_two_thirds * p.flow_stress(eps_p);
}

ReturnMapResult j2_radial_return(const Mat3& trial_stress, double eps_p, const J2Params& p)
{
    ReturnMapResult r;
    r.stress = trial_stress;
    r.eps_plastic = eps_p;

    const Mat3 s = deviator(trial_stress);
    const double q = s.norm();
    const double f = q - sqrt_two_thirds * p.flow_stress(eps_p);
    if (f <= 0.0)
        return r;

    const double two_mu = 2.0 * p.elastic.mu;
    const double tol = 1e-10 * p.yield_stress;
    double dg = 0.0;
    bool converged = false;
    for (int it = 1; it <= 50; ++it)
    {
        const double e = eps_p + sqrt_two_thirds * dg;
        const double g = q - two_mu * dg - sqrt_two_thirds * p.flow_stress(e);
        r.iterations = it;
        const double dgdx = -two_mu - (2.0 / 3.0) * p.flow_stress_slope(e);
        // The last correction is applied even once |g| is within tolerance.
        dg -= g / dgdx;
        if (std::abs(g) <= tol)
        {
            converged = true;
            break;
        }
    }
    if (!converged || !std::isfinite(dg))
    {
        std::ostringstream os;
        os.precision(17);
        os << "J2 return mapping did not converge (||s_trial|| = " << q << ", eps_p = " << eps_p << ")";
        throw NumericError(os.str());
    }

    const double pressure = trace(trial_stress) / 3.0;
    const double scale = 1.0 - two_mu * dg / q;
    r.stress = scale * s;
    r.stress(0, 0) += pressure;
    r.stress(1, 1) += pressure;
    r.stress(2, 2) += pressure;
    r.eps_plastic = eps_p + sqrt_two_thirds * dg;
    r.delta_gamma = dg;
    r.plastic = true;
    return r;
}

void update_stress(MaterialPoint& mp, const Material& material, const Mat3& grad_v, double dt)
{
    const Mat3 d = 0.5 * (grad_v + grad_v.transpose());
    const Mat3 w = 0.5 * (grad_v - grad_v.transpose());
    const Mat3 trial = elastic_rate_update(mp.stress, d, w, dt, elastic_part(material));
    if (const auto* j2 = std::get_if<J2Params>(&material))
    {
        const ReturnMapResult r = j2_radial_return(trial, mp.eps_plastic, *j2);
        mp.stress = r.stress;
        mp.eps_plastic = r.eps_plastic;
    }
    else
        mp.stress = trial;
}

} // namespace fbarmpm
