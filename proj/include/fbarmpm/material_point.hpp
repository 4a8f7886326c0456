//---------------------------------------------------------------------------//
/*!
 * \file material_point.hpp
 * \brief Lagrangian material point record.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_MATERIAL_POINT_HPP
#define FBARMPM_MATERIAL_POINT_HPP

#include "fbarmpm/common.hpp"

#include <vector>

namespace fbarmpm
{

struct MaterialPoint
{
    //! Mass [kg].
    double mass = 0.0;
    //! Reference volume [m^3].
    double volume0 = 0.0;
    //! Current volume, det(F) * volume0 [m^3].
    double volume = 0.0;
    //! Position [m].
    Vec3 x = Vec3::Zero();
    //! Position at creation, used for displacement metrics [m].
    Vec3 x0 = Vec3::Zero();
    //! Velocity [m/s].
    Vec3 v = Vec3::Zero();
    //! Deformation gradient.
    Mat3 F = Mat3::Identity();
    //! Cauchy stress carried by the constitutive update [Pa].
    Mat3 stress = Mat3::Zero();
    //! Stress entering the internal force and the outputs: the double-bar
    //! stress with projection, otherwise a copy of `stress` [Pa].
    Mat3 effective_stress = Mat3::Zero();
    //! Velocity gradient of the last step (F-bar modified when enabled) [1/s].
    Mat3 grad_v = Mat3::Zero();
    //! Equivalent plastic strain.
    double eps_plastic = 0.0;
    int material = 0;
};

using ParticleList = std::vector<MaterialPoint>;

} // namespace fbarmpm

#endif // FBARMPM_MATERIAL_POINT_HPP
