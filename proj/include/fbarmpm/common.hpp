//---------------------------------------------------------------------------//
/*!
 * \file common.hpp
 * \brief Shared small-vector types and the error hierarchy.
 */
//---------------------------------------------------------------------------//

#ifndef FBARMPM_COMMON_HPP
#define FBARMPM_COMMON_HPP

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fbarmpm
{

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Index3 = std::array<int, 3>;

//! Invalid input: bad scene description, parameters, selectors.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! Unrecoverable numerical state (inverted particle, non-finite value,
//! non-converged return mapping).
class NumericError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

//! A point was evaluated outside the background domain.
class OutOfDomainError : public NumericError
{
  public:
    using NumericError::NumericError;
};

inline double trace(const Mat3& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

inline Mat3 deviator(const Mat3& a)
{
    Mat3 d = a;
    const double m = trace(a) / 3.0;
    d(0, 0) -= m;
    d(1, 1) -= m;
    d(2, 2) -= m;
    return d;
}

//! Von Mises equivalent stress sqrt(3/2 s:s).
inline double von_mises(const Mat3& stress)
{
    const Mat3 s = deviator(stress);
    return std::sqrt(1.5 * s.cwiseProduct(s).sum());
}

} // namespace fbarmpm

#endif // FBARMPM_COMMON_HPP
