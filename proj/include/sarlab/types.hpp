#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Core>

namespace sarlab {

using cd = std::complex<double>;
using Index = Eigen::Index;
using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Radial wavenumber k = 2*pi*f/c.
inline double wavenumber(double frequency_hz) { return kTwoPi * frequency_hz / kSpeedOfLight; }

}  // namespace sarlab
