#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace leosec {

using cdouble = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kLn2 = std::numbers::ln2;
inline constexpr double kSpeedOfLight = 299792458.0;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (non-finite, out of range, mismatched sizes).
class InvalidInput : public Error {
public:
  using Error::Error;
};

/// Two points that must be distinct coincide (wave vectors, elevation, spacing linearization).
class DegenerateGeometry : public Error {
public:
  using Error::Error;
};

/// No satellite clears the elevation mask in a slot.
class EmptyVisibility : public Error {
public:
  using Error::Error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

inline void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw InvalidInput(std::string(name) + " must be finite");
}

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// dBm to watts: 10^((dbm - 30) / 10).
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Hermitian part (M + M^H) / 2.
inline CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace leosec
