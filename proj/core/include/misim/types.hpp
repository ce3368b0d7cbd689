#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace misim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;

inline constexpr Complex kJ{0.0, 1.0};

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double c0 = 299792458.0;            // m/s
inline constexpr double mu0 = 4.0e-7 * pi;           // H/m (conventional value)
inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);  // F/m
inline constexpr double kB = 1.380649e-23;           // J/K
inline constexpr double sigma_copper = 5.8e7;        // S/m
}  // namespace constants

inline double angular(double f_hz) { return 2.0 * constants::pi * f_hz; }
inline double wavenumber(double f_hz) { return 2.0 * constants::pi * f_hz / constants::c0; }

// Error taxonomy. Each maps onto one CLI exit code (see tools/).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SynthesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace misim
