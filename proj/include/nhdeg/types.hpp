#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace nhdeg {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Bloch momentum (kx, ky, kz) in radians.
using Momentum = std::array<double, 3>;

constexpr double kPi = 3.14159265358979323846;

// Raised when a requested combination (symmetry kind and band count,
// hopping range along an open axis, ...) is not covered.
class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a dense eigensolver fails; carries the offending matrix.
class NumericFailure : public std::runtime_error {
 public:
  NumericFailure(const std::string& what, CMatrix m)
      : std::runtime_error(what), matrix(std::move(m)) {}
  CMatrix matrix;
};

}  // namespace nhdeg
