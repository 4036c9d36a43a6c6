// SPDX-License-Identifier: Apache-2.0
//
// Dense complex linear-algebra aliases and the column-major vec/unvec helpers
// shared by every solver in the library.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>

namespace xlris {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when an input violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative kernel fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stacks the columns of `m` into one vector (column-major).
inline CVec vec(const CMat& m) {
  return Eigen::Map<const CVec>(m.data(), m.size());
}

/// Inverse of vec(): fills a rows x cols matrix column by column.
inline CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows * cols != v.size()) {
    throw InvalidInput("unvec: size mismatch");
  }
  return Eigen::Map<const CMat>(v.data(), rows, cols);
}

inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

/// Hermitian part (A + A^H) / 2; guards eigen-solvers against round-off asymmetry.
inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace xlris
