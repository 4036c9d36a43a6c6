// SPDX-License-Identifier: Apache-2.0

#include "xlris/projections.hpp"

#include <cmath>
#include <string>

namespace xlris {

namespace {

void check_bits(int bits) {
  if (bits < 1 || bits > 24) {
    throw InvalidInput("phase resolution must be between 1 and 24 bits, got " + std::to_string(bits));
  }
}

}  // namespace

DiscretePhaseVector::DiscretePhaseVector(int bits, std::vector<int> indices)
    : bits_(bits), indices_(std::move(indices)) {
  check_bits(bits_);
  for (int z : indices_) {
    if (z < 0 || z >= levels()) {
      throw InvalidInput("phase index " + std::to_string(z) + " outside [0, 2^" +
                         std::to_string(bits_) + ")");
    }
  }
}

DiscretePhaseVector DiscretePhaseVector::zeros(int bits, std::size_t n) {
  return DiscretePhaseVector(bits, std::vector<int>(n, 0));
}

double DiscretePhaseVector::angle(std::size_t n) const {
  return kTwoPi * indices_.at(n) / static_cast<double>(levels());
}

cplx DiscretePhaseVector::value(std::size_t n) const { return grid_point(indices_.at(n), bits_); }

CVec DiscretePhaseVector::values() const {
  CVec out(static_cast<Eigen::Index>(indices_.size()));
  for (std::size_t n = 0; n < indices_.size(); ++n) out(static_cast<Eigen::Index>(n)) = value(n);
  return out;
}

double wrapped_angle(cplx c) {
  if (c == cplx(0.0, 0.0)) return 0.0;
  double a = std::arg(c);
  if (a < 0.0) a += kTwoPi;
  // arg() of values just below the positive real axis can round up to 2 pi.
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

cplx grid_point(int index, int bits) {
  const double a = kTwoPi * index / static_cast<double>(1 << bits);
  return {std::cos(a), std::sin(a)};
}

int cmdpp_index(cplx kappa, int bits) {
  check_bits(bits);
  if (kappa == cplx(0.0, 0.0)) return 0;
  const int levels = 1 << bits;
  const double half = static_cast<double>(1 << (bits - 1));
  const double a = wrapped_angle(kappa);
  const int z = static_cast<int>(std::floor((half * a + kPi) / kPi));
  const double boundary = (2.0 * z - 1.0) * kPi / static_cast<double>(levels);
  const int pick = (a < boundary) ? z - 1 : z;
  return ((pick % levels) + levels) % levels;
}

DiscretePhaseVector cmdpp_project(const CVec& kappa, int bits) {
  std::vector<int> idx(static_cast<std::size_t>(kappa.size()));
  for (Eigen::Index n = 0; n < kappa.size(); ++n) idx[static_cast<std::size_t>(n)] = cmdpp_index(kappa(n), bits);
  return DiscretePhaseVector(bits, std::move(idx));
}

cplx phase_align(cplx e) {
  if (e == cplx(0.0, 0.0)) return {1.0, 0.0};
  return std::polar(1.0, wrapped_angle(e));
}

CVec phase_align(const CVec& e) {
  CVec out(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) out(i) = phase_align(e(i));
  return out;
}

}  // namespace xlris
