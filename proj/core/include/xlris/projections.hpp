// SPDX-License-Identifier: Apache-2.0
//
// Closed-form nearest-point maps onto the v-bit unit-circle alphabet
// {exp(j 2 pi z / 2^v) : z = 0 .. 2^v - 1} and onto the continuous unit circle.

#pragma once

#include "xlris/linalg.hpp"

#include <cstdint>
#include <vector>

namespace xlris {

/// RIS configuration on the v-bit grid. Values are always synthesised from the
/// integer angle indices, so every entry lies exactly on the alphabet.
class DiscretePhaseVector {
 public:
  DiscretePhaseVector() = default;
  DiscretePhaseVector(int bits, std::vector<int> indices);

  /// All-zero-angle configuration of length n.
  static DiscretePhaseVector zeros(int bits, std::size_t n);

  [[nodiscard]] int bits() const { return bits_; }
  [[nodiscard]] int levels() const { return 1 << bits_; }
  [[nodiscard]] std::size_t size() const { return indices_.size(); }
  [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
  [[nodiscard]] double angle(std::size_t n) const;
  [[nodiscard]] cplx value(std::size_t n) const;
  [[nodiscard]] CVec values() const;

  bool operator==(const DiscretePhaseVector&) const = default;

 private:
  int bits_ = 1;
  std::vector<int> indices_;
};

/// Angle of `c` normalised to [0, 2 pi). Zero maps to 0.
double wrapped_angle(cplx c);

/// Unit-modulus value of angle index z on the v-bit grid.
cplx grid_point(int index, int bits);

/// Index of the v-bit grid point nearest to kappa. Midpoints between two grid
/// points resolve to the larger angle; kappa == 0 maps to index 0.
int cmdpp_index(cplx kappa, int bits);

inline cplx cmdpp_project(cplx kappa, int bits) { return grid_point(cmdpp_index(kappa, bits), bits); }

/// Element-wise projection of a vector onto the v-bit alphabet.
DiscretePhaseVector cmdpp_project(const CVec& kappa, int bits);

/// exp(j angle(e)); 1 for e == 0.
cplx phase_align(cplx e);
CVec phase_align(const CVec& e);

}  // namespace xlris
