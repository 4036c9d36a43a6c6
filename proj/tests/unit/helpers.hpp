// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit tests. det_matrix mirrors the generator in
// tests/oracles/oracles.py so frozen oracle values refer to the same instances.

#pragma once

#include "xlris/linalg.hpp"

#include <cmath>
#include <random>

namespace xlris::test {

inline CMat det_matrix(int rows, int cols, double a, double b) {
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      m(r, c) = cplx(std::cos(a * (r + 1) + b * (c + 1) * (c + 1)), std::sin(b * (r + 1) * (c + 2) - a));
    }
  }
  return m;
}

inline CMat random_cmat(std::mt19937_64& rng, int rows, int cols, double sd = std::sqrt(0.5)) {
  std::normal_distribution<double> n(0.0, sd);
  CMat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = cplx(n(rng), n(rng));
  }
  return m;
}

inline CVec random_cvec(std::mt19937_64& rng, int n) { return random_cmat(rng, n, 1).col(0); }

}  // namespace xlris::test
