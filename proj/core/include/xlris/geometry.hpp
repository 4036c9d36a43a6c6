// SPDX-License-Identifier: Apache-2.0
//
// Near-field main-path channel synthesis for a planar RIS centred at the
// origin of the x-o-y plane. Element (n1, n2) sits at
//   x = (n1 - (N1 + 1) / 2) d,  y = (n2 - (N2 + 1) / 2) d,  z = 0
// and is stored at flat index (n2 - 1) * N1 + (n1 - 1) (n1 fastest).

#pragma once

#include "xlris/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace xlris {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance(const Point3& a, const Point3& b);

struct SystemGeometry {
  double wavelength_m = 0.03;
  double element_spacing_m = 0.015;
  int n1 = 32;
  int n2 = 4;
  int m_antennas = 4;
  Point3 bs_position_m{-40.0, 0.0, -25.0};
  double user_plane_y_m = 0.0;
  double max_power_w = 10.0;
  double noise_power_w = 1e-14;

  /// Geometry with d = lambda / 2.
  static SystemGeometry half_wavelength(double wavelength_m, int n1, int n2, int m_antennas);

  [[nodiscard]] std::size_t elements() const { return static_cast<std::size_t>(n1) * n2; }

  /// Throws InvalidInput on a non-physical configuration.
  void validate() const;

  [[nodiscard]] Point3 element_position(int n1_index, int n2_index) const;  // 1-based
  [[nodiscard]] Point3 antenna_position(int m_index) const;                 // 1-based
  [[nodiscard]] double aperture_m() const;
};

/// Collected channels for a set of users.
struct ChannelSet {
  CMat g_bs_ris;                 // N x M
  std::vector<CVec> h_users;     // K vectors of length N
  std::vector<CMat> cascaded;    // K matrices N x M, diag(conj(h_k)) G
};

/// BS -> RIS main-path channel G (N x M), amplitude |z_b| / D and phase -2 pi D / lambda.
CMat bs_ris_channel(const SystemGeometry& geom);

/// RIS -> user channel h (length N).
CVec ris_user_channel(const SystemGeometry& geom, const Point3& user);

/// diag(conj(h)) * G.
CMat cascaded_channel(const CMat& g, const CVec& h);

/// 2 D^2 / lambda.
double rayleigh_distance(double aperture_m, double wavelength_m);

ChannelSet make_channel_set(const SystemGeometry& geom, const std::vector<Point3>& users);

/// Stable 64-bit FNV-1a digest of every geometry field; identifies the geometry a
/// persisted codebook was built for.
std::uint64_t fingerprint(const SystemGeometry& geom);

}  // namespace xlris
