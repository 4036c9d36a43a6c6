// SPDX-License-Identifier: Apache-2.0

#include "xlris/geometry.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace xlris {

double distance(const Point3& a, const Point3& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  const double dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

SystemGeometry SystemGeometry::half_wavelength(double wavelength_m, int n1, int n2, int m_antennas) {
  SystemGeometry g;
  g.wavelength_m = wavelength_m;
  g.element_spacing_m = wavelength_m / 2.0;
  g.n1 = n1;
  g.n2 = n2;
  g.m_antennas = m_antennas;
  return g;
}

void SystemGeometry::validate() const {
  if (!(wavelength_m > 0.0)) throw InvalidInput("geometry.wavelength_m must be positive");
  if (std::abs(element_spacing_m - wavelength_m / 2.0) > 1e-12 * wavelength_m) {
    throw InvalidInput("geometry.element_spacing_m must equal wavelength_m / 2");
  }
  if (n1 < 1 || n2 < 1) throw InvalidInput("geometry.n1 and geometry.n2 must be >= 1");
  if (m_antennas < 1) throw InvalidInput("geometry.m_antennas must be >= 1");
  if (!(max_power_w > 0.0)) throw InvalidInput("geometry.max_power must be positive");
  if (!(noise_power_w > 0.0)) throw InvalidInput("geometry.noise_power must be positive");
  if (bs_position_m.z == 0.0) throw InvalidInput("geometry.bs_position: z must be non-zero");
}

Point3 SystemGeometry::element_position(int n1_index, int n2_index) const {
  return {(n1_index - (n1 + 1) / 2.0) * element_spacing_m,
          (n2_index - (n2 + 1) / 2.0) * element_spacing_m, 0.0};
}

Point3 SystemGeometry::antenna_position(int m_index) const {
  return {bs_position_m.x + (m_index - 1) * element_spacing_m, bs_position_m.y, bs_position_m.z};
}

double SystemGeometry::aperture_m() const {
  const double ax = (n1 - 1) * element_spacing_m;
  const double ay = (n2 - 1) * element_spacing_m;
  return std::sqrt(ax * ax + ay * ay);
}

CMat bs_ris_channel(const SystemGeometry& geom) {
  geom.validate();
  const int N1 = geom.n1;
  const int N2 = geom.n2;
  const double d = geom.element_spacing_m;
  const auto& b = geom.bs_position_m;
  const double d0 = std::abs(b.z);
  const double k = kTwoPi / geom.wavelength_m;

  CMat g(static_cast<Eigen::Index>(geom.elements()), geom.m_antennas);
  for (int m = 1; m <= geom.m_antennas; ++m) {
    for (int n2 = 1; n2 <= N2; ++n2) {
      for (int n1 = 1; n1 <= N1; ++n1) {
        const double ex = b.x + (2.0 * m + N1 - 2.0 * n1 - 1.0) * d / 2.0;
        const double ey = b.y + (N2 - 2.0 * n2 + 1.0) * d / 2.0;
        const double dist = std::sqrt(ex * ex + ey * ey + b.z * b.z);
        g((n2 - 1) * N1 + (n1 - 1), m - 1) = std::polar(d0 / dist, -k * dist);
      }
    }
  }
  return g;
}

CVec ris_user_channel(const SystemGeometry& geom, const Point3& user) {
  if (user.z == 0.0) throw InvalidInput("user position lies in the RIS plane (z = 0)");
  const int N1 = geom.n1;
  const int N2 = geom.n2;
  const double d = geom.element_spacing_m;
  const double d0 = std::abs(user.z);
  const double k = kTwoPi / geom.wavelength_m;

  CVec h(static_cast<Eigen::Index>(geom.elements()));
  for (int n2 = 1; n2 <= N2; ++n2) {
    const double ey = user.y + ((N2 + 1) / 2.0 - n2) * d;
    for (int n1 = 1; n1 <= N1; ++n1) {
      const double ex = user.x + ((N1 + 1) / 2.0 - n1) * d;
      const double dist = std::sqrt(ex * ex + ey * ey + user.z * user.z);
      h((n2 - 1) * N1 + (n1 - 1)) = std::polar(d0 / dist, -k * dist);
    }
  }
  return h;
}

CMat cascaded_channel(const CMat& g, const CVec& h) {
  if (g.rows() != h.size()) {
    throw InvalidInput("cascaded_channel: G has " + std::to_string(g.rows()) +
                       " rows but h has " + std::to_string(h.size()) + " entries");
  }
  return h.conjugate().asDiagonal() * g;
}

double rayleigh_distance(double aperture_m, double wavelength_m) {
  if (!(aperture_m > 0.0) || !(wavelength_m > 0.0)) {
    throw InvalidInput("rayleigh_distance: aperture and wavelength must be positive");
  }
  return 2.0 * aperture_m * aperture_m / wavelength_m;
}

ChannelSet make_channel_set(const SystemGeometry& geom, const std::vector<Point3>& users) {
  ChannelSet set;
  set.g_bs_ris = bs_ris_channel(geom);
  set.h_users.reserve(users.size());
  set.cascaded.reserve(users.size());
  for (const auto& u : users) {
    set.h_users.push_back(ris_user_channel(geom, u));
    set.cascaded.push_back(cascaded_channel(set.g_bs_ris, set.h_users.back()));
  }
  return set;
}

std::uint64_t fingerprint(const SystemGeometry& geom) {
  char buf[512];
  const int len = std::snprintf(
      buf, sizeof(buf), "%.17g|%.17g|%d|%d|%d|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g", geom.wavelength_m,
      geom.element_spacing_m, geom.n1, geom.n2, geom.m_antennas, geom.bs_position_m.x, geom.bs_position_m.y,
      geom.bs_position_m.z, geom.user_plane_y_m, geom.max_power_w, geom.noise_power_w);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (int i = 0; i < len; ++i) {
    h ^= static_cast<unsigned char>(buf[i]);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace xlris
