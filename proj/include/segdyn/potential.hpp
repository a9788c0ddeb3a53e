#pragma once

// Closed-form potential of the linear-density segment and its gradient.
//
// Scaled chart: the segment occupies xi in [-1-A, 1-A] on the xi axis and
//   U(Q; A) = 3 A d - (3 A d s + 4) / 4 * ln((s + 2) / (s - 2)),
// with s = R1 + R2, d = R1 - R2, R1 = |Q - (1-A, 0, 0)|, R2 = |Q - (-1-A, 0, 0)|.
//
// This expression is the line integral of the weight (1 - 3 A y), y in [-1, 1]
// measured from the segment midpoint, so the heavier end is the one at
// xi = -1-A. The oracle in potential_oracle.hpp integrates exactly that.

#include <array>
#include <cmath>
#include <sstream>

#include "segdyn/errors.hpp"
#include "segdyn/units.hpp"

namespace segdyn {

using Vec3 = std::array<double, 3>;

inline constexpr double kCollisionEpsilon = 1e-12;

struct AuxSD {
  double s = 0.0;
  double d = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
};

namespace detail {

// ln((s+2)/(s-2)) without cancellation for large s.
inline double log_ratio(double s) { return std::log1p(4.0 / (s - 2.0)); }

inline AuxSD aux_from_axial(double axial, double rho, double A) {
  AuxSD a;
  a.R1 = std::hypot(axial + A - 1.0, rho);
  a.R2 = std::hypot(axial + A + 1.0, rho);
  a.s = a.R1 + a.R2;
  a.d = a.R1 - a.R2;
  return a;
}

inline void require_off_segment(const AuxSD& a, double axial, double rho, double epsilon) {
  if (!(a.s - 2.0 > epsilon)) {
    std::ostringstream os;
    os << "point (axial=" << axial << ", radius=" << rho << ") lies on the segment (s-2=" << a.s - 2.0
       << ")";
    throw OnSegment(os.str());
  }
}

inline double potential_sd(double s, double d, double A) {
  return 3.0 * A * d - 0.25 * (3.0 * A * d * s + 4.0) * log_ratio(s);
}

/// Force split into the axial component and the radial coefficient k such that
/// the transverse force is k * (eta, zeta).
struct AxialForce {
  double axial = 0.0;
  double radial_coeff = 0.0;
};

inline AxialForce force_sd(double s, double d, double A) {
  const double s2 = s * s;
  const double sd2 = s2 - d * d;
  AxialForce f;
  f.axial = (4.0 * d + 12.0 * A * s) / sd2 - 3.0 * A * log_ratio(s);
  f.radial_coeff = -16.0 * (3.0 * A * d + s) / (sd2 * (s2 - 4.0));
  return f;
}

}  // namespace detail

inline AuxSD aux_sd(const Vec3& Q, double A, double collision_epsilon = kCollisionEpsilon) {
  const double rho = std::hypot(Q[1], Q[2]);
  const AuxSD a = detail::aux_from_axial(Q[0], rho, A);
  detail::require_off_segment(a, Q[0], rho, collision_epsilon);
  return a;
}

inline double potential_scaled(const Vec3& Q, double A) {
  const AuxSD a = aux_sd(Q, A);
  return detail::potential_sd(a.s, a.d, A);
}

/// -grad U in the scaled chart.
inline Vec3 force_scaled(const Vec3& Q, double A) {
  const AuxSD a = aux_sd(Q, A);
  const auto f = detail::force_sd(a.s, a.d, A);
  return {f.axial, f.radial_coeff * Q[1], f.radial_coeff * Q[2]};
}

/// Physical potential (per unit test mass) at P = (u, v, w), measured in the
/// frame whose origin is the center of mass. Uses c1 = 2 L alpha and
/// c2 = beta - alpha L.
inline double potential_physical(const Vec3& P, const SegmentParams& seg) {
  const double L = seg.L();
  const double G = seg.G();
  const double cbar = seg.center_of_mass();
  const double rho = std::hypot(P[1], P[2]);
  const double r1 = std::hypot(-L + P[0] + cbar, rho);
  const double r2 = std::hypot(L + P[0] + cbar, rho);
  if (!((r1 + r2) / L - 2.0 > kCollisionEpsilon)) {
    std::ostringstream os;
    os << "physical point (" << P[0] << ", " << P[1] << ", " << P[2] << ") lies on the segment";
    throw OnSegment(os.str());
  }
  const double c1 = 2.0 * L * seg.alpha();
  const double c2 = seg.beta() - seg.alpha() * L;
  const double log_term = std::log1p(4.0 * L / (r1 + r2 - 2.0 * L));
  return c1 * G / (2.0 * L) * (r1 - r2) -
         G / (8.0 * L * L) * (c1 * (4.0 * L * L + r1 * r1 - r2 * r2) + 8.0 * c2 * L * L) * log_term;
}

}  // namespace segdyn
