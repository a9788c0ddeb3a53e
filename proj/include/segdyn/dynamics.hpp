#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "segdyn/errors.hpp"
#include "segdyn/ode.hpp"
#include "segdyn/potential.hpp"

namespace segdyn {

inline constexpr double kAxisEpsilon = 1e-10;

struct CartState {
  double xi = 0.0, eta = 0.0, zeta = 0.0;
  double p_xi = 0.0, p_eta = 0.0, p_zeta = 0.0;

  Vec<6> to_array() const { return {xi, eta, zeta, p_xi, p_eta, p_zeta}; }
  static CartState from_array(const Vec<6>& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
  Vec3 position() const { return {xi, eta, zeta}; }
  /// Axial angular momentum eta*p_zeta - zeta*p_eta (equals P_theta).
  double angular_momentum() const { return eta * p_zeta - zeta * p_eta; }
};

/// Cylindrical chart about the segment axis: eta = r cos(theta), zeta = r sin(theta), xi = x.
struct CylState {
  double r = 0.0, theta = 0.0, x = 0.0;
  double P_r = 0.0, P_theta = 0.0, P_x = 0.0;

  Vec<6> to_array() const { return {r, theta, x, P_r, P_theta, P_x}; }
  static CylState from_array(const Vec<6>& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }
};

/// Reduced chart; the angular momentum c is carried outside the state.
struct ReducedState {
  double r = 0.0, x = 0.0, P_r = 0.0, P_x = 0.0;

  Vec<4> to_array() const { return {r, x, P_r, P_x}; }
  static ReducedState from_array(const Vec<4>& v) { return {v[0], v[1], v[2], v[3]}; }
};

inline double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(theta, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

// Canonical lift of (eta, zeta) = (r cos, r sin):
//   p_eta = P_r cos - P_theta sin / r,  p_zeta = P_r sin + P_theta cos / r.
inline CartState to_cartesian(const CylState& c) {
  const double cs = std::cos(c.theta), sn = std::sin(c.theta);
  CartState s;
  s.xi = c.x;
  s.eta = c.r * cs;
  s.zeta = c.r * sn;
  s.p_xi = c.P_x;
  s.p_eta = c.P_r * cs - c.P_theta * sn / c.r;
  s.p_zeta = c.P_r * sn + c.P_theta * cs / c.r;
  return s;
}

inline CylState to_cylindrical(const CartState& s) {
  const double r = std::hypot(s.eta, s.zeta);
  if (!(r > kAxisEpsilon)) {
    std::ostringstream os;
    os << "state at radius " << r << " has no cylindrical representation";
    throw AxisSingularity(os.str());
  }
  CylState c;
  c.r = r;
  c.theta = wrap_angle(std::atan2(s.zeta, s.eta));
  c.x = s.xi;
  c.P_r = (s.eta * s.p_eta + s.zeta * s.p_zeta) / r;
  c.P_theta = s.angular_momentum();
  c.P_x = s.p_xi;
  return c;
}

inline ReducedState reduce(const CylState& c) { return {c.r, c.x, c.P_r, c.P_x}; }

inline CylState lift(const ReducedState& s, double theta, double c) {
  return {s.r, theta, s.x, s.P_r, c, s.P_x};
}

namespace detail {

inline AuxSD aux_rx(double r, double x, double A) {
  const AuxSD a = aux_from_axial(x, std::abs(r), A);
  require_off_segment(a, x, r, kCollisionEpsilon);
  return a;
}

}  // namespace detail

inline Vec<6> eom_cartesian(const CartState& s, double A) {
  const Vec3 f = force_scaled(s.position(), A);
  return {s.p_xi, s.p_eta, s.p_zeta, f[0], f[1], f[2]};
}

/// Derivative of (r, theta, x, P_r, P_theta, P_x). When P_theta == 0 the
/// radius is treated as a signed coordinate along the invariant meridian
/// plane, so the flow passes through the axis.
inline Vec<6> eom_cylindrical(const CylState& s, double A) {
  if (s.P_theta != 0.0 && !(s.r > kAxisEpsilon)) {
    std::ostringstream os;
    os << "radius " << s.r << " too small for nonzero angular momentum " << s.P_theta;
    throw AxisSingularity(os.str());
  }
  const AuxSD a = detail::aux_rx(s.r, s.x, A);
  const auto f = detail::force_sd(a.s, a.d, A);
  const double centrifugal = s.P_theta == 0.0 ? 0.0 : s.P_theta * s.P_theta / (s.r * s.r * s.r);
  const double theta_dot = s.P_theta == 0.0 ? 0.0 : s.P_theta / (s.r * s.r);
  return {s.P_r, theta_dot, s.P_x, centrifugal + f.radial_coeff * s.r, 0.0, f.axial};
}

inline Vec<4> eom_reduced(const ReducedState& s, double A, double c) {
  if (c != 0.0 && !(s.r > kAxisEpsilon)) {
    std::ostringstream os;
    os << "radius " << s.r << " too small for nonzero angular momentum " << c;
    throw AxisSingularity(os.str());
  }
  const AuxSD a = detail::aux_rx(s.r, s.x, A);
  const auto f = detail::force_sd(a.s, a.d, A);
  const double centrifugal = c == 0.0 ? 0.0 : c * c / (s.r * s.r * s.r);
  return {s.P_r, s.P_x, centrifugal + f.radial_coeff * s.r, f.axial};
}

inline double potential_rx(double r, double x, double A) {
  const AuxSD a = detail::aux_rx(r, x, A);
  return detail::potential_sd(a.s, a.d, A);
}

inline double energy(const CartState& s, double A) {
  return 0.5 * (s.p_xi * s.p_xi + s.p_eta * s.p_eta + s.p_zeta * s.p_zeta) + potential_scaled(s.position(), A);
}

inline double energy(const CylState& s, double A) {
  const double centrifugal = s.P_theta == 0.0 ? 0.0 : s.P_theta * s.P_theta / (s.r * s.r);
  return 0.5 * (s.P_r * s.P_r + s.P_x * s.P_x + centrifugal) + potential_rx(s.r, s.x, A);
}

inline double energy(const ReducedState& s, double A, double c) {
  const double centrifugal = c == 0.0 ? 0.0 : c * c / (s.r * s.r);
  return 0.5 * (s.P_r * s.P_r + s.P_x * s.P_x + centrifugal) + potential_rx(s.r, s.x, A);
}

// System functors consumed by the propagator. Each provides the derivative,
// the energy, and s (sum of end-point distances) for collision/escape checks.
// The derivative never throws: off-domain evaluations return NaN so the
// stepper rejects the trial step.

struct CartesianSystem {
  static constexpr std::size_t dim = 6;
  double A = 0.0;

  Vec<6> operator()(double, const Vec<6>& y) const {
    const double rho = std::hypot(y[1], y[2]);
    const AuxSD a = detail::aux_from_axial(y[0], rho, A);
    if (!(a.s - 2.0 > kCollisionEpsilon)) return nan_vec();
    const auto f = detail::force_sd(a.s, a.d, A);
    return {y[3], y[4], y[5], f.axial, f.radial_coeff * y[1], f.radial_coeff * y[2]};
  }
  double sum_distance(const Vec<6>& y) const { return detail::aux_from_axial(y[0], std::hypot(y[1], y[2]), A).s; }
  double energy(const Vec<6>& y) const { return segdyn::energy(CartState::from_array(y), A); }

  static Vec<6> nan_vec() {
    Vec<6> v;
    v.fill(std::numeric_limits<double>::quiet_NaN());
    return v;
  }
};

struct CylindricalSystem {
  static constexpr std::size_t dim = 6;
  double A = 0.0;

  Vec<6> operator()(double, const Vec<6>& y) const {
    const double r = y[0], P_theta = y[4];
    const AuxSD a = detail::aux_from_axial(y[2], std::abs(r), A);
    if (!(a.s - 2.0 > kCollisionEpsilon) || (P_theta != 0.0 && !(r > kAxisEpsilon))) {
      return CartesianSystem::nan_vec();
    }
    const auto f = detail::force_sd(a.s, a.d, A);
    const double centrifugal = P_theta == 0.0 ? 0.0 : P_theta * P_theta / (r * r * r);
    const double theta_dot = P_theta == 0.0 ? 0.0 : P_theta / (r * r);
    return {y[3], theta_dot, y[5], centrifugal + f.radial_coeff * r, 0.0, f.axial};
  }
  double sum_distance(const Vec<6>& y) const { return detail::aux_from_axial(y[2], std::abs(y[0]), A).s; }
  double energy(const Vec<6>& y) const { return segdyn::energy(CylState::from_array(y), A); }
};

struct ReducedSystem {
  static constexpr std::size_t dim = 4;
  double A = 0.0;
  double c = 0.0;

  Vec<4> operator()(double, const Vec<4>& y) const {
    const double r = y[0];
    const AuxSD a = detail::aux_from_axial(y[1], std::abs(r), A);
    if (!(a.s - 2.0 > kCollisionEpsilon) || (c != 0.0 && !(r > kAxisEpsilon))) {
      Vec<4> v;
      v.fill(std::numeric_limits<double>::quiet_NaN());
      return v;
    }
    const auto f = detail::force_sd(a.s, a.d, A);
    const double centrifugal = c == 0.0 ? 0.0 : c * c / (r * r * r);
    return {y[2], y[3], centrifugal + f.radial_coeff * r, f.axial};
  }
  double sum_distance(const Vec<4>& y) const { return detail::aux_from_axial(y[1], std::abs(y[0]), A).s; }
  double energy(const Vec<4>& y) const { return segdyn::energy(ReducedState::from_array(y), A, c); }
};

/// Signed-radius states (possible when P_theta == 0) mapped back to r >= 0.
inline CylState normalize(CylState s) {
  if (s.r < 0.0) {
    s.r = -s.r;
    s.P_r = -s.P_r;
    s.theta += std::numbers::pi;
  }
  s.theta = wrap_angle(s.theta);
  return s;
}

}  // namespace segdyn
