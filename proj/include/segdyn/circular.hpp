#pragma once

// Circular orbits of the axisymmetric problem: equilibria (r*, x*, 0, 0) of the
// reduced system, found as roots of F1 = F2 = 0 in the (s, d) chart.

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "segdyn/errors.hpp"
#include "segdyn/potential.hpp"
#include "segdyn/units.hpp"

namespace segdyn {

struct CircularOrbit {
  double A = 0.0;
  double s_star = 0.0;
  double d_star = 0.0;
  double c_star = 0.0;  // prograde; the retrograde orbit has -c_star
  double r_star = 0.0;
  double x_star = 0.0;
  double T = 0.0;
  double res_F1 = 0.0;
  double res_F2 = 0.0;
  int iterations = 0;
};

struct Residuals {
  double F1 = 0.0;
  double F2 = 0.0;
};

using Jacobian2 = std::array<std::array<double, 2>, 2>;

namespace detail {

inline void require_sd_domain(double s, double d) {
  if (!(s > 2.0) || !(std::abs(d) < 2.0)) {
    std::ostringstream os;
    os << "(s, d) = (" << s << ", " << d << ") outside s > 2, |d| < 2";
    throw DomainViolation(os.str());
  }
}

// atanh(u)/u - 1 for 0 < u < 1, accurate for small u.
inline double atanh_ratio_minus_one(double u) {
  if (u < 0.1) {
    const double u2 = u * u;
    double term = u2, sum = 0.0;
    for (int k = 1; k < 40; ++k) {
      const double add = term / (2.0 * k + 1.0);
      sum += add;
      if (add < 1e-18 * sum) break;
      term *= u2;
    }
    return sum;
  }
  return std::atanh(u) / u - 1.0;
}

// Magnitudes used to turn raw residuals into relative ones.
inline double f1_scale(double s, double d, double A, double c) {
  const double q = (d * d - 4.0);
  return q * q * (s * s - 4.0) * std::abs(3.0 * A * d + s) + 16.0 * c * c * std::abs(d * d - s * s);
}

inline double f2_scale(double s, double d, double A) {
  return 1.0 + std::abs(3.0 * A * s) + std::abs(d) + std::abs(0.75 * A * (d * d - s * s) * log_ratio(s));
}

}  // namespace detail

inline Residuals residuals(double s, double d, double A, double c) {
  detail::require_sd_domain(s, d);
  const double q = d * d - 4.0;
  Residuals r;
  r.F1 = q * q * (s * s - 4.0) * (3.0 * A * d + s) + 16.0 * c * c * (d * d - s * s);
  r.F2 = 3.0 * A * s + d + 0.75 * A * (d * d - s * s) * detail::log_ratio(s);
  return r;
}

/// Rows (F1, F2), columns (d/ds, d/dd).
inline Jacobian2 residual_jacobian(double s, double d, double A, double c) {
  detail::require_sd_domain(s, d);
  const double q = d * d - 4.0;
  const double s24 = s * s - 4.0;
  const double lin = 3.0 * A * d + s;
  const double ell = detail::log_ratio(s);
  Jacobian2 J{};
  J[0][0] = q * q * (2.0 * s * lin + s24) - 32.0 * c * c * s;
  J[0][1] = 4.0 * d * q * s24 * lin + q * q * s24 * 3.0 * A + 32.0 * c * c * d;
  J[1][0] = 3.0 * A + 0.75 * A * (-2.0 * s * ell - 4.0 * (d * d - s * s) / s24);
  J[1][1] = 1.0 + 1.5 * A * d * ell;
  return J;
}

inline double s0_for_c(double c) {
  if (c == 0.0) throw ZeroAngularMomentum("circular orbit needs nonzero angular momentum");
  const double c2 = c * c;
  return 0.5 * (c2 + std::sqrt(c2 * c2 + 16.0));
}

struct DBranches {
  double plus = 0.0;
  double minus = 0.0;
};

/// Both roots in d of F2(s, d; A) = 0, for 0 < A < 1/3.
inline DBranches d_branches(double s, double A) {
  if (!(s > 2.0)) throw DomainViolation("d branches need s > 2");
  if (!(A > 0.0) || !(A < 1.0 / 3.0)) throw DomainViolation("d branches need 0 < A < 1/3");
  const double ell = detail::log_ratio(s);
  const double a = 3.0 * A * s * ell - 6.0 * A;
  const double root = std::sqrt(a * a + 4.0 - 36.0 * A * A);
  // s*ell - 4 = 4 (atanh(u)/u - 1) with u = 2/s; the + branch is written without the
  // cancellation of -2 + root.
  const double s_ell_minus_4 = 4.0 * detail::atanh_ratio_minus_one(2.0 / s);
  DBranches b;
  b.plus = 3.0 * A * s * s_ell_minus_4 / (2.0 + root);
  b.minus = (-2.0 - root) / (3.0 * A * ell);
  return b;
}

/// |c| making F1(s, d, A, c) vanish.
inline double c_star(double s, double d, double A) {
  detail::require_sd_domain(s, d);
  return (4.0 - d * d) / 4.0 * std::sqrt((s * s - 4.0) * (3.0 * A * d + s) / (s * s - d * d));
}

struct CylPoint {
  double r = 0.0;
  double x = 0.0;
};

inline CylPoint rx_from_sd(double s, double d, double A) {
  detail::require_sd_domain(s, d);
  return {0.25 * std::sqrt((s * s - 4.0) * (4.0 - d * d)), -A - d * s / 4.0};
}

inline AuxSD sd_from_rx(double r, double x, double A) {
  if (!(r > 0.0)) throw DomainViolation("inverse chart needs r > 0");
  return detail::aux_from_axial(x, r, A);
}

/// d'(0) of the small-A expansion d(A) = d'(0) A + O(A^2) along the family at fixed c.
inline double d_linear_coeff(double c) {
  if (c == 0.0) throw ZeroAngularMomentum("d'(0) needs nonzero angular momentum");
  const double c2 = c * c;
  const double x = std::sqrt(c2 * c2 + 16.0) + c2;
  // x ln((x+4)/(x-4)) - 8 = 8 (atanh(u)/u - 1), u = 4/x
  return 1.5 * x * detail::atanh_ratio_minus_one(4.0 / x);
}

struct NewtonOptions {
  double tolerance = 1e-12;  // on the relative residuals
  int max_iterations = 50;
};

namespace detail {

inline CircularOrbit assemble(double s, double d, double A, double c, int iterations) {
  CircularOrbit o;
  o.A = A;
  o.s_star = s;
  o.d_star = d;
  o.c_star = std::abs(c);
  const CylPoint p = rx_from_sd(s, d, A);
  o.r_star = p.r;
  o.x_star = p.x;
  o.T = 2.0 * std::numbers::pi * p.r * p.r / o.c_star;
  const Residuals res = residuals(s, d, A, o.c_star);
  o.res_F1 = res.F1;
  o.res_F2 = res.F2;
  o.iterations = iterations;
  return o;
}

inline double relative_residual(double s, double d, double A, double c) {
  const Residuals r = residuals(s, d, A, c);
  return std::max(std::abs(r.F1) / f1_scale(s, d, A, c), std::abs(r.F2) / f2_scale(s, d, A));
}

}  // namespace detail

inline void validate_family_A(double A) {
  if (!(A >= 0.0) || !(A < 1.0 / 3.0)) {
    std::ostringstream os;
    os << "A=" << A << " outside [0, 1/3)";
    throw DomainViolation(os.str());
  }
}

/// Family member at fixed s*: closed-form seed, then Newton on F2 in d (F1 is
/// solved exactly for c at every iterate).
inline CircularOrbit solve_circular(double s_star, double A, const NewtonOptions& opts = {}) {
  if (!(s_star > 2.0)) {
    std::ostringstream os;
    os << "s*=" << s_star << " must exceed 2";
    throw DomainViolation(os.str());
  }
  validate_family_A(A);
  if (A == 0.0) return detail::assemble(s_star, 0.0, 0.0, c_star(s_star, 0.0, 0.0), 0);

  double d = d_branches(s_star, A).plus;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const double c = c_star(s_star, d, A);
    const Residuals r = residuals(s_star, d, A, c);
    if (std::abs(r.F2) / detail::f2_scale(s_star, d, A) <= opts.tolerance) break;
    const Jacobian2 J = residual_jacobian(s_star, d, A, c);
    d -= r.F2 / J[1][1];
    if (!(std::abs(d) < 2.0)) throw NewtonDiverged("circular-orbit polish left |d| < 2");
  }
  if (it == opts.max_iterations) throw NewtonDiverged("circular-orbit polish did not converge");
  return detail::assemble(s_star, d, A, c_star(s_star, d, A), it);
}

/// Newton at fixed angular momentum on the system
///   G1 = F1 / (16 (s^2 - d^2)) = c*(s, d)^2 - c^2,   G2 = F2,
/// which has the roots of (F1, F2) (s^2 > d^2 on the domain) and is far better
/// conditioned near s = 2. Steps are cut back to stay inside s > 2, |d| < 2 and
/// to decrease the scaled residual. From any seed this reaches s0(c) for A = 0;
/// for A > 0 the seed must lie in the basin of the d+ branch (see
/// solve_circular_by_c for a bracketed solver).
inline CircularOrbit solve_circular_newton(double c, double A, double s_seed, double d_seed,
                                           const NewtonOptions& opts = {}) {
  if (c == 0.0) throw ZeroAngularMomentum("circular orbit needs nonzero angular momentum");
  validate_family_A(A);
  detail::require_sd_domain(s_seed, d_seed);
  const double c2 = c * c;
  auto scaled = [&](double ss, double dd) {
    const Residuals r = residuals(ss, dd, A, c);
    return std::array<double, 2>{r.F1 / (16.0 * (ss * ss - dd * dd) * c2), r.F2 / detail::f2_scale(ss, dd, A)};
  };
  auto merit = [&](double ss, double dd) {
    const auto g = scaled(ss, dd);
    return g[0] * g[0] + g[1] * g[1];
  };
  double s = s_seed, d = d_seed;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const auto g = scaled(s, d);
    if (std::max(std::abs(g[0]), std::abs(g[1])) <= opts.tolerance) return detail::assemble(s, d, A, c, it);
    const Residuals r = residuals(s, d, A, c);
    const Jacobian2 J = residual_jacobian(s, d, A, c);
    const double e = s * s - d * d, w = 16.0 * e;
    const double G1 = r.F1 / w;
    const double a11 = (J[0][0] - r.F1 * 2.0 * s / e) / w, a12 = (J[0][1] + r.F1 * 2.0 * d / e) / w;
    const double a21 = J[1][0], a22 = J[1][1];
    const double det = a11 * a22 - a12 * a21;
    if (det == 0.0 || !std::isfinite(det)) throw NewtonDiverged("singular circular-orbit Jacobian");
    const double ds = -(a22 * G1 - a12 * r.F2) / det;
    const double dd = -(-a21 * G1 + a11 * r.F2) / det;
    double lambda = 1.0;
    if (s + ds <= 2.0) lambda = std::min(lambda, 0.9 * (s - 2.0) / -ds);
    if (d + dd >= 2.0) lambda = std::min(lambda, 0.9 * (2.0 - d) / dd);
    if (d + dd <= -2.0) lambda = std::min(lambda, 0.9 * (d + 2.0) / -dd);
    const double m0 = merit(s, d);
    while (lambda > 1e-10 && !(merit(s + lambda * ds, d + lambda * dd) < (1.0 - 1e-4 * lambda) * m0)) lambda *= 0.5;
    if (lambda <= 1e-10) break;
    s += lambda * ds;
    d += lambda * dd;
  }
  if (detail::relative_residual(s, d, A, c) <= opts.tolerance) return detail::assemble(s, d, A, c, opts.max_iterations);
  std::ostringstream os;
  os << "circular-orbit Newton did not converge for c=" << c << ", A=" << A << " from seed (s=" << s_seed
     << ", d=" << d_seed << ")";
  throw NewtonDiverged(os.str());
}

/// Family member with prescribed angular momentum: 1-D safeguarded Newton over
/// s* on c*(s*) = |c|. For A = 0 the root is s0(c) in closed form.
inline CircularOrbit solve_circular_by_c(double c, double A, const NewtonOptions& opts = {}) {
  if (c == 0.0) throw ZeroAngularMomentum("circular orbit needs nonzero angular momentum");
  validate_family_A(A);
  const double target = std::abs(c);
  if (A == 0.0) return detail::assemble(s0_for_c(target), 0.0, 0.0, target, 0);

  auto g = [&](double s) {
    const double d = d_branches(s, A).plus;
    const double cs = c_star(s, d, A);
    return cs * cs - target * target;
  };
  // c*(s) -> 0 as s -> 2+, so g < 0 near the collision limit.
  double lo = 2.0 + 1e-9;
  double hi = std::max(4.0, s0_for_c(target));
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NewtonDiverged("no circular orbit bracket found");
  }
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double gs = g(s);
    if (gs < 0.0) lo = s; else hi = s;
    const double h = 1e-7 * s;
    const double slope = (g(s + h) - g(s - h)) / (2.0 * h);
    double next = slope != 0.0 ? s - gs / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15 * s || hi - lo <= 1e-15 * s) {
      s = next;
      break;
    }
    s = next;
  }
  CircularOrbit o = solve_circular(s, A, opts);
  return o;
}

/// Sweep of family members over s* in [s_min, s_max] (n points, inclusive).
inline std::vector<double> family_grid(double s_min, double s_max, std::size_t n) {
  std::vector<double> grid;
  if (n == 1) return {s_min};
  for (std::size_t i = 0; i < n; ++i) grid.push_back(s_min + (s_max - s_min) * static_cast<double>(i) / static_cast<double>(n - 1));
  return grid;
}

}  // namespace segdyn
