#pragma once

// Rebuild the full motion from a reduced trajectory: theta(t) = theta0 + int c / r^2,
// integrated over the propagator's dense output step by step.

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <vector>

#include "segdyn/dynamics.hpp"
#include "segdyn/errors.hpp"
#include "segdyn/propagate.hpp"

namespace segdyn {

struct ReconstructedOrbit {
  double c = 0.0;
  double theta0 = 0.0;
  std::vector<double> t;
  std::vector<CylState> cylindrical;
  std::vector<Vec3> cartesian;
};

namespace detail {

// 10-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 10> kGLNodes = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244, -0.4333953941292472, -0.1488743389816312,
    0.1488743389816312,  0.4333953941292472,  0.6794095682990244,  0.8650633666889845,  0.9739065285171717};
inline constexpr std::array<double, 10> kGLWeights = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820, 0.2692667193099963, 0.2955242247147529,
    0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806, 0.0666713443086881};

template <std::size_t N>
double integrate_inverse_r2(const DenseSegment<N>& seg, double a, double b) {
  if (b <= a) return 0.0;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGLNodes.size(); ++i) {
    const double r = seg.component(0, mid + half * kGLNodes[i]);
    if (!(std::abs(r) > kAxisEpsilon)) throw AxisCrossing("reduced trajectory reaches the axis");
    sum += kGLWeights[i] / (r * r);
  }
  return half * sum;
}

}  // namespace detail

/// Angle advance c * int_{t_a}^{t_b} dt / r^2 using the dense segments of a
/// reduced trajectory (propagated with keep_dense).
inline double theta_advance(const Trajectory<4>& traj, double c, double t_a, double t_b) {
  if (c == 0.0) return 0.0;
  if (traj.dense.empty()) throw DomainViolation("reduced trajectory carries no dense output");
  double total = 0.0;
  for (const auto& seg : traj.dense) {
    const double a = std::max(seg.t0, t_a), b = std::min(seg.t1(), t_b);
    if (b > a) total += detail::integrate_inverse_r2(seg, a, b);
  }
  return c * total;
}

inline ReconstructedOrbit reconstruct(const Trajectory<4>& traj, double c, double theta0) {
  if (c != 0.0 && traj.dense.empty()) throw DomainViolation("reduced trajectory carries no dense output");
  for (const auto& y : traj.states) {
    if (!(y[0] > 0.0)) {
      std::ostringstream os;
      os << "reduced trajectory has r=" << y[0] << " <= 0";
      throw AxisCrossing(os.str());
    }
  }
  ReconstructedOrbit out;
  out.c = c;
  out.theta0 = theta0;
  out.t = traj.t;
  std::size_t seg_index = 0;
  double theta_at_seg_start = theta0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double ti = traj.t[i];
    double theta = theta0;
    if (c != 0.0) {
      while (seg_index < traj.dense.size() && traj.dense[seg_index].t1() <= ti) {
        const auto& seg = traj.dense[seg_index];
        theta_at_seg_start += c * detail::integrate_inverse_r2(seg, seg.t0, seg.t1());
        ++seg_index;
      }
      theta = theta_at_seg_start;
      if (seg_index < traj.dense.size() && traj.dense[seg_index].t0 < ti) {
        const auto& seg = traj.dense[seg_index];
        theta += c * detail::integrate_inverse_r2(seg, seg.t0, ti);
      }
    }
    const Vec<4>& y = traj.states[i];
    const CylState cyl{y[0], theta, y[1], y[2], c, y[3]};
    out.cylindrical.push_back(cyl);
    out.cartesian.push_back({y[1], y[0] * std::cos(theta), y[0] * std::sin(theta)});
  }
  return out;
}

/// Rotation number: angle advance per reduced period over n_periods, divided by 2 pi.
inline double rotation_number(const Trajectory<4>& traj, double c, double reduced_period, int n_periods = 1,
                              double t_start = 0.0) {
  if (!(reduced_period > 0.0)) throw DomainViolation("reduced period must be positive");
  const double adv = theta_advance(traj, c, t_start, t_start + n_periods * reduced_period);
  return adv / (2.0 * std::numbers::pi * n_periods);
}

struct Commensurability {
  bool rational = false;
  std::int64_t p = 0;
  std::int64_t q = 1;
  double ratio = 0.0;       // theta advance / 2 pi
  double error = 0.0;       // |ratio - p/q| for the best convergent tested
  double full_period = 0.0;  // q * T_red when rational
};

/// Continued-fraction test of theta_advance / (2 pi) against rationals with
/// denominator <= max_den.
inline Commensurability commensurability(double reduced_period, double theta_advance_value, double tol = 1e-9,
                                         std::int64_t max_den = 64) {
  if (!(reduced_period > 0.0)) throw DomainViolation("reduced period must be positive");
  Commensurability out;
  const double x = theta_advance_value / (2.0 * std::numbers::pi);
  out.ratio = x;
  // convergents h_n / k_n
  std::int64_t h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  double rem = x;
  out.error = std::numeric_limits<double>::infinity();
  for (int n = 0; n < 64; ++n) {
    const double a_real = std::floor(rem);
    if (std::abs(a_real) > 1e15) break;
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h = a * h_prev + h_prev2;
    const std::int64_t k = a * k_prev + k_prev2;
    if (k > max_den) break;
    const double err = std::abs(x - static_cast<double>(h) / static_cast<double>(k));
    if (err < out.error) {
      out.error = err;
      out.p = h;
      out.q = k;
    }
    if (err <= tol) {
      out.rational = true;
      out.full_period = static_cast<double>(k) * reduced_period;
      return out;
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
    const double frac = rem - a_real;
    if (frac == 0.0) break;
    rem = 1.0 / frac;
  }
  return out;
}

}  // namespace segdyn
