#pragma once

// Independent check of the closed-form potential: adaptive Gauss-Kronrod
// quadrature of the defining line integral
//   U(Q) = - int_{-1}^{1} (1 - 3 A y) / |Q - (y - A, 0, 0)| dy.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "segdyn/errors.hpp"
#include "segdyn/potential.hpp"

namespace segdyn {

inline constexpr double kQuadratureErrorLimit = 1e-10;

namespace detail {
inline constexpr unsigned kMaxDepth = 20;
inline constexpr double kRelTol = 1e-13;
}  // namespace detail

inline double quadrature_oracle(const Vec3& Q, double A, int n_nodes = 64) {
  if (n_nodes < 64) throw DomainViolation("quadrature oracle needs at least 64 nodes");
  const double rho = std::hypot(Q[1], Q[2]);
  const double foot = Q[0] + A;  // particle's axial position relative to the midpoint
  if (rho == 0.0 && foot >= -1.0 && foot <= 1.0) throw OnSegment("quadrature point lies on the segment");

  // Off the axis, y = foot + rho sinh(t) turns dy / |Q - y| into dt. On the
  // axis, y = foot -/+ exp(t) does the same for the 1/|foot - y| kernel.
  // Either way the integrand is smooth even very close to the segment.
  double t_lo = 0.0, t_hi = 0.0;
  std::function<double(double)> integrand;
  if (rho > 0.0) {
    t_lo = std::asinh((-1.0 - foot) / rho);
    t_hi = std::asinh((1.0 - foot) / rho);
    integrand = [=](double t) { return 1.0 - 3.0 * A * (foot + rho * std::sinh(t)); };
  } else {
    const double side = foot > 1.0 ? 1.0 : -1.0;  // particle beyond the right or left end
    t_lo = std::log(std::min(std::abs(foot - 1.0), std::abs(foot + 1.0)));
    t_hi = std::log(std::max(std::abs(foot - 1.0), std::abs(foot + 1.0)));
    integrand = [=](double t) { return 1.0 - 3.0 * A * (foot - side * std::exp(t)); };
  }

  constexpr int kKronrod = 15;
  const int panels = (n_nodes + kKronrod - 1) / kKronrod;
  using GK = boost::math::quadrature::gauss_kronrod<double, kKronrod>;
  double total = 0.0;
  double total_error = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = t_lo + (t_hi - t_lo) * i / panels;
    const double b = t_lo + (t_hi - t_lo) * (i + 1) / panels;
    double err = 0.0;
    total += GK::integrate(integrand, a, b, detail::kMaxDepth, detail::kRelTol, &err);
    total_error += err;
  }
  if (!(total_error <= kQuadratureErrorLimit)) {
    std::ostringstream os;
    os << "quadrature error estimate " << total_error << " exceeds " << kQuadratureErrorLimit;
    throw QuadratureNotConverged(os.str());
  }
  return -total;
}

}  // namespace segdyn
