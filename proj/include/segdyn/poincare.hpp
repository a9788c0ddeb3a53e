#pragma once

// Poincare sections of the reduced flow on {x = 0, P_x > 0}, projected on
// (r, P_r) at fixed angular momentum c and energy h, plus the first-return map
// and Newton refinement of its (period-k) fixed points.

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "segdyn/dynamics.hpp"
#include "segdyn/errors.hpp"
#include "segdyn/parallel.hpp"
#include "segdyn/propagate.hpp"

namespace segdyn {

struct SectionPoint {
  double r = 0.0;
  double P_r = 0.0;
};

/// Integration tolerance used when refining fixed points; the finite-difference
/// Jacobian needs return-map values accurate well below its 1e-7 step.
inline constexpr double kFixedPointTolerance = 1e-13;

struct SectionSpec {
  double A = 0.0;
  double c = 0.0;
  double h = 0.0;
  std::vector<SectionPoint> seeds;
  std::size_t n_crossings = 100;
  double max_time = 1e4;         // per seed
  double return_time_max = 1e3;  // first-return search window
  PropagateOptions integration{};
  unsigned jobs = 1;
};

struct SeedResult {
  SectionPoint seed;
  std::vector<SectionPoint> crossings;
  std::vector<double> times;
  Termination termination = Termination::completed;
  double max_energy_error = 0.0;
  double max_abs_x = 0.0;
};

struct PoincareSection {
  SectionSpec spec;
  std::vector<SeedResult> seeds;
};

enum class FixedPointKind { elliptic, hyperbolic };

inline std::string to_string(FixedPointKind k) { return k == FixedPointKind::elliptic ? "elliptic" : "hyperbolic"; }

struct FixedPoint {
  double r = 0.0;
  double P_r = 0.0;
  int period_k = 1;
  FixedPointKind kind = FixedPointKind::elliptic;
  std::complex<double> lambda1, lambda2;
  double residual = 0.0;
  double return_time = 0.0;  // time for k returns: the reduced period
  int iterations = 0;
  std::array<std::array<double, 2>, 2> jacobian{};

  double multiplier_product() const { return std::real(lambda1 * lambda2); }
};

inline double shell_discriminant(double r, double P_r, double A, double c, double h) {
  return 2.0 * (h - potential_rx(r, 0.0, A)) - P_r * P_r - c * c / (r * r);
}

inline ReducedState lift_seed(const SectionPoint& z, const SectionSpec& spec) {
  if (!(z.r > 0.0)) throw OutsideEnergyShell("section seed needs r > 0");
  const double disc = shell_discriminant(z.r, z.P_r, spec.A, spec.c, spec.h);
  if (!(disc > 0.0)) {
    std::ostringstream os;
    os << "seed (r=" << z.r << ", P_r=" << z.P_r << ") is outside the energy shell h=" << spec.h
       << " (discriminant " << disc << ")";
    throw OutsideEnergyShell(os.str());
  }
  return {z.r, 0.0, z.P_r, std::sqrt(disc)};
}

inline bool liftable(const SectionPoint& z, const SectionSpec& spec) {
  if (!(z.r > 0.0)) return false;
  try {
    return shell_discriminant(z.r, z.P_r, spec.A, spec.c, spec.h) > 0.0;
  } catch (const OnSegment&) {
    return false;
  }
}

/// Grid of seeds on [r_min, r_max] x [pr_min, pr_max], n x m points, keeping
/// only the ones inside the energy shell.
inline std::vector<SectionPoint> seed_grid(const SectionSpec& spec, double r_min, double r_max, std::size_t n,
                                           double pr_min, double pr_max, std::size_t m) {
  std::vector<SectionPoint> out;
  auto at = [](double a, double b, std::size_t i, std::size_t count) {
    return count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const SectionPoint z{at(r_min, r_max, i, n), at(pr_min, pr_max, j, m)};
      if (liftable(z, spec)) out.push_back(z);
    }
  }
  return out;
}

namespace detail {

// Collects up-crossings of x = 0 from the last accepted step.
struct CrossingCollector {
  std::size_t wanted = 0;
  std::vector<Vec<4>> states;
  std::vector<double> times;

  template <class Stepper>
  bool operator()(Stepper& st) {
    const double x0 = st.y_prev()[1];
    const double x1 = st.y()[1];
    if (x0 < 0.0 && x1 >= 0.0) {
      const auto& seg = st.dense();
      const double tc = locate_crossing(seg, 1, 3);
      Vec<4> y = seg(tc);
      if (y[3] > 0.0) {
        states.push_back(y);
        times.push_back(tc);
      }
    }
    return states.size() < wanted;
  }
};

}  // namespace detail

/// Section crossings of the reduced orbit through an arbitrary state.
inline SeedResult trace_state(const ReducedState& y0, const SectionSpec& spec) {
  SeedResult res;
  res.seed = {y0.r, y0.P_r};
  const ReducedSystem sys{spec.A, spec.c};
  detail::CrossingCollector collect;
  collect.wanted = spec.n_crossings;
  PropagateOptions opts = spec.integration;
  opts.sample_stride = spec.max_time;  // only endpoints are needed
  opts.keep_dense = false;
  const auto traj = propagate(sys, y0.to_array(), 0.0, spec.max_time, opts, collect);
  res.termination = traj.termination == Termination::stopped ? Termination::completed : traj.termination;
  for (std::size_t i = 0; i < collect.states.size(); ++i) {
    const Vec<4>& y = collect.states[i];
    res.crossings.push_back({y[0], y[2]});
    res.times.push_back(collect.times[i]);
    res.max_abs_x = std::max(res.max_abs_x, std::abs(y[1]));
    res.max_energy_error = std::max(res.max_energy_error, std::abs(sys.energy(y) - spec.h));
  }
  return res;
}

inline SeedResult trace_seed(const SectionPoint& seed, const SectionSpec& spec) {
  return trace_state(lift_seed(seed, spec), spec);
}

inline PoincareSection compute_section(const SectionSpec& spec) {
  for (const auto& z : spec.seeds) lift_seed(z, spec);
  PoincareSection out;
  out.spec = spec;
  out.seeds = parallel_map(spec.seeds.size(), spec.jobs, [&](std::size_t i) { return trace_seed(spec.seeds[i], spec); });
  return out;
}

struct ReturnResult {
  SectionPoint point;
  double time = 0.0;
};

inline ReturnResult return_map_timed(const SectionPoint& z, const SectionSpec& spec) {
  const ReducedState y0 = lift_seed(z, spec);
  const ReducedSystem sys{spec.A, spec.c};
  detail::CrossingCollector collect;
  collect.wanted = 1;
  PropagateOptions opts = spec.integration;
  opts.sample_stride = spec.return_time_max;
  opts.keep_dense = false;
  const auto traj = propagate(sys, y0.to_array(), 0.0, spec.return_time_max, opts, collect);
  if (collect.states.empty()) {
    std::ostringstream os;
    os << "no return to the section from (r=" << z.r << ", P_r=" << z.P_r << "): " << to_string(traj.termination);
    throw NoReturn(os.str());
  }
  return {{collect.states[0][0], collect.states[0][2]}, collect.times[0]};
}

inline SectionPoint return_map(const SectionPoint& z, const SectionSpec& spec) { return return_map_timed(z, spec).point; }

inline ReturnResult return_map_iterate(const SectionPoint& z, const SectionSpec& spec, int k) {
  ReturnResult acc{z, 0.0};
  for (int i = 0; i < k; ++i) {
    const ReturnResult step = return_map_timed(acc.point, spec);
    acc.point = step.point;
    acc.time += step.time;
  }
  return acc;
}

/// Central finite-difference Jacobian of the k-th return map.
inline std::array<std::array<double, 2>, 2> return_map_jacobian(const SectionPoint& z, const SectionSpec& spec, int k = 1,
                                                               double step = 1e-7) {
  std::array<std::array<double, 2>, 2> J{};
  for (int j = 0; j < 2; ++j) {
    SectionPoint plus = z, minus = z;
    (j == 0 ? plus.r : plus.P_r) += step;
    (j == 0 ? minus.r : minus.P_r) -= step;
    const SectionPoint fp = return_map_iterate(plus, spec, k).point;
    const SectionPoint fm = return_map_iterate(minus, spec, k).point;
    J[0][j] = (fp.r - fm.r) / (2.0 * step);
    J[1][j] = (fp.P_r - fm.P_r) / (2.0 * step);
  }
  return J;
}

struct FixedPointOptions {
  int max_iterations = 40;
  double residual_tolerance = 1e-9;
  double fd_step = 1e-7;
};

inline FixedPoint classify(FixedPoint fp) {
  const auto& J = fp.jacobian;
  const double tr = J[0][0] + J[1][1];
  const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
  const double disc = tr * tr - 4.0 * det;
  const std::complex<double> root = std::sqrt(std::complex<double>(disc, 0.0));
  fp.lambda1 = 0.5 * (tr + root);
  fp.lambda2 = 0.5 * (tr - root);
  fp.kind = disc < 0.0 ? FixedPointKind::elliptic : FixedPointKind::hyperbolic;
  return fp;
}

/// Newton on P^k(z) - z with a finite-difference Jacobian, then classification
/// by the multipliers of DP^k.
inline FixedPoint find_fixed_point(const SectionPoint& guess, const SectionSpec& spec, int period_k = 1,
                                   const FixedPointOptions& opts = {}) {
  if (period_k < 1) throw DomainViolation("fixed-point period must be >= 1");
  lift_seed(guess, spec);
  SectionPoint z = guess;
  double best = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const SectionPoint image = return_map_iterate(z, spec, period_k).point;
    const double fr = image.r - z.r, fp = image.P_r - z.P_r;
    const double res = std::hypot(fr, fp);
    if (res <= 1e-3 * opts.residual_tolerance) break;
    if (it > 4 && res >= best * 0.5 && res <= opts.residual_tolerance) break;  // round-off floor reached
    best = std::min(best, res);
    const auto J = return_map_jacobian(z, spec, period_k, opts.fd_step);
    const double a = J[0][0] - 1.0, b = J[0][1], c = J[1][0], d = J[1][1] - 1.0;
    const double det = a * d - b * c;
    if (det == 0.0 || !std::isfinite(det)) throw NewtonDiverged("singular fixed-point Newton matrix");
    const double dr = -(d * fr - b * fp) / det;
    const double dp = -(-c * fr + a * fp) / det;
    double lambda = 1.0;
    SectionPoint next{z.r + dr, z.P_r + dp};
    while (!liftable(next, spec) && lambda > 1e-4) {
      lambda *= 0.5;
      next = {z.r + lambda * dr, z.P_r + lambda * dp};
    }
    if (!liftable(next, spec)) throw NewtonDiverged("fixed-point Newton left the energy shell");
    z = next;
  }
  const ReturnResult image = return_map_iterate(z, spec, period_k);
  FixedPoint out;
  out.r = z.r;
  out.P_r = z.P_r;
  out.period_k = period_k;
  out.residual = std::hypot(image.point.r - z.r, image.point.P_r - z.P_r);
  out.return_time = image.time;
  out.iterations = it;
  if (!(out.residual <= opts.residual_tolerance)) {
    std::ostringstream os;
    os << "fixed-point Newton stalled at residual " << out.residual << " from guess (" << guess.r << ", " << guess.P_r
       << ")";
    throw NewtonDiverged(os.str());
  }
  out.jacobian = return_map_jacobian(z, spec, period_k, opts.fd_step);
  return classify(out);
}

/// Which (c, k) makes a printed section tuple (r, x = 0, P_r, P_x) a period-k
/// fixed point: for every candidate the energy is taken from the tuple itself,
/// Newton is started from (r, P_r), and the converged point nearest to the
/// tuple wins.
struct TupleMatch {
  double c = 0.0;
  double h = 0.0;
  int period_k = 0;
  FixedPoint point;
  double distance = 0.0;  // Euclidean, in the (r, P_r) plane
};

inline TupleMatch match_tuple(const ReducedState& tuple, double A, const std::vector<double>& c_candidates,
                              int max_period, PropagateOptions integration = {}, const FixedPointOptions& opts = {}) {
  TupleMatch best;
  best.distance = std::numeric_limits<double>::infinity();
  for (double c : c_candidates) {
    SectionSpec spec;
    spec.A = A;
    spec.c = c;
    spec.h = energy(tuple, A, c);
    spec.integration = integration;
    for (int k = 1; k <= max_period; ++k) {
      try {
        const FixedPoint fp = find_fixed_point({tuple.r, tuple.P_r}, spec, k, opts);
        const double dist = std::hypot(fp.r - tuple.r, fp.P_r - tuple.P_r);
        if (dist < best.distance) best = {c, spec.h, k, fp, dist};
        break;  // the smallest period that converges is the orbit's period
      } catch (const Error&) {
      }
    }
  }
  if (!std::isfinite(best.distance)) throw NewtonDiverged("no candidate (c, k) makes the tuple a fixed point");
  return best;
}

}  // namespace segdyn
