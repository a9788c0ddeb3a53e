#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "segdyn/errors.hpp"
#include "segdyn/ode.hpp"

namespace segdyn {

enum class Termination { completed, collision, escape, max_steps, stopped };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::collision: return "collision";
    case Termination::escape: return "escape";
    case Termination::max_steps: return "max_steps";
    case Termination::stopped: return "stopped";
  }
  return "unknown";
}

struct PropagateOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  std::size_t max_steps = 5'000'000;
  double sample_stride = 0.0;  // 0 records every accepted step
  double escape_radius = 1e3;  // threshold on s
  double collision_gap = 1e-9;  // threshold on s - 2
  bool keep_dense = false;
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> t;
  std::vector<Vec<N>> states;
  std::vector<double> energy;
  std::vector<DenseSegment<N>> dense;  // filled when keep_dense
  Termination termination = Termination::completed;
  std::size_t steps = 0;
  std::size_t rejected = 0;

  double max_relative_energy_drift() const {
    if (energy.empty()) return 0.0;
    const double e0 = energy.front();
    const double scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
    double worst = 0.0;
    for (double e : energy) worst = std::max(worst, std::abs(e - e0) / scale);
    return worst;
  }
};

/// Observer that never stops the run.
struct NoObserver {
  template <class Stepper>
  bool operator()(Stepper&) const {
    return true;
  }
};

inline void validate_tolerances(const PropagateOptions& o) {
  auto ok = [](double v) { return v >= 1e-14 && v <= 1e-3; };
  if (!ok(o.abs_tol) || !ok(o.rel_tol)) {
    std::ostringstream os;
    os << "tolerances must lie in [1e-14, 1e-3] (abs=" << o.abs_tol << ", rel=" << o.rel_tol << ")";
    throw DomainViolation(os.str());
  }
}

/// Integrate `sys` from (t0, y0) to t_end. The observer is called after every
/// accepted step with the stepper (whose dense() is valid for that step) and
/// returns false to stop early.
template <class System, class Observer = NoObserver>
Trajectory<System::dim> propagate(const System& sys, const Vec<System::dim>& y0, double t0, double t_end,
                                  const PropagateOptions& opts, Observer&& observer = Observer{}) {
  constexpr std::size_t N = System::dim;
  validate_tolerances(opts);
  if (!(t_end > t0)) throw DomainViolation("propagation end time must exceed start time");

  Trajectory<N> traj;
  auto record = [&](double t, const Vec<N>& y) {
    traj.t.push_back(t);
    traj.states.push_back(y);
    traj.energy.push_back(sys.energy(y));
  };

  if (!(sys.sum_distance(y0) - 2.0 > opts.collision_gap)) throw OnSegment("initial state lies on the segment");
  record(t0, y0);

  auto rhs = [&sys](double t, const Vec<N>& y) { return sys(t, y); };
  StepperOptions sopts;
  sopts.abs_tol = opts.abs_tol;
  sopts.rel_tol = opts.rel_tol;
  Dop853<N, decltype(rhs)> stepper(rhs, t0, y0, sopts);

  const bool strided = opts.sample_stride > 0.0;
  std::size_t next_sample = 1;
  auto next_sample_time = [&] { return t0 + static_cast<double>(next_sample) * opts.sample_stride; };

  while (stepper.t() < t_end) {
    if (traj.steps >= opts.max_steps) {
      traj.termination = Termination::max_steps;
      break;
    }
    const StepStatus status = stepper.step(t_end);
    if (status == StepStatus::step_underflow) {
      const double gap = sys.sum_distance(stepper.y()) - 2.0;
      if (gap < 1e-6) {
        traj.termination = Termination::collision;
        break;
      }
      std::ostringstream os;
      os << "step size underflow at t=" << stepper.t() << " (s-2=" << gap << ")";
      throw StepSizeUnderflow(os.str());
    }
    ++traj.steps;
    if (opts.keep_dense) traj.dense.push_back(stepper.dense());

    if (strided) {
      while (next_sample_time() <= stepper.t() * (1.0 + 1e-15) && next_sample_time() <= t_end) {
        const double ts = next_sample_time();
        record(ts, ts >= stepper.t() ? stepper.y() : stepper.dense()(ts));
        ++next_sample;
      }
    } else {
      record(stepper.t(), stepper.y());
    }

    const double s = sys.sum_distance(stepper.y());
    if (s - 2.0 < opts.collision_gap) {
      traj.termination = Termination::collision;
      break;
    }
    if (s > opts.escape_radius) {
      traj.termination = Termination::escape;
      break;
    }
    if (!observer(stepper)) {
      traj.termination = Termination::stopped;
      break;
    }
  }
  if (traj.t.back() < stepper.t()) record(stepper.t(), stepper.y());
  traj.rejected = stepper.rejected();
  return traj;
}

/// Locate a root of one state component inside the last accepted step with
/// bisection safeguarded Newton; the component's time derivative is taken as
/// another state component (e.g. x and P_x).
template <std::size_t N>
double locate_crossing(const DenseSegment<N>& seg, std::size_t component, std::size_t rate_component,
                       double tolerance = 1e-13) {
  double lo = seg.t0, hi = seg.t1();
  double g_lo = seg.component(component, lo);
  double t = lo - g_lo / seg.component(rate_component, lo);
  if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
  for (int it = 0; it < 100; ++it) {
    const double g = seg.component(component, t);
    if (std::abs(g) <= tolerance) return t;
    if ((g < 0.0) == (g_lo < 0.0)) {
      lo = t;
      g_lo = g;
    } else {
      hi = t;
    }
    const double rate = seg.component(rate_component, t);
    double next = rate != 0.0 ? t - g / rate : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) return next;
    t = next;
  }
  return t;
}

}  // namespace segdyn
