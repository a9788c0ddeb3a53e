#pragma once

// CSV and JSON writers. Every floating-point value is written with 17
// significant digits so that regression diffs are exact.

#include <complex>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "segdyn/circular.hpp"
#include "segdyn/dynamics.hpp"
#include "segdyn/poincare.hpp"
#include "segdyn/propagate.hpp"
#include "segdyn/reconstruction.hpp"

namespace segdyn::io {

inline constexpr int kDigits = std::numeric_limits<double>::max_digits10;

inline void set_precision(std::ostream& os) { os << std::setprecision(kDigits); }

namespace detail {

template <class It>
void write_row(std::ostream& os, It first, It last) {
  for (It it = first; it != last; ++it) {
    if (it != first) os << ',';
    os << *it;
  }
  os << '\n';
}

}  // namespace detail

inline void write_cartesian_csv(std::ostream& os, const Trajectory<6>& traj) {
  set_precision(os);
  os << "t,xi,eta,zeta,p_xi,p_eta,p_zeta,energy\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    os << traj.t[i];
    for (double v : traj.states[i]) os << ',' << v;
    os << ',' << traj.energy[i] << '\n';
  }
}

/// Cylindrical trajectory; theta is wrapped to [0, 2 pi).
inline void write_cylindrical_csv(std::ostream& os, const Trajectory<6>& traj) {
  set_precision(os);
  os << "t,r,theta,x,P_r,P_theta,P_x,energy\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    CylState s = normalize(CylState::from_array(traj.states[i]));
    os << traj.t[i] << ',' << s.r << ',' << s.theta << ',' << s.x << ',' << s.P_r << ',' << s.P_theta << ',' << s.P_x
       << ',' << traj.energy[i] << '\n';
  }
}

/// Reduced trajectory written in the cylindrical schema with theta = 0 and
/// P_theta = c.
inline void write_reduced_csv(std::ostream& os, const Trajectory<4>& traj, double c) {
  set_precision(os);
  os << "t,r,theta,x,P_r,P_theta,P_x,energy\n";
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const auto& y = traj.states[i];
    os << traj.t[i] << ',' << y[0] << ',' << 0.0 << ',' << y[1] << ',' << y[2] << ',' << c << ',' << y[3] << ','
       << traj.energy[i] << '\n';
  }
}

inline void write_family_header(std::ostream& os) { os << "A,s,d,c,r,x,T,res_F1,res_F2\n"; }

inline void write_family_row(std::ostream& os, const CircularOrbit& o) {
  set_precision(os);
  const std::vector<double> row{o.A, o.s_star, o.d_star, o.c_star, o.r_star, o.x_star, o.T, o.res_F1, o.res_F2};
  detail::write_row(os, row.begin(), row.end());
}

inline void write_family_csv(std::ostream& os, const std::vector<CircularOrbit>& family) {
  write_family_header(os);
  for (const auto& o : family) write_family_row(os, o);
}

inline void write_fixed_point_header(std::ostream& os) { os << "A,c,h,k,r,P_r,kind,re_lambda,im_lambda,residual\n"; }

inline void write_fixed_point_row(std::ostream& os, double A, double c, double h, const FixedPoint& fp) {
  set_precision(os);
  os << A << ',' << c << ',' << h << ',' << fp.period_k << ',' << fp.r << ',' << fp.P_r << ',' << to_string(fp.kind)
     << ',' << fp.lambda1.real() << ',' << fp.lambda1.imag() << ',' << fp.residual << '\n';
}

inline void write_orbit_csv(std::ostream& os, const ReconstructedOrbit& orbit) {
  set_precision(os);
  os << "t,r,theta,x,xi,eta,zeta\n";
  for (std::size_t i = 0; i < orbit.t.size(); ++i) {
    const CylState& s = orbit.cylindrical[i];
    const Vec3& q = orbit.cartesian[i];
    os << orbit.t[i] << ',' << s.r << ',' << s.theta << ',' << s.x << ',' << q[0] << ',' << q[1] << ',' << q[2] << '\n';
  }
}

inline std::string to_string(Units u) { return u == Units::TwoL ? "2L" : "L"; }

/// Section as JSON, with lengths, times and c expressed in the reporting units.
inline nlohmann::json section_to_json(const PoincareSection& sec, const UnitConvention& u = {}) {
  nlohmann::json j;
  const auto& sp = sec.spec;
  j["spec"] = {{"A", sp.A},
               {"c", sp.c * u.angular_momentum()},
               {"h", sp.h},
               {"units", to_string(u.units)},
               {"tols", {{"abs_tol", sp.integration.abs_tol}, {"rel_tol", sp.integration.rel_tol}}},
               {"n_crossings", sp.n_crossings},
               {"max_time", sp.max_time * u.time()}};
  j["seeds"] = nlohmann::json::array();
  for (const auto& s : sec.seeds) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.crossings) pts.push_back({p.r * u.length(), p.P_r});
    j["seeds"].push_back({{"seed", {s.seed.r * u.length(), s.seed.P_r}},
                          {"crossings", pts},
                          {"termination", to_string(s.termination)}});
  }
  return j;
}

/// JSON text with 17 significant digits for every number.
inline std::string dump_json(const nlohmann::json& j) {
  // nlohmann already writes doubles with max_digits10 round-trip precision.
  return j.dump(2);
}

}  // namespace segdyn::io
