#pragma once

#include <array>
#include <cmath>
#include <sstream>

#include "segdyn/errors.hpp"

namespace segdyn {

/// Physical segment of half-length L and mass M with linear density
/// sigma(x) = alpha*x + beta on [-L, L]. beta is always M/(2L).
class SegmentParams {
 public:
  SegmentParams(double alpha, double M, double L, double G) : G_(G), M_(M), L_(L), alpha_(alpha) {
    if (!(L > 0.0) || !(M > 0.0) || !(G > 0.0)) {
      std::ostringstream os;
      os << "segment dimensions must be positive (G=" << G << ", M=" << M << ", L=" << L << ")";
      throw NonPositiveDimension(os.str());
    }
    const double bound = M / (2.0 * L * L);
    if (!(std::abs(alpha) < bound)) {
      std::ostringstream os;
      os << "density slope " << alpha << " outside open interval (" << -bound << ", " << bound << ")";
      throw SlopeOutOfRange(os.str());
    }
    beta_ = M / (2.0 * L);
  }

  double G() const { return G_; }
  double M() const { return M_; }
  double L() const { return L_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double density(double x) const { return alpha_ * x + beta_; }
  double slope_bound() const { return M_ / (2.0 * L_ * L_); }
  /// Axial coordinate of the center of mass in the frame centered on the segment midpoint.
  double center_of_mass() const { return 2.0 * alpha_ * L_ * L_ * L_ / (3.0 * M_); }

 private:
  double G_, M_, L_, alpha_, beta_;
};

inline SegmentParams derive_segment(double alpha, double M, double L, double G) {
  return SegmentParams(alpha, M, L, G);
}

/// Dimensionless model. A >= 0 always; a negative physical slope is stored as
/// `reflected`, meaning the scaled axis points along -x.
struct ScaledParams {
  double A = 0.0;
  double length_scale = 1.0;
  double momentum_scale = 1.0;
  double time_scale = 1.0;
  bool reflected = false;

  double segment_left() const { return -1.0 - A; }
  double segment_right() const { return 1.0 - A; }
  double energy_scale() const { return momentum_scale * momentum_scale; }
};

inline void validate_A(double A) {
  if (!(A >= 0.0) || !(A < 1.0 / 3.0)) {
    std::ostringstream os;
    os << "dimensionless slope A=" << A << " outside [0, 1/3)";
    throw SlopeOutOfRange(os.str());
  }
}

// q = L Q, p = sqrt(GM/2L) P. The time scale is the one that keeps
// dQ/dtau = P and dP/dtau = -grad U: t = sqrt(2 L^3 / (G M)) tau.
inline ScaledParams to_scaled(const SegmentParams& p) {
  ScaledParams s;
  s.A = std::abs(p.alpha()) * 2.0 * p.L() * p.L() / (3.0 * p.M());
  s.length_scale = p.L();
  s.momentum_scale = std::sqrt(p.G() * p.M() / (2.0 * p.L()));
  s.time_scale = std::sqrt(2.0 * p.L() * p.L() * p.L() / (p.G() * p.M()));
  s.reflected = p.alpha() < 0.0;
  return s;
}

inline SegmentParams from_scaled(const ScaledParams& s, double M, double G) {
  const double L = s.length_scale;
  const double alpha = (s.reflected ? -1.0 : 1.0) * s.A * 3.0 * M / (2.0 * L * L);
  return SegmentParams(alpha, M, L, G);
}

/// Position/momentum pair in the Cartesian chart (either physical or scaled).
struct PhaseState {
  std::array<double, 3> q{};
  std::array<double, 3> p{};
  double t = 0.0;
};

enum class MapDirection { to_scaled, to_physical };

inline PhaseState map_state(const PhaseState& in, const ScaledParams& s, MapDirection dir) {
  PhaseState out;
  const double flip = s.reflected ? -1.0 : 1.0;
  if (dir == MapDirection::to_scaled) {
    for (int i = 0; i < 3; ++i) {
      out.q[i] = in.q[i] / s.length_scale;
      out.p[i] = in.p[i] / s.momentum_scale;
    }
    out.t = in.t / s.time_scale;
  } else {
    for (int i = 0; i < 3; ++i) {
      out.q[i] = in.q[i] * s.length_scale;
      out.p[i] = in.p[i] * s.momentum_scale;
    }
    out.t = in.t * s.time_scale;
  }
  out.q[0] *= flip;
  out.p[0] *= flip;
  return out;
}

/// Length-unit convention for reporting. TwoL measures lengths in units of the
/// full segment length: Q' = Q/2, P' = P, tau' = tau/2, c' = c/2, h' = h.
enum class Units { L, TwoL };

struct UnitConvention {
  Units units = Units::L;

  double length() const { return units == Units::TwoL ? 0.5 : 1.0; }
  double time() const { return units == Units::TwoL ? 0.5 : 1.0; }
  double angular_momentum() const { return units == Units::TwoL ? 0.5 : 1.0; }

  // Factors convert from the internal L chart to the reporting chart; divide to go back.
  double length_to_internal(double v) const { return v / length(); }
  double time_to_internal(double v) const { return v / time(); }
  double c_to_internal(double v) const { return v / angular_momentum(); }
};

}  // namespace segdyn
