#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sampling.hpp"
#include "segdyn/circular.hpp"
#include "segdyn/potential.hpp"
#include "segdyn/potential_oracle.hpp"

using namespace segdyn;
using segdyn::testing::random_point;

namespace {

constexpr double kHomogeneousAtUnitHeight = -1.7627471740390860;  // -2 ln(1 + sqrt 2)
constexpr double kQuarterSlopeAtUnitHeight = -1.6774372015011374;  // quadrature oracle, A = 1/4
constexpr std::array<double, 4> kSlopes = {0.0, 0.125, 0.25, 0.33};

Vec3 central_difference(const Vec3& q, double A, double h) {
  Vec3 g{};
  for (int k = 0; k < 3; ++k) {
    Vec3 p = q, m = q;
    p[k] += h;
    m[k] -= h;
    g[k] = -(potential_scaled(p, A) - potential_scaled(m, A)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST(AuxSD, SymmetricPointAboveMidpoint) {
  const auto a = aux_sd({0.0, 0.0, 1.0}, 0.0);
  EXPECT_NEAR(a.R1, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a.R2, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a.s, 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_EQ(a.d, 0.0);
}

TEST(AuxSD, OnAxisRightOfSegment) {
  const auto a = aux_sd({2.0, 0.0, 0.0}, 0.0);
  EXPECT_DOUBLE_EQ(a.R1, 1.0);
  EXPECT_DOUBLE_EQ(a.R2, 3.0);
  EXPECT_DOUBLE_EQ(a.s, 4.0);
  EXPECT_DOUBLE_EQ(a.d, -2.0);
}

TEST(AuxSD, CircularOrbitRingHasSameSD) {
  for (int k = 0; k < 8; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 8.0;
    const auto a = aux_sd({-0.5042, 4.8926 * std::cos(th), 4.8926 * std::sin(th)}, 0.25);
    EXPECT_NEAR(a.s, 10.000, 5e-4);
    EXPECT_NEAR(a.d, 0.1017, 5e-4);
  }
}

TEST(AuxSD, OnSegmentThrows) {
  EXPECT_THROW(aux_sd({0.0, 0.0, 0.0}, 0.0), OnSegment);
  EXPECT_THROW(aux_sd({0.7, 0.0, 0.0}, 0.25), OnSegment);
  EXPECT_NO_THROW(aux_sd({0.8, 0.0, 0.0}, 0.25));
}

TEST(PotentialScaled, HomogeneousAtUnitHeight) {
  EXPECT_NEAR(potential_scaled({0.0, 0.0, 1.0}, 0.0), kHomogeneousAtUnitHeight, 1e-15);
  EXPECT_NEAR(kHomogeneousAtUnitHeight, -2.0 * std::log(1.0 + std::sqrt(2.0)), 1e-15);
}

TEST(PotentialScaled, MonopoleLimit) {
  const double z = 5e5;  // s ~ 1e6
  const auto a = aux_sd({0.0, 0.0, z}, 0.0);
  EXPECT_NEAR(potential_scaled({0.0, 0.0, z}, 0.0) * a.s, -4.0, 1e-9);
}

TEST(PotentialScaled, QuarterSlopeAtUnitHeight) {
  const Vec3 q{0.0, 0.0, 1.0};
  EXPECT_NEAR(potential_scaled(q, 0.25), kQuarterSlopeAtUnitHeight, 1e-14);
  EXPECT_NEAR(quadrature_oracle(q, 0.25), kQuarterSlopeAtUnitHeight, 1e-13);
}

// U(A) - [U_0(s) + 3 A d] = -(3/4) A d s ln((s+2)/(s-2)): the slope correction
// pushes the potential up wherever the point is nearer the light end (d < 0).
TEST(PotentialScaled, SlopeCorrectionSignFollowsD) {
  const Vec3 q{0.0, 0.0, 1.0};
  const double A = 0.25;
  const auto a = aux_sd(q, A);
  ASSERT_LT(a.d, 0.0);
  const double u0 = -std::log((a.s + 2.0) / (a.s - 2.0));
  const double gap = potential_scaled(q, A) - (u0 + 3.0 * A * a.d);
  EXPECT_NEAR(gap, -0.75 * A * a.d * a.s * std::log((a.s + 2.0) / (a.s - 2.0)), 1e-14);
  EXPECT_GT(gap, 0.0);

  const Vec3 mirrored{-2.0 * A, 0.0, 1.0};  // nearer the heavy end: d > 0
  const auto b = aux_sd(mirrored, A);
  ASSERT_GT(b.d, 0.0);
  EXPECT_LT(potential_scaled(mirrored, A), -std::log((b.s + 2.0) / (b.s - 2.0)) + 3.0 * A * b.d);
}

TEST(PotentialScaled, OnSegmentThrows) { EXPECT_THROW(potential_scaled({0.0, 0.0, 0.0}, 0.1), OnSegment); }

TEST(PotentialPhysical, HomogeneousReducesToLogForm) {
  const auto seg = derive_segment(0.0, 3.0, 1.5, 2.0);
  const Vec3 P{0.4, -1.2, 0.7};
  const double r1 = std::hypot(P[0] - 1.5, std::hypot(P[1], P[2]));
  const double r2 = std::hypot(P[0] + 1.5, std::hypot(P[1], P[2]));
  const double expected = -(2.0 * 3.0 / 3.0) * std::log((r1 + r2 + 3.0) / (r1 + r2 - 3.0));
  EXPECT_NEAR(potential_physical(P, seg), expected, 1e-14);
}

TEST(PotentialPhysical, AxialRotationInvariance) {
  const auto seg = derive_segment(0.3, 2.0, 1.0, 1.0);
  const double ref = potential_physical({0.3, 1.1, 0.0}, seg);
  for (int k = 1; k < 8; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 8.0;
    EXPECT_NEAR(potential_physical({0.3, 1.1 * std::cos(th), 1.1 * std::sin(th)}, seg), ref, 1e-14 * std::abs(ref));
  }
}

TEST(PotentialPhysical, OnSegmentThrows) {
  const auto seg = derive_segment(0.0, 2.0, 1.0, 1.0);
  EXPECT_THROW(potential_physical({0.5, 0.0, 0.0}, seg), OnSegment);
}

TEST(PotentialProperty, PhysicalScalesToDimensionless) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> lg(-1.0, 1.0), frac(0.0, 0.99);
  for (int i = 0; i < 1000; ++i) {
    const double M = std::pow(10.0, lg(rng)), L = std::pow(10.0, lg(rng)), G = std::pow(10.0, lg(rng));
    const auto seg = derive_segment(frac(rng) * M / (2.0 * L * L), M, L, G);
    const double A = to_scaled(seg).A;
    const Vec3 Q = random_point(rng, A, 0.05);
    const double V = potential_physical({L * Q[0], L * Q[1], L * Q[2]}, seg);
    const double U = potential_scaled(Q, A);
    ASSERT_NEAR(V * 2.0 * L / (G * M), U, 1e-12 * std::abs(U)) << "draw " << i;
  }
}

TEST(QuadratureOracle, HomogeneousAtUnitHeight) {
  EXPECT_NEAR(quadrature_oracle({0.0, 0.0, 1.0}, 0.0), kHomogeneousAtUnitHeight, 1e-14);
}

TEST(QuadratureOracle, MatchesClosedFormAwayFromSegment) {
  for (double A : {0.0, 0.125, 0.25}) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 q = random_point(rng, A, 0.1);
      ASSERT_NEAR(quadrature_oracle(q, A), potential_scaled(q, A), 1e-9) << "A=" << A << " draw " << i;
    }
  }
}

TEST(QuadratureOracle, NearSegmentStressCase) {
  for (double A : {0.0, 0.125, 0.25}) {
    for (const Vec3& q : {Vec3{0.3 - A, 1e-3, 0.0}, Vec3{-A, 0.0, -1e-3}, Vec3{1.0 - A + 1e-3, 0.0, 0.0},
                          Vec3{-1.0 - A - 1e-3, 0.0, 0.0}}) {
      const double u = potential_scaled(q, A);
      EXPECT_NEAR(quadrature_oracle(q, A), u, 1e-6 * std::abs(u));
    }
  }
}

TEST(QuadratureOracle, RejectsTooFewNodesAndSegmentPoints) {
  EXPECT_THROW(quadrature_oracle({0.0, 0.0, 1.0}, 0.0, 32), DomainViolation);
  EXPECT_THROW(quadrature_oracle({0.2, 0.0, 0.0}, 0.0), OnSegment);
}

TEST(ForceScaled, SymmetricPointIsPulledDown) {
  const Vec3 f = force_scaled({0.0, 0.0, 1.0}, 0.0);
  EXPECT_NEAR(f[0], 0.0, 1e-15);
  EXPECT_EQ(f[1], 0.0);
  EXPECT_LT(f[2], 0.0);
}

TEST(ForceScaled, MatchesFiniteDifferences) {
  for (double A : {0.0, 0.125, 0.25}) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 q = random_point(rng, A, 0.1);
      const Vec3 f = force_scaled(q, A);
      const Vec3 g = central_difference(q, A, 1e-6);
      for (int k = 0; k < 3; ++k) ASSERT_NEAR(f[k], g[k], 1e-6) << "A=" << A << " draw " << i << " comp " << k;
    }
  }
}

TEST(ForceScaled, BalancesCentrifugalTermOnCircularOrbit) {
  const auto orbit = solve_circular(10.0, 0.25);
  const Vec3 f = force_scaled({orbit.x_star, orbit.r_star, 0.0}, 0.25);
  const double needed = orbit.c_star * orbit.c_star / std::pow(orbit.r_star, 3);
  EXPECT_NEAR(-f[1], needed, 1e-12);
  EXPECT_NEAR(f[0], 0.0, 1e-14);
  // Against the rounded reference values.
  const Vec3 g = force_scaled({-0.5042, 4.8926, 0.0}, 0.25);
  EXPECT_NEAR(-g[1], 3.1023 * 3.1023 / std::pow(4.8926, 3), 1e-3);
}

TEST(PotentialProperty, LemmaRanges) {
  for (double A : kSlopes) {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 100000; ++i) {
      const Vec3 q = random_point(rng, A, 1e-6);
      if (q[1] == 0.0 && q[2] == 0.0) continue;
      const auto a = aux_sd(q, A);
      ASSERT_GT(a.s, 2.0);
      ASSERT_LT(std::abs(a.d), 2.0);
      ASSERT_NEAR(a.s * a.s - a.d * a.d, 4.0 * a.R1 * a.R2, 1e-12 * a.s * a.s);
    }
  }
}

TEST(PotentialProperty, OnAxisSamplesReachD2) {
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> u(1e-3, 10.0);
  for (double A : kSlopes) {
    for (int i = 0; i < 1000; ++i) {
      const double gap = u(rng);
      EXPECT_NEAR(aux_sd({1.0 - A + gap, 0.0, 0.0}, A).d, -2.0, 1e-12);
      EXPECT_NEAR(aux_sd({-1.0 - A - gap, 0.0, 0.0}, A).d, 2.0, 1e-12);
    }
  }
}

TEST(PotentialProperty, NoEquilibria) {
  for (double A : kSlopes) {
    std::mt19937_64 rng(26);
    double min_norm = 1e300;
    for (int i = 0; i < 100000; ++i) {
      const Vec3 q = random_point(rng, A, 1e-6, 20.0);
      const auto a = aux_sd(q, A);
      ASSERT_GT(3.0 * A * a.d + a.s, 0.0);
      const auto f = detail::force_sd(a.s, a.d, A);
      ASSERT_LT(f.radial_coeff, 0.0);  // transverse pull toward the axis
      const Vec3 F = force_scaled(q, A);
      min_norm = std::min(min_norm, std::hypot(F[0], F[1], F[2]));
    }
    EXPECT_GT(min_norm, 0.0) << "A=" << A;
  }
}

TEST(PotentialProperty, AxialSymmetry) {
  std::mt19937_64 rng(27);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  for (double A : kSlopes) {
    for (int i = 0; i < 1000; ++i) {
      const Vec3 q = random_point(rng, A, 1e-3);
      const double rho = std::hypot(q[1], q[2]), th = ang(rng);
      const Vec3 p{q[0], rho * std::cos(th), rho * std::sin(th)};
      const double u = potential_scaled(q, A);
      ASSERT_NEAR(potential_scaled(p, A), u, 1e-13 * std::abs(u));
      const Vec3 fq = force_scaled(q, A), fp = force_scaled(p, A);
      const double nq = std::hypot(fq[0], fq[1], fq[2]);
      ASSERT_NEAR(std::hypot(fp[0], fp[1], fp[2]), nq, 1e-13 * nq);
    }
  }
}
