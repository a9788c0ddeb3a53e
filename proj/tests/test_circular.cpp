#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "segdyn/circular.hpp"
#include "segdyn/dynamics.hpp"
#include "segdyn/propagate.hpp"

using namespace segdyn;

namespace {

// Family member at s* = 10, A = 1/4.
constexpr double kRefD = 0.10168469843514012;
constexpr double kRefC = 3.1022996807596295;
constexpr double kRefR = 4.8926435934599741;
constexpr double kRefX = -0.50421174608785035;
constexpr double kRefT = 48.482307451404381;

// Linear coefficient of d(A) along the fixed-c family.
constexpr double kDLin01 = 14.139341306213792;
constexpr double kDLin05 = 5.3972300848504835;
constexpr double kDLin1 = 2.6237668164537804;
constexpr double kDLin2 = 0.92578379062008398;
constexpr double kDLin10 = 0.039993604019252553;

}  // namespace

TEST(Residuals, VanishOnHomogeneousFamily) {
  for (double c : {0.5, 1.0, 2.0, 5.0}) {
    const auto r = residuals(s0_for_c(c), 0.0, 0.0, c);
    EXPECT_NEAR(r.F1, 0.0, 1e-12 * detail::f1_scale(s0_for_c(c), 0.0, 0.0, c));
    EXPECT_EQ(r.F2, 0.0);
  }
}

TEST(Residuals, ReferenceOrbitRoot) {
  const auto r = residuals(10.0, 0.101688, 0.25, 3.10233);
  EXPECT_LT(std::abs(r.F2), 1e-4);
  EXPECT_LT(std::abs(r.F1) / detail::f1_scale(10.0, 0.101688, 0.25, 3.10233), 1e-4);
  const auto exact = residuals(10.0, kRefD, 0.25, kRefC);
  EXPECT_LT(std::abs(exact.F2), 1e-12);
  EXPECT_LT(std::abs(exact.F1) / detail::f1_scale(10.0, kRefD, 0.25, kRefC), 1e-12);
}

TEST(Residuals, JacobianAtHomogeneousRoot) {
  for (double c : {0.5, 1.0, 2.0}) {
    const double s0 = s0_for_c(c);
    const auto J = residual_jacobian(s0, 0.0, 0.0, c);
    const double c4 = std::pow(c, 4);
    const double expected = 8.0 * (c4 + std::sqrt(c4 + 16.0) * c * c + 16.0);
    EXPECT_NEAR(J[0][0], expected, 1e-12 * expected);
    EXPECT_EQ(J[0][1], 0.0);
    EXPECT_EQ(J[1][0], 0.0);
    EXPECT_EQ(J[1][1], 1.0);
  }
}

TEST(Residuals, JacobianMatchesFiniteDifferences) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> us(2.2, 12.0), ud(-1.8, 1.8), ua(0.0, 0.33), uc(0.2, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double s = us(rng), d = ud(rng), A = ua(rng), c = uc(rng);
    const auto J = residual_jacobian(s, d, A, c);
    const double h = 1e-6;
    const auto sp = residuals(s + h, d, A, c), sm = residuals(s - h, d, A, c);
    const auto dp = residuals(s, d + h, A, c), dm = residuals(s, d - h, A, c);
    const double f1 = detail::f1_scale(s, d, A, c);
    EXPECT_NEAR(J[0][0], (sp.F1 - sm.F1) / (2 * h), 1e-6 * f1);
    EXPECT_NEAR(J[0][1], (dp.F1 - dm.F1) / (2 * h), 1e-6 * f1);
    EXPECT_NEAR(J[1][0], (sp.F2 - sm.F2) / (2 * h), 1e-6);
    EXPECT_NEAR(J[1][1], (dp.F2 - dm.F2) / (2 * h), 1e-6);
  }
}

TEST(Residuals, DomainViolation) {
  EXPECT_THROW(residuals(2.0, 0.0, 0.1, 1.0), DomainViolation);
  EXPECT_THROW(residuals(3.0, 2.0, 0.1, 1.0), DomainViolation);
  EXPECT_THROW(residual_jacobian(1.0, 0.0, 0.1, 1.0), DomainViolation);
}

TEST(S0ForC, ClosedFormValues) {
  EXPECT_NEAR(s0_for_c(2.0), 2.0 + 2.0 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s0_for_c(1e-6), 2.0, 1e-12);
  for (double c : {0.3, 1.0, 4.0}) {
    const double s = s0_for_c(c);
    EXPECT_NEAR(s * s - c * c * s - 4.0, 0.0, 1e-12 * s * s);
  }
  EXPECT_THROW(s0_for_c(0.0), ZeroAngularMomentum);
}

TEST(DBranches, ReferenceOrbitValue) { EXPECT_NEAR(d_branches(10.0, 0.25).plus, kRefD, 1e-15); }

// Both branches reach -/+2 only logarithmically as s -> 2+:
//   2 - d+ ~ (2 + 6A) / (3 A l),  -2 - d- ~ (2 - 6A) / (3 A l),  l = ln((s+2)/(s-2)).
TEST(DBranches, Limits) {
  const double A = 0.2;
  double prev_plus = 0.0;
  for (double gap : {1e-2, 1e-4, 1e-8, 1e-12}) {
    const double s = 2.0 + gap;
    const auto b = d_branches(s, A);
    const double ell = std::log1p(4.0 / gap);
    EXPECT_GT(b.plus, prev_plus);
    prev_plus = b.plus;
    if (gap <= 1e-8) {
      EXPECT_NEAR((2.0 - b.plus) * 3.0 * A * ell / (2.0 + 6.0 * A), 1.0, 0.1) << gap;
      EXPECT_NEAR((-2.0 - b.minus) * 3.0 * A * ell / (2.0 - 6.0 * A), 1.0, 0.1) << gap;
    }
  }
  EXPECT_LT(d_branches(1e6, A).plus, 1e-5);
  EXPECT_LT(d_branches(1e6, A).plus, d_branches(1e3, A).plus);
}

TEST(DBranches, DomainViolation) {
  EXPECT_THROW(d_branches(2.0, 0.1), DomainViolation);
  EXPECT_THROW(d_branches(3.0, 0.0), DomainViolation);
  EXPECT_THROW(d_branches(3.0, 1.0 / 3.0), DomainViolation);
}

TEST(CStar, HomogeneousInversion) {
  for (double c : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(c_star(s0_for_c(c), 0.0, 0.0), c, 1e-14);
    const double s = 3.7;
    EXPECT_NEAR(c_star(s, 0.0, 0.0), std::sqrt((s * s - 4.0) / s), 1e-15);
  }
}

TEST(CStar, ReferenceOrbitValue) {
  EXPECT_NEAR(c_star(10.0, 0.101688, 0.25), 3.1023, 5e-5);
  EXPECT_NEAR(c_star(10.0, kRefD, 0.25), kRefC, 1e-14);
}

// The (4 - d^2)/2 prefactor that appears in print gives twice the angular
// momentum and does not satisfy F1 = 0.
TEST(CStar, HalfPrefactorVariantFailsF1) {
  const double printed = (4.0 - kRefD * kRefD) / 2.0 *
                         std::sqrt((100.0 - 4.0) * (3.0 * 0.25 * kRefD + 10.0) / (100.0 - kRefD * kRefD));
  EXPECT_NEAR(printed, 2.0 * kRefC, 1e-12);
  EXPECT_GT(std::abs(residuals(10.0, kRefD, 0.25, printed).F1), 1.0);
}

TEST(SolveCircular, ReferenceOrbit) {
  const auto o = solve_circular(10.0, 0.25);
  EXPECT_NEAR(o.r_star, kRefR, 1e-12);
  EXPECT_NEAR(o.x_star, kRefX, 1e-12);
  EXPECT_NEAR(o.c_star, kRefC, 1e-12);
  EXPECT_NEAR(o.T, kRefT, 1e-9);
  EXPECT_NEAR(o.r_star, 4.8926, 5e-4);
  EXPECT_NEAR(o.x_star, -0.5042, 5e-4);
  EXPECT_NEAR(o.c_star, 3.1023, 5e-4);
  EXPECT_LE(std::abs(o.res_F2), 1e-12);
}

TEST(SolveCircular, HomogeneousOrbitInMidplane) {
  const auto o = solve_circular(s0_for_c(1.0), 0.0);
  EXPECT_EQ(o.d_star, 0.0);
  EXPECT_EQ(o.x_star, 0.0);
  EXPECT_NEAR(o.c_star, 1.0, 1e-14);
}

TEST(SolveCircular, DomainViolation) {
  EXPECT_THROW(solve_circular(2.0, 0.1), DomainViolation);
  EXPECT_THROW(solve_circular(5.0, 0.4), DomainViolation);
}

TEST(SolveCircular, ClosesAfterOnePeriod) {
  for (double A : {0.0, 0.125}) {
    const auto o = solve_circular(4.0, A);
    const auto traj = propagate(ReducedSystem{A, o.c_star}, Vec<4>{o.r_star, o.x_star, 0.0, 0.0}, 0.0, o.T,
                                PropagateOptions{});
    const auto& y = traj.states.back();
    EXPECT_NEAR(y[0], o.r_star, 1e-6);
    EXPECT_NEAR(y[1], o.x_star, 1e-6);
    EXPECT_NEAR(y[2], 0.0, 1e-6);
    EXPECT_NEAR(y[3], 0.0, 1e-6);
  }
}

TEST(SolveCircularNewton, FarSeedsConvergeToS0) {
  for (double c : {0.5, 1.0, 2.0}) {
    for (auto seed : {std::pair{2.05, 1.5}, std::pair{40.0, -1.0}, std::pair{3.0 * s0_for_c(c), 0.9}}) {
      const auto o = solve_circular_newton(c, 0.0, seed.first, seed.second);
      EXPECT_NEAR(o.s_star, s0_for_c(c), 1e-10) << "c=" << c << " seed s=" << seed.first;
      EXPECT_NEAR(o.d_star, 0.0, 1e-10);
    }
  }
}

TEST(SolveCircularByC, MatchesFixedSFamily) {
  const auto o = solve_circular_by_c(kRefC, 0.25);
  EXPECT_NEAR(o.s_star, 10.0, 1e-9);
  const auto h = solve_circular_by_c(1.0, 0.0);
  EXPECT_NEAR(h.s_star, s0_for_c(1.0), 1e-15);
  EXPECT_EQ(h.x_star, 0.0);
  EXPECT_THROW(solve_circular_by_c(0.0, 0.1), ZeroAngularMomentum);
}

TEST(DLinearCoeff, FrozenValues) {
  EXPECT_NEAR(d_linear_coeff(0.1), kDLin01, 1e-12 * kDLin01);
  EXPECT_NEAR(d_linear_coeff(0.5), kDLin05, 1e-12 * kDLin05);
  EXPECT_NEAR(d_linear_coeff(1.0), kDLin1, 1e-12 * kDLin1);
  EXPECT_NEAR(d_linear_coeff(2.0), kDLin2, 1e-12 * kDLin2);
  EXPECT_NEAR(d_linear_coeff(10.0), kDLin10, 1e-12 * kDLin10);
}

TEST(DLinearCoeff, MatchesPrintedFormWhereItIsStable) {
  for (double c : {0.1, 0.5, 1.0, 2.0}) {
    const double x = std::sqrt(std::pow(c, 4) + 16.0) + c * c;
    const double printed = 3.0 * x / 16.0 * (x * std::log((x + 4.0) / (x - 4.0)) - 8.0);
    EXPECT_NEAR(d_linear_coeff(c), printed, 1e-9 * printed);
  }
}

TEST(DLinearCoeff, PositiveAndVanishingAtLargeC) {
  for (double c : {0.1, 0.5, 1.0, 2.0, 10.0, 1e3}) EXPECT_GT(d_linear_coeff(c), 0.0);
  EXPECT_LT(d_linear_coeff(1e3), 1e-4);
  EXPECT_THROW(d_linear_coeff(0.0), ZeroAngularMomentum);
}

TEST(DLinearCoeff, ContinuationSlope) {
  const double c = 1.0, A = 1e-3;
  const auto o = solve_circular_newton(c, A, s0_for_c(c), 0.0);
  EXPECT_NEAR(o.d_star / A, d_linear_coeff(c), 0.01 * d_linear_coeff(c));
  // A = 0.25 orbit shifts left of the midplane.
  EXPECT_LT(solve_circular(10.0, 0.25).x_star, 0.0);
}

TEST(ChartMaps, KnownPoints) {
  const auto p = rx_from_sd(4.0, 0.0, 0.0);
  EXPECT_NEAR(p.r, std::sqrt(3.0), 1e-15);
  EXPECT_EQ(p.x, 0.0);
  const auto a = sd_from_rx(4.8926, -0.5042, 0.25);
  EXPECT_NEAR(a.s, 10.000, 5e-4);
  EXPECT_NEAR(a.d, 0.1017, 5e-4);
  EXPECT_THROW(sd_from_rx(0.0, 1.0, 0.1), DomainViolation);
  EXPECT_THROW(rx_from_sd(2.0, 0.0, 0.1), DomainViolation);
}

TEST(CircularProperty, ChartRoundTrip) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ur(1e-2, 10.0), ux(-5.0, 5.0), ua(0.0, 0.33);
  for (int i = 0; i < 10000; ++i) {
    const double r = ur(rng), x = ux(rng), A = ua(rng);
    const auto a = sd_from_rx(r, x, A);
    const auto p = rx_from_sd(a.s, a.d, A);
    ASSERT_NEAR(p.r, r, 1e-11 * std::max(1.0, r) / std::min(1.0, r)) << i;
    ASSERT_NEAR(p.x, x, 1e-12 * std::max(1.0, std::abs(x) + a.s)) << i;
  }
}

TEST(CircularProperty, CStarZeroesF1) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> us(2.01, 20.0), ud(-1.99, 1.99), ua(0.0, 0.33);
  for (int i = 0; i < 1000; ++i) {
    const double s = us(rng), d = ud(rng), A = ua(rng);
    const double c = c_star(s, d, A);
    ASSERT_LT(std::abs(residuals(s, d, A, c).F1) / detail::f1_scale(s, d, A, c), 1e-12);
  }
}

TEST(CircularProperty, DPlusZeroesF2) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> ls(-3.0, 3.0), ua(1e-4, 0.333);
  for (int i = 0; i < 1000; ++i) {
    const double s = 2.0 + std::pow(10.0, ls(rng)), A = ua(rng);
    const auto b = d_branches(s, A);
    ASSERT_GT(b.plus, 0.0);
    ASSERT_LT(b.plus, 2.0);
    ASSERT_LT(b.minus, -2.0);
    ASSERT_LT(std::abs(residuals(s, b.plus, A, 1.0).F2), 1e-12 * detail::f2_scale(s, b.plus, A)) << "s=" << s << " A=" << A;
  }
}

TEST(CircularProperty, UniqueAdmissibleRootOfF2) {
  for (double A : {0.01, 0.125, 0.25, 0.33}) {
    for (double s : {2.1, 3.0, 10.0, 100.0}) {
      int changes = 0;
      double prev = residuals(s, -2.0 + 1e-4, A, 1.0).F2;
      for (int i = 1; i < 10000; ++i) {
        const double d = -2.0 + 4.0 * i / 10000.0;
        const double f = residuals(s, d, A, 1.0).F2;
        if ((f > 0.0) != (prev > 0.0)) ++changes;
        prev = f;
      }
      EXPECT_EQ(changes, 1) << "A=" << A << " s=" << s;
    }
  }
}

TEST(CircularProperty, FamilyContinuity) {
  for (double A : {0.0, 0.125, 0.25}) {
    auto prev = solve_circular(2.5, A);
    for (double s = 2.501; s < 3.0; s += 1e-3) {
      const auto o = solve_circular(s, A);
      ASSERT_LT(std::abs(o.d_star - prev.d_star), 1e-2);
      ASSERT_LT(std::abs(o.c_star - prev.c_star), 1e-2);
      ASSERT_LT(std::abs(o.r_star - prev.r_star), 1e-2);
      ASSERT_LT(std::abs(o.x_star - prev.x_star), 1e-2);
      prev = o;
    }
  }
}

TEST(CircularProperty, HomogeneousFamilyIsInMidplane) {
  for (double s : family_grid(2.1, 50.0, 100)) {
    const auto o = solve_circular(s, 0.0);
    ASSERT_EQ(o.d_star, 0.0);
    ASSERT_EQ(o.x_star, 0.0);
  }
}

TEST(CircularProperty, FamilyMembersAreReducedEquilibria) {
  for (double A : {0.05, 0.2, 0.3}) {
    for (double s : family_grid(2.2, 30.0, 25)) {
      const auto o = solve_circular(s, A);
      const auto d = eom_reduced({o.r_star, o.x_star, 0.0, 0.0}, A, o.c_star);
      ASSERT_NEAR(d[2], 0.0, 1e-9);
      ASSERT_NEAR(d[3], 0.0, 1e-9);
    }
  }
}
