#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cmc/curve.hpp"
#include "cmc/io.hpp"
#include "oracles.hpp"

using namespace cmc;

namespace {

// e^{iu} + 2u, non-convex test curve from the examples
BaseCurve wobble() {
  return BaseCurve({-2.0, 2.0}, [](double u) {
    const cplx e = std::polar(1.0, u), i(0, 1);
    return CurveJet{e + 2.0 * u, i * e + 2.0, -e};
  });
}

// smooth strictly increasing map of [0, 1] onto [lo, hi]
BaseCurve warp(const BaseCurve& c) {
  const Interval d = c.domain();
  const double L = d.length();
  return reparameterize(c, {0.0, 1.0}, [=](double t) {
    const double w = t + 0.1 * std::sin(2 * kPi * t) / (2 * kPi);
    const double dw = 1 + 0.1 * std::cos(2 * kPi * t);
    const double ddw = -0.1 * 2 * kPi * std::sin(2 * kPi * t);
    return std::array<double, 3>{d.lo + L * w, L * dw, L * ddw};
  });
}

}  // namespace

TEST(Kinematics, Circle) {
  const auto c = curves::circle(2.5);
  for (double u : {0.0, 1.0, 4.0}) {
    const auto k = kinematics(c, u);
    EXPECT_NEAR(k.speed, 2.5, 1e-14);
    EXPECT_NEAR(std::abs(k.curvature), 1 / 2.5, 1e-14);
    EXPECT_NEAR(k.arclength, 2.5 * u, 1e-10);
  }
}

TEST(Kinematics, Line) {
  const auto c = curves::line({-1.0, 3.0});
  const auto k = kinematics(c, 2.0);
  EXPECT_EQ(k.curvature, 0.0);
  EXPECT_NEAR(k.arclength, 3.0, 1e-12);
}

TEST(Kinematics, CurvatureMatchesTangentAngleDifferences) {
  const auto c = wobble();
  for (double u = -1.8; u <= 1.8; u += 0.3) {
    EXPECT_NEAR(kinematics(c, u).curvature, oracle::fd_curvature(c, u), 1e-6) << "u=" << u;
  }
}

TEST(Kinematics, OutsideDomainThrows) {
  try {
    (void)kinematics(curves::line({0.0, 1.0}), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainError);
  }
}

TEST(Arclength, MatchesSimpsonOracle) {
  const auto c = wobble();
  EXPECT_NEAR(arclength(c, -2.0, 2.0), oracle::simpson_arclength(c, -2.0, 2.0), 1e-10);
}

TEST(Arclength, AdditiveOverSplits) {
  auto g = oracle::rng(7);
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  const auto c = wobble();
  for (int i = 0; i < 20; ++i) {
    const double m = U(g);
    EXPECT_NEAR(arclength(c, -2, m) + arclength(c, m, 2), arclength(c, -2, 2), 1e-9);
  }
}

TEST(Arclength, InvariantUnderMonotoneReparameterization) {
  const auto c = curves::perturbed_circle(0.2);
  EXPECT_NEAR(arclength(warp(c), 0.0, 1.0), arclength(c, 0.0, 2 * kPi), 1e-9);
}

TEST(Sampled, RejectsBadGrids) {
  CurveSamples s{{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {}};
  EXPECT_THROW(BaseCurve::sampled(s), Error);
  CurveSamples z{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {}};
  try {
    BaseCurve::sampled(z);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroSpeed);
  }
}

TEST(Sampled, CubicReproducesCubicPolynomialsExactly) {
  // gamma(u) = u + i u^3 lies in the cubic Hermite space
  CurveSamples s;
  for (int i = 0; i <= 10; ++i) {
    const double u = -1 + 0.2 * i;
    s.u.push_back(u);
    s.pos.emplace_back(u, u * u * u);
    s.d1.emplace_back(1.0, 3 * u * u);
  }
  const auto c = BaseCurve::sampled(s);
  for (double u : {-0.93, -0.1, 0.37, 0.999}) {
    const auto j = c(u);
    EXPECT_NEAR(j.pos.imag(), u * u * u, 1e-14);
    EXPECT_NEAR(j.d1.imag(), 3 * u * u, 1e-13);
    EXPECT_NEAR(j.d2.imag(), 6 * u, 1e-12);
  }
  EXPECT_NEAR(c(0.2).d2.imag(), 1.2, 1e-12);  // node: averaged one-sided values
}

TEST(Sampled, QuinticUsesSecondDerivatives) {
  const auto exact = curves::perturbed_circle(0.1);
  const auto c = resample(exact, 201);
  for (double u = 0.01; u < 6.2; u += 0.37) {
    EXPECT_NEAR(std::abs(c(u).pos - exact(u).pos), 0.0, 1e-11);
    EXPECT_NEAR(std::abs(c(u).d2 - exact(u).d2), 0.0, 1e-7);
  }
}

TEST(Support, UnitCircle) {
  const auto sc = support_parameterize(curves::circle(1.0));
  for (double th = sc.domain().lo; th <= sc.domain().hi; th += 0.1) {
    const auto j = sc(th);
    EXPECT_NEAR(j.q, 1.0, 1e-12);
    EXPECT_NEAR(j.dq, 0.0, 1e-12);
  }
}

// Brute-force oracle: q(theta) = max over the point set of Re(gamma e^{-i theta}).
TEST(Support, OffsetCircleMatchesBruteForceFit) {
  const double r = 1.5;
  const cplx c0(0.4, -0.3);
  for (int orient : {1, -1}) {
    const auto sc = support_parameterize(curves::circle(r, c0, orient, {0.2, 5.5}));
    EXPECT_EQ(sc.orientation(), orient);
    for (double th = sc.domain().lo + 0.05; th < sc.domain().hi; th += 0.25) {
      double best = -1e300;
      for (int k = 0; k < 200000; ++k) {
        const cplx p = c0 + std::polar(r, 2 * kPi * k / 200000.0);
        best = std::max(best, (p * std::polar(1.0, -th)).real());
      }
      EXPECT_NEAR(sc(th).q, best, 1e-8);
      EXPECT_NEAR(sc(th).q, r + (std::conj(c0) * std::polar(1.0, th)).real(), 1e-10);
    }
  }
}

TEST(Support, LineThrowsCurvatureVanishes) {
  try {
    (void)support_parameterize(curves::line());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CurvatureVanishes);
  }
}

TEST(Support, RoundTripReproducesPointSet) {
  for (const auto& c : {curves::perturbed_circle(0.1), curves::circle(0.7, {0.2, 0.1}, -1, {0.0, 5.0}),
                        curves::log_spiral(0.2, {0.0, 4.0})}) {
    const auto sc = support_parameterize(c);
    EXPECT_GT(sc.min_radius_of_curvature(), 0.0);
    const auto back = from_support(sc);
    // each original point has a reconstructed point at the same normal angle
    for (int i = 0; i <= 200; ++i) {
      const double u = c.domain().at(i / 200.0);
      const auto j = c(u);
      const double th = std::arg(static_cast<double>(sc.orientation()) * j.d1) - kPi / 2;
      double best = 1e300;
      for (int k = -2; k <= 2; ++k) {
        const double t2 = th + 2 * kPi * k;
        if (sc.domain().contains(t2, 1e-12)) best = std::min(best, std::abs(back(std::clamp(t2, sc.domain().lo, sc.domain().hi)).pos - j.pos));
      }
      EXPECT_LT(best, 1e-7) << "u=" << u;
    }
  }
}

TEST(Support, RecoversQFromSupportCurve) {
  const SupportCurve q({-1.0, 2.0}, [](double t) {
    return SupportJet{2 + std::cos(t), -std::sin(t), -std::cos(t), std::sin(t)};
  });
  const auto sc = support_parameterize(from_support(q));
  for (double th = -0.9; th < 1.95; th += 0.07) EXPECT_NEAR(sc(th).q, 2 + std::cos(th), 1e-8);
}

TEST(FromSupport, Examples) {
  const SupportCurve one({0.0, 2 * kPi}, [](double) { return SupportJet{1, 0, 0, 0}; });
  const auto c = from_support(one);
  EXPECT_NEAR(std::abs(c(1.3).pos), 1.0, 1e-15);
  const SupportCurve q({-1.0, 1.0}, [](double t) { return SupportJet{2 + std::cos(t), -std::sin(t), -std::cos(t), std::sin(t)}; });
  const auto g = from_support(q);
  EXPECT_NEAR(std::abs(g(0.0).pos - cplx(3.0, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(g(0.4).d1), 2.0, 1e-14);  // speed q + q''
  // gamma'' agrees with differences of gamma'
  const double h = 1e-5;
  EXPECT_NEAR(std::abs((g(0.3 + h).d1 - g(0.3 - h).d1) / (2 * h) - g(0.3).d2), 0.0, 1e-8);
  const SupportCurve bad({0.0, 1.0}, [](double t) { return SupportJet{std::cos(t), -std::sin(t), -std::cos(t), std::sin(t)}; });
  try {
    (void)from_support(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConvexityViolation);
  }
}

TEST(CurveCsv, RoundTripKeepsSeventeenDigits) {
  const auto c = resample(curves::perturbed_circle(0.1), 50);
  std::stringstream ss;
  io::write_curve(ss, c);
  const auto back = io::read_curve(ss);
  for (double u : {0.0, 0.5, 3.0}) EXPECT_EQ(back(u).pos, c(u).pos);
}

TEST(CurveCsv, FiveColumnsAndErrors) {
  std::stringstream ok("u,gx,gy,dgx,dgy\n0,1,0,0,1\n1,0.54,0.84,-0.84,0.54\n");
  EXPECT_FALSE(io::read_curve(ok).samples()->d2.size());
  std::stringstream empty("");
  EXPECT_THROW(io::read_curve(empty), Error);
  std::stringstream header_only("u,gx,gy,dgx,dgy\n");
  EXPECT_THROW(io::read_curve(header_only), Error);
  std::stringstream junk("u,gx,gy,dgx,dgy\n0,1,x,0,1\n");
  EXPECT_THROW(io::read_curve(junk), Error);
}
