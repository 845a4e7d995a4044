#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "cmc/conservation.hpp"
#include "cmc/io.hpp"
#include "oracles.hpp"

using namespace cmc;

namespace {

std::vector<double> grid(Interval d, int n) {
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = d.at((i + 0.5) / n);
  return u;
}

BaseCurve generic_curve() {
  return BaseCurve({0.0, 6.0}, [](double u) {
    const cplx e = std::polar(1.0, u), i(0, 1);
    const double r = 0.5 + 0.15 * std::sin(2 * u), dr = 0.3 * std::cos(2 * u), ddr = -0.6 * std::sin(2 * u);
    return CurveJet{r * e + cplx(0.05, -0.1), (dr + i * r) * e, (ddr - r + 2.0 * i * dr) * e};
  });
}

// ℍ³ hyperbolic-cylinder profile: a circle of Euclidean radius 1 (f = sqrt 2)
Twizzler h3_cylinder() { return Twizzler(SpaceForm::hyperbolic(), curves::circle(1.0), 1.0); }

}  // namespace

TEST(ConservedQuantity, HelicoidIsZero) {
  const Twizzler t(SpaceForm::euclidean(), curves::line({-2.0, 2.0}), 1.0);
  for (double u : {-1.5, 0.0, 0.7}) EXPECT_NEAR(conserved_quantity(t, u, 0.0), 0.0, 1e-15);
}

TEST(ConservedQuantity, CylinderValue) {
  const Twizzler t(SpaceForm::euclidean(), curves::circle(1.0), 1.0);
  for (double H : {0.0, 1.0, -0.3}) EXPECT_NEAR(conserved_quantity(t, 1.0, H), 2 * kPi - H * kPi, 1e-13);
}

TEST(ConservedQuantity, TorusValue) {
  for (double a : {0.3, std::sqrt(0.5), 0.9}) {
    const Twizzler t(SpaceForm::sphere(), curves::circle(a), 1.0);
    for (double H : {0.0, 0.4}) {
      EXPECT_NEAR(conserved_quantity(t, 2.0, H), 2 * kPi * a * std::sqrt(1 - a * a) - H * kPi * a * a, 1e-13);
    }
  }
}

TEST(ConservedQuantity, DegenerateAndAxis) {
  const BaseCurve stalled({-1.0, 1.0}, [](double u) { return CurveJet{cplx(u * u * u, 0), cplx(3 * u * u, 0), cplx(6 * u, 0)}; });
  EXPECT_THROW(conserved_quantity(Twizzler(SpaceForm::euclidean(), stalled, 1.0), 0.0, 0.0), Error);
  try {
    (void)conserved_quantity(Twizzler(SpaceForm::sphere(), curves::circle(1.0), 1.0), 0.0, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AxisTouch);
  }
}

TEST(ConservedQuantity, LinearInH) {
  auto g = oracle::rng(11);
  std::uniform_real_distribution<double> U(0.0, 6.0), Hd(-3.0, 3.0);
  for (auto sf : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const Twizzler t(sf, generic_curve(), 1.3);
    const double sign = sf.kind == SpaceKind::Hyperbolic3 ? 1.0 : -1.0;
    for (int i = 0; i < 50; ++i) {
      const double u = U(g), H1 = Hd(g), H2 = Hd(g);
      const double R = std::norm(t.base()(u).pos);
      EXPECT_NEAR(conserved_quantity(t, u, H1) - conserved_quantity(t, u, H2), sign * kPi * R * (H1 - H2), 1e-12);
    }
  }
}

TEST(ConservedQuantity, ReparameterizationInvariant) {
  const auto c = generic_curve();
  const auto w = reparameterize(c, {0.0, 1.0}, [](double s) {
    return std::array<double, 3>{6 * s * s, 12 * s, 12.0};
  });
  for (auto sf : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const Twizzler a(sf, c, 0.8), b(sf, w, 0.8);
    for (double s : {0.2, 0.5, 0.9}) EXPECT_NEAR(conserved_quantity(b, s, 0.7), conserved_quantity(a, 6 * s * s, 0.7), 1e-10);
  }
}

TEST(FluxConormal, Examples) {
  const Twizzler heli(SpaceForm::euclidean(), curves::line({-1.0, 1.0}), 1.0);
  EXPECT_NEAR(flux_conormal(heli, 0.5), 0.0, 1e-14);
  const Twizzler cyl(SpaceForm::euclidean(), curves::circle(1.0), 1.0);
  EXPECT_NEAR(flux_conormal(cyl, 0.3), flux_sign(SpaceKind::Euclidean3) * 2 * kPi, 1e-12);
}

// In R^3 the integrand is screw-invariant, so the quadrature is 2 pi times
// the pointwise value of <Y, eta> |T_v|.
TEST(FluxConormal, EuclideanIntegrandIsConstant) {
  const Twizzler t(SpaceForm::euclidean(), generic_curve(), 1.4);
  const auto f = helix_frame(t, 2.0, 0.0);
  const double point = metric(t.space(), killing_field(t.space(), t.immerse(2.0, 0.0)), f.eta) * metric_norm(t.space(), f.T_v);
  EXPECT_NEAR(flux_conormal(t, 2.0), 2 * kPi * point, 1e-13);
}

TEST(FluxConormal, MatchesTrapezoidOracle) {
  for (auto sf : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const Twizzler t(sf, generic_curve(), 1.3);
    for (double u : {0.4, 3.3}) EXPECT_NEAR(flux_conormal(t, u), oracle::conormal_flux(t, u), 1e-8) << space_name(sf.kind);
  }
}

TEST(FluxShaving, EuclideanIsMinusPiRSquared) {
  const Twizzler t(SpaceForm::euclidean(), generic_curve(), 1.3);
  for (double u : {0.1, 1.9, 4.4}) EXPECT_NEAR(flux_shaving(t, u), -kPi * std::norm(t.base()(u).pos), 1e-9);
  const Twizzler cyl(SpaceForm::euclidean(), curves::circle(1.0), 2.0);
  EXPECT_NEAR(flux_shaving(cyl, 0.0), -kPi, 1e-12);
}

TEST(FluxShaving, ZeroRadius) {
  const Twizzler heli(SpaceForm::euclidean(), curves::line({-1.0, 1.0}), 1.0);
  EXPECT_EQ(flux_shaving(heli, 0.0), 0.0);
  const Twizzler s(SpaceForm::sphere(), curves::line({-0.5, 0.5}), 1.0);
  EXPECT_EQ(flux_shaving(s, 0.0), 0.0);
}

TEST(FluxShaving, MatchesIndependentOracle) {
  for (auto sf : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const Twizzler t(sf, generic_curve(), 1.3);
    for (double u : {0.4, 3.3}) EXPECT_NEAR(flux_shaving(t, u), oracle::shaving_flux(t, u), 1e-7) << space_name(sf.kind);
  }
}

TEST(CheckConstancy, CylinderOwnH) {
  const Twizzler t(SpaceForm::euclidean(), curves::circle(1.0), 1.0);
  const auto u = grid(t.base().domain(), 100);
  const auto r = check_constancy(t, 1.0, u);
  EXPECT_LE(r.max_dev_closed, 1e-10);
  EXPECT_LE(r.max_dev_omega, 1e-8);
  EXPECT_LE(r.max_discrepancy, 1e-7);
  EXPECT_EQ(verdict(r.max_dev()), Verdict::Cmc);
  EXPECT_EQ(r.u.size(), r.omega.size());
  EXPECT_EQ(r.u.size(), r.abs_diff.size());
}

TEST(CheckConstancy, SignAgreesAcrossMethodsOnGenericCurves) {
  for (auto sf : {SpaceForm::euclidean(), SpaceForm::sphere(), SpaceForm::hyperbolic()}) {
    const Twizzler t(sf, generic_curve(), 1.3);
    const auto r = check_constancy(t, 0.8, grid(t.base().domain(), 12));
    EXPECT_LE(r.max_discrepancy, 1e-7) << space_name(sf.kind);
    EXPECT_GT(r.max_dev(), 1e-3);  // not CMC
  }
}

TEST(CheckConstancy, PerturbedCylinderIsFlagged) {
  const Twizzler t(SpaceForm::euclidean(), curves::perturbed_circle(0.1), 1.0);
  for (double H : {-1.0, 0.0, 1.0}) {
    const auto r = check_constancy(t, H, grid(t.base().domain(), 40));
    EXPECT_GE(r.max_dev_omega, 1e-3);
    EXPECT_EQ(verdict(r.max_dev()), Verdict::NonCmc);
  }
  // oracle: mean curvature itself is not constant
  double lo = 1e300, hi = -1e300;
  for (double u : grid(t.base().domain(), 40)) {
    const double h = oracle::fd_forms(t, u).h;
    lo = std::min(lo, h);
    hi = std::max(hi, h);
  }
  EXPECT_GT(hi - lo, 1e-2);
}

TEST(CheckConstancy, SingleRepeatedSample) {
  const Twizzler t(SpaceForm::euclidean(), curves::perturbed_circle(0.1), 1.0);
  const std::vector<double> u{1.0, 1.0, 1.0};
  EXPECT_EQ(check_constancy(t, 0.5, u).max_dev(), 0.0);
}

TEST(CheckConstancy, CmcExamplesOnHundredPointGrids) {
  const Twizzler torus(SpaceForm::sphere(), curves::circle(std::sqrt(0.5)), 1.0);
  const auto rt = check_constancy(torus, 0.0, grid(torus.base().domain(), 100), {false, {}});
  EXPECT_LE(rt.max_dev_closed, 1e-7);
  EXPECT_NEAR(rt.median_C, kPi, 1e-12);
  const auto t = h3_cylinder();
  const double H = mean_curvature(t, 0.0);
  const auto rh = check_constancy(t, H, grid(t.base().domain(), 100), {false, {}});
  EXPECT_LE(rh.max_dev_closed, 1e-7);
}

TEST(Verdict, Thresholds) {
  EXPECT_EQ(verdict(0.0), Verdict::Cmc);
  EXPECT_EQ(verdict(1e-6), Verdict::Cmc);
  EXPECT_EQ(verdict(1e-4), Verdict::Inconclusive);
  EXPECT_EQ(verdict(1e-3), Verdict::NonCmc);
  EXPECT_EQ(verdict_name(Verdict::NonCmc), "NON_CMC");
}

TEST(ConservationData, Link) {
  ConservationData d;
  d.C = -kPi * 0.5;
  EXPECT_TRUE(d.link_holds());
  d.M = 0.5;
  EXPECT_TRUE(d.link_holds());
  d.M = 0.6;
  EXPECT_FALSE(d.link_holds());
}

TEST(FluxReportCsv, Footer) {
  const Twizzler t(SpaceForm::euclidean(), curves::circle(1.0), 1.0);
  const std::vector<double> u{0.0, 1.0};
  std::stringstream ss;
  io::write_flux_report(ss, check_constancy(t, 1.0, u));
  const std::string s = ss.str();
  EXPECT_EQ(s.rfind("u,omega,closed_form,abs_diff", 0), 0u);
  EXPECT_NE(s.find("# median_C="), std::string::npos);
  EXPECT_NE(s.find("max_dev="), std::string::npos);
}
