#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "specpert/quadrature.hpp"

using namespace specpert;

TEST(Quadrature, PolynomialAndTranscendentalIntegrals) {
  const std::vector<double> unit{0.0, 1.0};
  EXPECT_NEAR(integrate([](double t) { return t * t * t; }, unit, {}).value, 0.25, 1e-14);
  EXPECT_NEAR(integrate([](double t) { return std::exp(t); }, unit, {}).value, std::numbers::e - 1.0, 1e-13);
  const std::vector<double> half_period{0.0, std::numbers::pi};
  EXPECT_NEAR(integrate([](double t) { return std::sin(t); }, half_period, {}).value, 2.0, 1e-12);
}

TEST(Quadrature, SqrtEndpointSingularityConverges) {
  const std::vector<double> unit{0.0, 1.0};
  const auto r = integrate([](double t) { return std::sqrt(t); }, unit, {});
  EXPECT_NEAR(r.value, 2.0 / 3.0, 1e-9);
  EXPECT_GT(r.panels, 1);
}

TEST(Quadrature, BreakpointsAtJumpGiveExactStepIntegral) {
  const auto step = [](double t) { return t < 0.3 ? 1.0 : 0.0; };
  const std::vector<double> split{0.0, 0.3, 1.0};
  const auto r = integrate(step, split, {});
  EXPECT_NEAR(r.value, 0.3, 1e-15);
  EXPECT_EQ(r.panels, 2);
}

TEST(Quadrature, ComplexIntegrand) {
  const std::complex<double> z(0.5, 1.0);
  const std::vector<double> unit{0.0, 1.0};
  const auto r = integrate([&](double t) { return 1.0 / (z - t); }, unit, {});
  EXPECT_LT(std::abs(r.value - (std::log(z) - std::log(z - 1.0))), 1e-12);
}

TEST(Quadrature, CompositeModeUsesFixedPanels) {
  QuadratureSpec q;
  q.method = QuadratureMethod::composite;
  q.max_subdivisions = 8;
  const std::vector<double> pts{0.0, 0.5, 1.0};
  const auto r = integrate([](double t) { return std::cos(t); }, pts, q);
  EXPECT_EQ(r.panels, 16);
  EXPECT_NEAR(r.value, std::sin(1.0), 1e-14);
}

TEST(Quadrature, ExhaustedBudgetThrows) {
  QuadratureSpec q;
  q.max_subdivisions = 3;
  q.abs_tol = 1e-14;
  q.rel_tol = 1e-14;
  const std::vector<double> unit{0.0, 1.0};
  EXPECT_THROW(integrate([](double t) { return t < 0.123456 ? 0.0 : 1.0; }, unit, q), NumericalError);
}

TEST(Quadrature, SpecValidationAndTightening) {
  QuadratureSpec q;
  EXPECT_NO_THROW(q.validate());
  const auto t = q.tightened(0.1);
  EXPECT_DOUBLE_EQ(t.abs_tol, q.abs_tol * 0.1);
  EXPECT_DOUBLE_EQ(t.rel_tol, q.rel_tol * 0.1);
  q.abs_tol = 0.0;
  EXPECT_THROW(q.validate(), ValidationError);
  QuadratureSpec d;
  d.singularity_delta = -1.0;
  EXPECT_THROW(d.validate(), ValidationError);
}

TEST(Quadrature, BreakpointsWithinClipsAndSorts) {
  const auto b = breakpoints_within(0.0, 1.0, {0.5, -0.2, 0.5, 1.7, 0.25});
  const std::vector<double> expected{0.0, 0.25, 0.5, 1.0};
  EXPECT_EQ(b, expected);
}

TEST(Quadrature, GaussLegendreUnitIsExactForDegree31) {
  const double v = gauss_legendre_unit<16>([](double t) { return std::pow(t, 31); });
  EXPECT_NEAR(v, 1.0 / 32.0, 1e-15);
}
