#include <cmath>
#include <complex>
#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "specpert/ensemble.hpp"
#include "specpert/errors.hpp"
#include "specpert/rng.hpp"

using namespace specpert;

namespace {

struct Stats {
  double mean = 0.0, var = 0.0, m4 = 0.0;
};

Stats law_stats(EntryLaw law, int draws) {
  Stats s;
  double sum = 0.0, sum2 = 0.0, sum4 = 0.0;
  for (int k = 0; k < draws; ++k) {
    const double v = standardized_entry(2024, static_cast<std::size_t>(k) / 400, static_cast<std::size_t>(k) % 400 + 400, law);
    sum += v;
    sum2 += v * v;
    sum4 += v * v * v * v;
  }
  s.mean = sum / draws;
  s.var = sum2 / draws - s.mean * s.mean;
  s.m4 = sum4 / draws;
  return s;
}

}  // namespace

TEST(EntryLaw, StandardizedMoments) {
  const int draws = 100000;
  const double mean_tol = 4.0 / std::sqrt(static_cast<double>(draws));
  for (auto law : {EntryLaw::gaussian, EntryLaw::rademacher, EntryLaw::uniform_centered}) {
    const auto s = law_stats(law, draws);
    EXPECT_LE(std::abs(s.mean), mean_tol) << to_string(law);
    EXPECT_NEAR(s.var, 1.0, 0.02) << to_string(law);
  }
  EXPECT_NEAR(law_stats(EntryLaw::gaussian, draws).m4, 3.0, 0.1);
  EXPECT_NEAR(law_stats(EntryLaw::rademacher, draws).m4, 1.0, 1e-12);
  EXPECT_NEAR(law_stats(EntryLaw::uniform_centered, draws).m4, 1.8, 0.05);
}

TEST(EntryLaw, NamesRoundTrip) {
  for (auto law : {EntryLaw::gaussian, EntryLaw::rademacher, EntryLaw::uniform_centered})
    EXPECT_EQ(parse_entry_law(to_string(law)), law);
  EXPECT_THROW(parse_entry_law("cauchy"), ValidationError);
}

TEST(EntryLaw, DrawIsPureFunctionOfPosition) {
  EXPECT_EQ(standardized_entry(7, 3, 5, EntryLaw::gaussian), standardized_entry(7, 3, 5, EntryLaw::gaussian));
  EXPECT_NE(standardized_entry(7, 3, 5, EntryLaw::gaussian), standardized_entry(8, 3, 5, EntryLaw::gaussian));
  EXPECT_NE(standardized_entry(7, 3, 5, EntryLaw::gaussian), standardized_entry(7, 3, 6, EntryLaw::gaussian));
}

TEST(EntryLaw, ComplexDrawHasHalfVariancePartsAndRealDiagonal) {
  double re2 = 0.0, im2 = 0.0, cross = 0.0;
  const int draws = 40000;
  for (int k = 0; k < draws; ++k) {
    const auto v = standardized_complex_entry(11, static_cast<std::size_t>(k), static_cast<std::size_t>(k) + 1, EntryLaw::gaussian);
    re2 += v.real() * v.real();
    im2 += v.imag() * v.imag();
    cross += v.real() * v.imag();
  }
  EXPECT_NEAR(re2 / draws, 0.5, 0.02);
  EXPECT_NEAR(im2 / draws, 0.5, 0.02);
  EXPECT_LE(std::abs(cross / draws), 4.0 / std::sqrt(static_cast<double>(draws)));
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(standardized_complex_entry(11, i, i, EntryLaw::gaussian).imag(), 0.0);
}

TEST(SamplePerturbation, BandEntryOutsideBandIsExactlyZero) {
  const auto d = discretize(build_band_model(0.1), 100);
  const auto x = sample_perturbation(d, EntryLaw::gaussian, 5);
  EXPECT_EQ(x(9, 89), 0.0);
  EXPECT_EQ(x(89, 9), 0.0);
  EXPECT_NE(x(9, 12), 0.0);
}

TEST(SamplePerturbation, ExactlyHermitianRealAndComplex) {
  const auto d = discretize(build_wigner_model(), 60);
  const auto x = sample_perturbation(d, EntryLaw::rademacher, 17);
  EXPECT_TRUE((x - x.transpose()).isZero(0.0));
  const auto xc = sample_hermitian_perturbation(d, EntryLaw::gaussian, 17);
  EXPECT_TRUE((xc - xc.adjoint()).isZero(0.0));
  for (int i = 0; i < 60; ++i) EXPECT_EQ(xc(i, i).imag(), 0.0);
}

TEST(SamplePerturbation, BitwiseIdenticalAcrossWorkerCounts) {
  const auto d = discretize(build_band_model(0.3), 301);
  const auto a = sample_perturbation(d, EntryLaw::gaussian, 42, 1);
  for (int w : {2, 3, 8}) {
    const auto b = sample_perturbation(d, EntryLaw::gaussian, 42, w);
    EXPECT_TRUE(a == b) << w << " workers";
  }
  const auto ca = sample_hermitian_perturbation(d, EntryLaw::uniform_centered, 42, 1);
  const auto cb = sample_hermitian_perturbation(d, EntryLaw::uniform_centered, 42, 4);
  EXPECT_TRUE(ca == cb);
}

TEST(SamplePerturbation, WignerScaledVarianceIsOne) {
  const std::size_t n = 2000;
  const auto d = discretize(build_wigner_model(), n);
  const auto x = sample_perturbation(d, EntryLaw::gaussian, rng::derive_seed(12345, n, 0));
  std::mt19937_64 gen(3);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  double sum = 0.0, sum2 = 0.0;
  const int m = 10000;
  for (int k = 0; k < m; ++k) {
    const double v = std::sqrt(static_cast<double>(n)) * x(idx(gen), idx(gen));
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / m;
  EXPECT_NEAR(sum2 / m - mean * mean, 1.0, 0.05);
}

TEST(SamplePerturbation, NeighbouringEntriesUncorrelatedAcrossSeeds) {
  const int seeds = 10000;
  double sxy = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const double a = standardized_entry(static_cast<std::uint64_t>(s), 0, 1, EntryLaw::gaussian);
    const double b = standardized_entry(static_cast<std::uint64_t>(s), 0, 2, EntryLaw::gaussian);
    sx += a;
    sy += b;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  const double cov = sxy / seeds - (sx / seeds) * (sy / seeds);
  const double corr = cov / std::sqrt((sxx / seeds - std::pow(sx / seeds, 2)) * (syy / seeds - std::pow(sy / seeds, 2)));
  EXPECT_LE(std::abs(corr), 4.0 / std::sqrt(static_cast<double>(seeds)));
}

TEST(SamplePerturbation, EntryVarianceFollowsProfile) {
  const std::size_t n = 40;
  const auto d = discretize(build_band_model(0.3), n);
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < 100) {
    const std::size_t i = idx(gen), j = idx(gen);
    if (d.variance(i, j) >= 0.1) pairs.emplace_back(i, j);
  }
  std::vector<double> s2(pairs.size(), 0.0);
  const int seeds = 2000;
  for (int s = 0; s < seeds; ++s) {
    const auto x = sample_perturbation(d, EntryLaw::gaussian, static_cast<std::uint64_t>(s) + 1000);
    for (std::size_t p = 0; p < pairs.size(); ++p) s2[p] += n * std::pow(x(pairs[p].first, pairs[p].second), 2);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double target = d.variance(pairs[p].first, pairs[p].second);
    EXPECT_NEAR(s2[p] / seeds, target, 0.1 * target) << pairs[p].first << "," << pairs[p].second;
  }
}

TEST(Assemble, SmallExamples) {
  DiscretizedModel one;
  one.n = 1;
  one.lambda = Eigen::VectorXd::Constant(1, 0.3);
  one.variance = [](std::size_t, std::size_t) { return 1.0; };
  const auto s1 = assemble(one, Eigen::MatrixXd(Eigen::MatrixXd::Constant(1, 1, 0.2)), 0.1);
  EXPECT_NEAR(s1.d_eps(0, 0), 0.32, 1e-15);

  DiscretizedModel two;
  two.n = 2;
  two.lambda = Eigen::Vector2d(0.0, 1.0);
  two.variance = [](std::size_t, std::size_t) { return 1.0; };
  Eigen::MatrixXd x(2, 2);
  x << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  const auto s2 = assemble(two, x, 0.1);
  EXPECT_EQ(s2.d_eps(0, 0), 0.0);
  EXPECT_EQ(s2.d_eps(1, 1), 1.0);
  EXPECT_NEAR(s2.d_eps(0, 1), 0.0707106781186548, 1e-15);
  EXPECT_EQ(s2.d_eps(0, 1), s2.d_eps(1, 0));

  const auto s0 = assemble(two, x, 0.0);
  EXPECT_TRUE(s0.d_eps.isApprox(Eigen::MatrixXd(two.lambda.asDiagonal())));
}

TEST(Assemble, PerturbationPartIsExact) {
  const auto d = discretize(build_wigner_model(), 50);
  const auto x = sample_perturbation(d, EntryLaw::gaussian, 4);
  const double eps = epsilon_rule(50, 0.7);
  const auto s = assemble(d, x, eps, 4);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j) EXPECT_EQ(s.d_eps(i, j), i == j ? d.lambda(i) + eps * x(i, i) : eps * x(i, j));
  EXPECT_EQ(s.seed, 4u);
  EXPECT_EQ(s.n(), 50u);
}

TEST(Assemble, RejectsMismatchAndNegativeEpsilon) {
  const auto d = discretize(build_wigner_model(), 5);
  EXPECT_THROW(assemble(d, Eigen::MatrixXd(Eigen::MatrixXd::Zero(4, 4)), 0.1), ValidationError);
  EXPECT_THROW(assemble(d, Eigen::MatrixXd(Eigen::MatrixXd::Zero(5, 5)), -0.1), ValidationError);
}

TEST(EpsilonRule, ExamplesAndBoundary) {
  EXPECT_NEAR(epsilon_rule(10000, 0.7), std::pow(10.0, -2.8), 1e-18);
  EXPECT_NEAR(epsilon_rule(10000, 0.7), 1.585e-3, 1e-6);
  EXPECT_EQ(epsilon_rule(1, 0.9), 1.0);
  EXPECT_THROW(epsilon_rule(100, 0.5), ValidationError);
  try {
    epsilon_rule(100, 0.4);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("n^(-1/2)"), std::string::npos);
  }
}

TEST(MatrixDump, RoundTripRealAndComplex) {
  const auto dir = std::filesystem::temp_directory_path() / "specpert_dump_test";
  std::filesystem::create_directories(dir);
  const auto d = discretize(build_wigner_model(), 7);
  const auto x = sample_perturbation(d, EntryLaw::gaussian, 9);
  write_matrix_dump((dir / "r.bin").string(), x, 0.125, 9);
  const auto r = read_matrix_dump((dir / "r.bin").string());
  EXPECT_FALSE(r.complex);
  EXPECT_EQ(r.n, 7u);
  EXPECT_EQ(r.epsilon, 0.125);
  EXPECT_EQ(r.seed, 9u);
  EXPECT_TRUE(r.real == x);

  const auto xc = sample_hermitian_perturbation(d, EntryLaw::gaussian, 10);
  write_matrix_dump((dir / "c.bin").string(), xc, 0.5, 10);
  const auto c = read_matrix_dump((dir / "c.bin").string());
  EXPECT_TRUE(c.complex);
  EXPECT_TRUE(c.cplx == xc);
  EXPECT_THROW(read_matrix_dump((dir / "nothing.bin").string()), std::exception);
  std::filesystem::remove_all(dir);
}

TEST(Seeds, DerivationIsStableAndDistinct) {
  EXPECT_EQ(rng::derive_seed(12345, 2000, 0), rng::derive_seed(12345, 2000, 0));
  EXPECT_NE(rng::derive_seed(12345, 2000, 0), rng::derive_seed(12345, 2000, 1));
  EXPECT_NE(rng::derive_seed(12345, 2000, 0), rng::derive_seed(12345, 500, 0));
  EXPECT_NE(rng::derive_seed(12345, 2000, 0), rng::derive_seed(12346, 2000, 0));
}
