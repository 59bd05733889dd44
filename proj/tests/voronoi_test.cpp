#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "divlab/moment_engine.hpp"
#include "divlab/voronoi.hpp"

namespace {

using namespace divlab;

class Voronoi : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { d2_ = new DivisorTable(sieve_dk(2, 2000000)); }
  static void TearDownTestSuite() { delete d2_; }
  static DivisorTable* d2_;
};
DivisorTable* Voronoi::d2_ = nullptr;

TEST_F(Voronoi, SingleTermAndEmpty) {
  const auto p1 = make_voronoi_params(*d2_, 1);
  EXPECT_NEAR(voronoi_sum(p1, 1.0), 1.0 / (2 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(voronoi_sum(p1, 1.0), 0.1591549, 1e-7);
  const auto p0 = make_voronoi_params(*d2_, 0);
  EXPECT_EQ(voronoi_sum(p0, 12345.6), 0.0);
}

TEST_F(Voronoi, ParamsInvariants) {
  const auto p = make_voronoi_params(*d2_, 1000);
  ASSERT_EQ(p.weights.size(), 1000u);
  for (std::size_t n = 1; n <= 1000; ++n) {
    EXPECT_GT(p.weights[n - 1], 0);
    EXPECT_DOUBLE_EQ(p.weights[n - 1], (*d2_)[n] * std::pow(static_cast<double>(n), -0.75));
  }
  EXPECT_THROW((void)make_voronoi_params(sieve_dk(3, 100), 10), ArgumentError);
}

TEST_F(Voronoi, LongSumTracksDelta) {
  const auto p = make_voronoi_params(*d2_, 10000);
  const double x = 10000.5;
  // Truncation error is of size x^{1/2} N^{-1/2} = 1 up to logs.
  EXPECT_NEAR(voronoi_sum(p, x), delta_k(*d2_, main_term_poly(2), x), 3.0);
}

TEST_F(Voronoi, RemainderReconstruction) {
  const auto p = make_voronoi_params(*d2_, 300);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(1.0, 100000.0);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    const double d = delta_k(*d2_, main_term_poly(2), x);
    EXPECT_NEAR(voronoi_remainder(p, x) + voronoi_sum(p, x), d, 1e-9 * (1 + std::abs(d)));
  }
}

TEST_F(Voronoi, RemainderSweepBound) {
  const auto p = make_voronoi_params(*d2_, 1000);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const double x = 10000.0 + 10.0 * i + 0.37;
    worst = std::max(worst, std::abs(voronoi_remainder(p, x)) / (10 * std::sqrt(x) / std::sqrt(1000.0)));
  }
  EXPECT_LE(worst, 1.0);
}

TEST_F(Voronoi, SampledRemainderShrinksWithN) {
  const auto p = make_voronoi_params(*d2_, 2000);
  const auto q = make_voronoi_params(*d2_, 1000);
  double a = 0, b = 0;
  for (int i = 0; i < 4000; ++i) {
    const double x = 10000.0 + 2.5 * i + 0.123;
    a += std::pow(voronoi_remainder(q, x), 2);
    b += std::pow(voronoi_remainder(p, x), 2);
  }
  EXPECT_GE(a / b, 1.1);
  EXPECT_LE(a / b, 2.1);
}

TEST_F(Voronoi, MeanSquareAgainstFineQuadrature) {
  // Midpoint rule on a 1/64 grid against the panel integral.
  const auto p = make_voronoi_params(*d2_, 50);
  const double X = 2000;
  const double v = remainder_mean_square(p, X);
  long double s = 0;
  const double h = 1.0 / 64;
  for (double x = X + h / 2; x < 2 * X; x += h) s += std::pow(voronoi_remainder(p, x), 2) * h;
  EXPECT_NEAR(v / static_cast<double>(s), 1.0, 1e-4);
}

TEST_F(Voronoi, MeanSquareExamples) {
  const auto p = make_voronoi_params(*d2_, 400);
  const auto v = remainder_mean_square_batch(p, 10000, {100, 400});
  EXPECT_LE(v[0], 10 * remainder_scale(10000, 100));
  EXPECT_GE(v[0] / v[1], 1.3);
  EXPECT_LE(v[0] / v[1], 3.2);
  EXPECT_DOUBLE_EQ(v[1], remainder_mean_square(p, 10000));
}

TEST_F(Voronoi, MeanSquareNonincreasingInN) {
  const auto p = make_voronoi_params(*d2_, 800);
  const auto v = remainder_mean_square_batch(p, 5000, {25, 50, 100, 200, 400, 800});
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i], 1.2 * v[i - 1]);
}

TEST_F(Voronoi, MeanSquareErrors) {
  const auto p = make_voronoi_params(*d2_, 2000);
  EXPECT_THROW((void)remainder_mean_square(p, 1000), ArgumentError);        // N > X
  EXPECT_THROW((void)remainder_mean_square(p, 1500000), ArgumentError);     // 2X beyond table
  EXPECT_THROW((void)remainder_mean_square_batch(p, 1e4, {4000}), ArgumentError);
}

TEST_F(Voronoi, ThreadCountDoesNotChangeResult) {
  const auto p = make_voronoi_params(*d2_, 200);
  VoronoiOptions one, four;
  one.threads = 1;
  four.threads = 4;
  EXPECT_EQ(remainder_mean_square(p, 3000, one), remainder_mean_square(p, 3000, four));
}

TEST_F(Voronoi, AmplitudeGrowsLikeQuarterPower) {
  // RMS of the truncated sum over [X, 2X] by dense sampling.
  const auto p = make_voronoi_params(*d2_, 20);
  std::vector<double> xs, rms;
  for (double X = 1e4; X <= 1e6 * 1.0001; X *= 2) {
    long double s = 0;
    constexpr int kSamples = 20000;
    for (int i = 0; i < kSamples; ++i) s += std::pow(voronoi_sum(p, X + X * (i + 0.5) / kSamples), 2);
    xs.push_back(X);
    rms.push_back(std::sqrt(static_cast<double>(s / kSamples)));
  }
  EXPECT_NEAR(fit_exponent(xs, rms).slope, 0.25, 0.03);
}

}  // namespace
