#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "divlab/arith_core.hpp"
#include "divlab/residue_poly.hpp"

namespace {

using divlab::main_term_poly;
using divlab::stieltjes;

// Straight limit definition at m = 10^6 with the first two Euler-Maclaurin
// tail terms, summed in 50-digit arithmetic.
double stieltjes_oracle(int j) {
  using big = boost::multiprecision::cpp_bin_float_50;
  constexpr int m = 1000000;
  big s = 0;
  for (int n = 2; n <= m; ++n) {
    const big l = boost::multiprecision::log(big(n));
    s += boost::multiprecision::pow(l, j) / n;
  }
  if (j == 0) s += 1;
  const big lm = boost::multiprecision::log(big(m));
  s -= boost::multiprecision::pow(lm, j + 1) / (j + 1);
  s -= boost::multiprecision::pow(lm, j) / (2 * big(m));  // f(m)/2
  // B_2/2! f'(m), f'(x) = (j L^{j-1} - L^j) / x^2
  const big fp = (j * (j ? boost::multiprecision::pow(lm, j - 1) : big(0)) - boost::multiprecision::pow(lm, j)) /
                 (big(m) * m);
  s -= fp / 12;
  return static_cast<double>(s);
}

TEST(Stieltjes, MatchesLimitOracle) {
  EXPECT_NEAR(stieltjes(0), 0.5772156649015329, 1e-15);
  for (int j = 1; j <= 2; ++j) EXPECT_NEAR(stieltjes(j), stieltjes_oracle(j), 1e-12) << j;
  EXPECT_NEAR(stieltjes(1), -0.0728158, 1e-7);
  EXPECT_NEAR(stieltjes(2), -0.00969, 1e-5);
}

TEST(Stieltjes, FrozenReferenceValues) {
  // 30-digit reference values rounded to double.
  EXPECT_NEAR(stieltjes(3), 0.002053834420303346, 1e-14);
  EXPECT_NEAR(stieltjes(4), 0.002325370065467300, 1e-14);
}

TEST(Stieltjes, DomainAndPrecisionErrors) {
  EXPECT_THROW((void)stieltjes(5), divlab::ArgumentError);
  EXPECT_THROW((void)stieltjes(-1), divlab::ArgumentError);
  EXPECT_THROW((void)stieltjes(4, 1e-22), divlab::PrecisionError);
}

TEST(Stieltjes, EulerConstantInterval) {
  const auto g = divlab::stieltjes_constants();
  EXPECT_GT(g.euler(), 0.577215);
  EXPECT_LT(g.euler(), 0.577216);
  // Laurent coefficients carry (-1)^j / j!.
  EXPECT_DOUBLE_EQ(g.laurent_coefficient(1), -g.gamma[1]);
  EXPECT_DOUBLE_EQ(g.laurent_coefficient(2), g.gamma[2] / 2);
}

TEST(Constants, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "divlab_constants.txt";
  const auto g = divlab::stieltjes_constants();
  divlab::store_constants(g, path);
  const auto h = divlab::load_constants(path);
  EXPECT_EQ(g.gamma, h.gamma);
  std::ifstream in(path);
  std::string line;
  int values = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    EXPECT_NE(line.find('='), std::string::npos);
    ++values;
  }
  EXPECT_EQ(values, 5);
  std::ofstream(path) << "gamma_0 0.5\n";
  EXPECT_THROW((void)divlab::load_constants(path), divlab::FormatError);
  std::filesystem::remove(path);
}

TEST(MainTerm, ClosedFormsForOrdersTwoAndThree) {
  const double g = stieltjes(0);
  const double c1 = -stieltjes(1);  // coefficient of (s-1) in zeta(s) - 1/(s-1)
  const auto p1 = main_term_poly(2);
  ASSERT_EQ(p1.coeffs.size(), 2u);
  EXPECT_NEAR(p1.coeffs[0], 2 * g - 1, 1e-12);
  EXPECT_NEAR(p1.coeffs[1], 1.0, 1e-12);
  const auto p2 = main_term_poly(3);
  ASSERT_EQ(p2.coeffs.size(), 3u);
  EXPECT_NEAR(p2.coeffs[0], 3 * g * g - 3 * g + 3 * c1 + 1, 1e-12);
  EXPECT_NEAR(p2.coeffs[1], 3 * g - 1, 1e-12);
  EXPECT_NEAR(p2.coeffs[2], 0.5, 1e-12);
  // Residue evaluated by a contour integral at 30 digits.
  EXPECT_NEAR(p2.coeffs[0], 0.486334313169587615717, 1e-12);
}

TEST(MainTerm, DegreeAndLeadingCoefficient) {
  EXPECT_EQ(main_term_poly(1).coeffs, divlab::Poly{1.0});
  double fact = 1;
  for (int k = 1; k <= 4; ++k) {
    const auto p = main_term_poly(k);
    ASSERT_EQ(p.coeffs.size(), static_cast<std::size_t>(k));
    EXPECT_NEAR(p.coeffs.back(), 1.0 / fact, 1e-15);
    fact *= k;
  }
  EXPECT_THROW((void)main_term_poly(0), divlab::ArgumentError);
  EXPECT_THROW((void)main_term_poly(5), divlab::ArgumentError);
}

TEST(MainTerm, OrderFourReferenceCoefficients) {
  // Residue of x^{s-1} zeta^4(s) / s at s = 1, 30 digits, rounded.
  const double want[4] = {0.272778435718839091, 0.981468265174887503, 0.654431329803065721, 1.0 / 6};
  const auto p = main_term_poly(4);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(p.coeffs[i], want[i], 1e-12) << i;
}

TEST(MainTerm, OrderFourErrorStaysBelowPowerBound) {
  // A wrong coefficient leaves a term of size x log^j x; the true error is
  // about 40 x^0.55 on this range.
  const auto t = divlab::sieve_dk(4, 1000000);
  const auto p = main_term_poly(4);
  double worst = 0;
  for (double x = 1e4; x <= 1e6; x += 97.5) {
    const double d = static_cast<double>(t.summatory(x)) - divlab::eval_main_term(p, x);
    worst = std::max(worst, std::abs(d) / std::pow(x, 0.55));
  }
  EXPECT_LT(worst, 60);
}

TEST(MainTerm, EvaluationExamples) {
  const auto p1 = main_term_poly(2);
  EXPECT_NEAR(divlab::eval_main_term(p1, 1.0), 0.1544313298030657, 1e-13);
  EXPECT_NEAR(divlab::eval_main_term(p1, 100.0), 100 * (std::log(100.0) + 2 * 0.5772156649015329 - 1), 1e-11);
  EXPECT_NEAR(divlab::eval_main_term(p1, 100.0), 475.96015, 1e-5);
  EXPECT_DOUBLE_EQ(divlab::eval_main_term(main_term_poly(1), 7.5), 7.5);
  EXPECT_THROW((void)divlab::eval_main_term(p1, 0.0), divlab::RangeError);
}

TEST(MainTerm, DerivativeMatchesFiniteDifference) {
  for (int k = 2; k <= 4; ++k) {
    const auto p = main_term_poly(k);
    const double x = 1000, h = 1e-4, t = std::log(x);
    const double fd = (divlab::eval_main_term(p, x + h) - divlab::eval_main_term(p, x - h)) / (2 * h);
    const double exact = divlab::horner<double>(p.coeffs, t) + divlab::horner<double>(divlab::poly_derivative(p.coeffs), t);
    EXPECT_NEAR(fd / exact, 1.0, 1e-6) << k;
  }
}

TEST(MainTerm, DoubleDoubleKeepsCancellation) {
  const auto p = main_term_poly(3);
  const double x = 9876543.25;
  const auto [hi, lo] = divlab::main_term_dd(p.coeffs, x);
  long double t = std::log(static_cast<long double>(x));
  long double ref = x * (p.coeffs[0] + t * (p.coeffs[1] + t * p.coeffs[2]));
  EXPECT_NEAR(static_cast<double>((hi - ref) + lo), 0.0, 1e-6);
}

}  // namespace
