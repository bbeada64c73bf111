#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cpl/spectral.hpp"

namespace cpl {
namespace {

double sup_diff(const Field& a, const Field& b) { return (a - b).sup_norm(); }

TEST(CircleGrid, RejectsBadSizes) {
  EXPECT_THROW(CircleGrid(100), std::invalid_argument);
  EXPECT_THROW(CircleGrid(8), std::invalid_argument);
  EXPECT_NO_THROW(CircleGrid(16));
}

TEST(Derivative, FirstOfSine) {
  CircleGrid g(64);
  auto u = Field::from_function(g, [](double x) { return std::sin(x); });
  auto expect = Field::from_function(g, [](double x) { return std::cos(x); });
  EXPECT_LE(sup_diff(derivative(u, 1), expect), 1e-12);
}

TEST(Derivative, SecondOfSin3x) {
  CircleGrid g(64);
  auto u = Field::from_function(g, [](double x) { return std::sin(3 * x); });
  auto expect = Field::from_function(g, [](double x) { return -9 * std::sin(3 * x); });
  EXPECT_LE(sup_diff(derivative(u, 2), expect), 1e-10);
}

TEST(Derivative, ThirdOfCos2x) {
  CircleGrid g(32);
  auto u = Field::from_function(g, [](double x) { return std::cos(2 * x); });
  auto expect = Field::from_function(g, [](double x) { return 8 * std::sin(2 * x); });
  EXPECT_LE(sup_diff(derivative(u, 3), expect), 1e-11);
}

TEST(Derivative, ConstantGivesZero) {
  CircleGrid g(64);
  for (int order = 1; order <= 3; ++order) EXPECT_LE(derivative(Field::constant(g, 4.2), order).sup_norm(), 1e-13);
}

TEST(Derivative, RejectsOrder) {
  CircleGrid g(16);
  EXPECT_THROW(derivative(Field(g), 4), std::invalid_argument);
}

TEST(TrigInterpolant, ReproducesNodesAndOffGridValues) {
  CircleGrid g(32);
  auto fn = [](double x) { return 0.3 + std::sin(x) - 0.5 * std::cos(3 * x + 0.2); };
  auto u = Field::from_function(g, fn);
  TrigInterpolant p(u);
  for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(p(g.node(i)), u[i], 1e-13);
  for (double x = 0.01; x < 6.3; x += 0.173) {
    EXPECT_NEAR(p(x), fn(x), 1e-13);
    EXPECT_NEAR(p(x, 1), std::cos(x) + 1.5 * std::sin(3 * x + 0.2), 1e-12);
    EXPECT_NEAR(p(x, 2), -std::sin(x) + 4.5 * std::cos(3 * x + 0.2), 1e-11);
    EXPECT_NEAR(p(x, 3), -std::cos(x) - 13.5 * std::sin(3 * x + 0.2), 1e-10);
  }
}

TEST(TrigInterpolant, NyquistModeIsACosine) {
  CircleGrid g(16);
  auto u = Field::from_function(g, [](double x) { return std::cos(8 * x); });
  TrigInterpolant p(u);
  EXPECT_NEAR(p(0.05), std::cos(0.4), 1e-13);
  // consistent with the grid derivative, which drops the odd Nyquist derivatives
  EXPECT_LE(derivative(u, 1).sup_norm(), 1e-12);
}

TEST(Upsample, PreservesBandLimitedFunctions) {
  CircleGrid g(32);
  auto fn = [](double x) { return std::sin(2 * x) + 0.1 * std::cos(7 * x); };
  auto fine = upsample(Field::from_function(g, fn), 8);
  ASSERT_EQ(fine.size(), 256);
  EXPECT_LE(sup_diff(fine, Field::from_function(fine.grid(), fn)), 1e-13);
}

TEST(Field, NormsAndInnerProduct) {
  CircleGrid g(64);
  auto s = Field::from_function(g, [](double x) { return std::sin(x); });
  auto c = Field::from_function(g, [](double x) { return std::cos(x); });
  EXPECT_NEAR(inner_product(s, c), 0.0, 1e-14);
  EXPECT_NEAR(s.l2_norm(), std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_NEAR(s.sup_norm(), 1.0, 1e-15);
  EXPECT_NEAR(s.mean(), 0.0, 1e-15);
}

TEST(Fourier, RoundTripRandom) {
  CircleGrid g(128);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0, 1);
  Field u(g);
  for (auto& v : u.values()) v = N(rng);
  EXPECT_LE(sup_diff(from_spectrum(g, to_spectrum(u)), u), 1e-13);
}

}  // namespace
}  // namespace cpl
