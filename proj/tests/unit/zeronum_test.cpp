#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cpl/error.hpp"
#include "cpl/symmetry.hpp"
#include "cpl/zeronum.hpp"

namespace cpl {
namespace {

constexpr double kPi = std::numbers::pi;

Field make(int n, double (*fn)(double)) { return Field::from_function(CircleGrid(n), fn); }

TEST(ZeroNumber, Examples) {
  auto z = zero_number(make(64, [](double x) { return std::sin(3 * x); }));
  EXPECT_EQ(z.count, 6);
  EXPECT_TRUE(z.all_simple);
  EXPECT_FALSE(z.ambiguous);
  EXPECT_NEAR(z.min_crossing_slope, 3.0, 1e-9);

  EXPECT_EQ(zero_number(Field::constant(CircleGrid(32), 1.0)).count, 0);
  EXPECT_EQ(zero_number(make(32, [](double x) { return std::sin(x) + 0.5; })).count, 2);
  EXPECT_THROW(zero_number(Field(CircleGrid(32))), DegenerateField);
  EXPECT_THROW(zero_number(Field::constant(CircleGrid(32), 1e-12), 1e-9), DegenerateField);
}

TEST(ZeroNumber, CrossingLocations) {
  const auto z = zero_number(make(64, [](double x) { return std::sin(x + 0.3); }));
  ASSERT_EQ(z.count, 2);
  EXPECT_NEAR(z.crossings[0], kPi - 0.3, 1e-12);
  EXPECT_NEAR(z.crossings[1], 2 * kPi - 0.3, 1e-12);
}

TEST(ZeroNumber, ZeroOnNodeCountsOnce) {
  // sin(4x) vanishes exactly on nodes of a 64 grid
  const auto z = zero_number(make(64, [](double x) { return std::sin(4 * x); }), 1e-6);
  EXPECT_EQ(z.count, 8);
  EXPECT_TRUE(z.all_simple);
}

TEST(ZeroNumber, DoubleZeroIsNotSimple) {
  const auto z = zero_number(make(64, [](double x) { return 1.0 - std::cos(x); }), 1e-6);
  EXPECT_TRUE(!z.all_simple || z.ambiguous);
  EXPECT_FALSE(simple_zero_certificate(make(64, [](double x) { return 1.0 - std::cos(x); }), 1e-6).simple);
}

TEST(ZeroNumber, ParityOfSimpleCounts) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0.0, 1.0);
  const CircleGrid g(64);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(7), b(7);
    for (auto& v : a) v = N(rng);
    for (auto& v : b) v = N(rng);
    const auto u = Field::from_function(g, [&](double x) {
      double s = a[0];
      for (int k = 1; k < 7; ++k) s += a[k] * std::cos(k * x) + b[k] * std::sin(k * x);
      return s;
    });
    const auto z = zero_number(u);
    if (z.all_simple) EXPECT_EQ(z.count % 2, 0);
    for (int j = 0; j < g.size(); j += 5) EXPECT_EQ(zero_number(shift(u, g.node(j))).count, z.count);
  }
}

TEST(SimpleZeroCertificate, SineHasUnitSlope) {
  const auto c = simple_zero_certificate(make(64, [](double x) { return std::sin(x); }));
  EXPECT_TRUE(c.simple);
  EXPECT_NEAR(c.min_slope, 1.0, 1e-9);
  EXPECT_NEAR(c.delta, 2 * kPi / 64 / 4, 1e-9);
}

TEST(SimpleZeroCertificate, NearTangencyHasSmallSlope) {
  const double eps = 1e-4;
  const CircleGrid g(128);
  const auto u = Field::from_function(g, [eps](double x) { return std::sin(x) * std::sin(x) - eps; });
  const auto c = simple_zero_certificate(u);
  EXPECT_EQ(zero_number(u).count, 4);
  // |d/dx sin^2 x| = |sin 2x| = 2 sqrt(eps (1 - eps)) at the zeros
  EXPECT_NEAR(c.min_slope, 2 * std::sqrt(eps * (1 - eps)), 1e-9);
}

TEST(SimpleZeroCertificate, PerturbationsWithinDeltaKeepCount) {
  std::mt19937_64 rng(17);
  const CircleGrid g(64);
  const auto u = Field::from_function(g, [](double x) { return std::sin(2 * x) + 0.4 * std::cos(5 * x) + 0.1; });
  const auto c = simple_zero_certificate(u);
  ASSERT_TRUE(c.simple);
  ASSERT_GT(c.delta, 0.0);
  const int count = zero_number(u).count;
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    Field v(g);
    for (int j = 0; j < g.size(); ++j) v[j] = 0.999 * c.delta * U(rng);
    EXPECT_EQ(zero_number(u + v).count, count);
  }
}

TEST(ZeroSeries, CsvColumns) {
  ZeroSeries s;
  s.times = {0.0, 0.5};
  ZeroCount a;
  a.count = 2;
  s.counts = {a, a};
  std::ostringstream os;
  write_csv(os, s);
  EXPECT_EQ(os.str(), "t,count,all_simple,ambiguous\n0,2,1,0\n0.5,2,1,0\n");
}

TEST(MonitorDifference, AppendixPairKeepsTwoZeros) {
  const CircleGrid g(32);
  const auto nl = Nonlinearity::appendix();
  const auto hull = make_hull_point(QuasiPeriodicSignal::dyadic());
  const auto u1 = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto t1 = evolve(u1, hull, nl, 10.0, 1e-2, 10);
  const auto t2 = evolve(2.0 * u1, hull, nl, 10.0, 1e-2, 10);
  const auto s = monitor_difference(t1, t2);
  for (const auto& z : s.counts) EXPECT_EQ(z.count, 2);
  EXPECT_TRUE(s.drop_events.empty());
  EXPECT_TRUE(s.non_increasing());
  EXPECT_FALSE(s.last_drop_time().has_value());
}

TEST(MonitorDifference, HomogeneousSolutionsHaveNoZeros) {
  const CircleGrid g(32);
  Nonlinearity nl{QuasiPeriodicSignal::constant(0.0), QuasiPeriodicSignal::constant(-1.0),
                  QuasiPeriodicSignal::constant(0.0), QuasiPeriodicSignal::from_modes({{1.0, 1.0, 0.0}}),
                  QuasiPeriodicSignal::constant(0.0)};
  const auto hull = make_hull_point(QuasiPeriodicSignal::constant(0.0));
  const auto t1 = evolve(Field::constant(g, 1.0), hull, nl, 5.0, 1e-2, 10);
  const auto t2 = evolve(Field::constant(g, -0.5), hull, nl, 5.0, 1e-2, 10);
  for (const auto& z : monitor_difference(t1, t2).counts) EXPECT_EQ(z.count, 0);
}

TEST(MonitorDifference, RejectsMismatchedTrajectories) {
  const CircleGrid g(32);
  const auto nl = Nonlinearity::appendix();
  const auto hull = make_hull_point(QuasiPeriodicSignal::dyadic());
  const auto u = Field::from_function(g, [](double x) { return std::sin(x); });
  const auto a = evolve(u, hull, nl, 1.0, 1e-2, 10);
  const auto b = evolve(u, hull, nl, 1.0, 5e-3, 20);
  EXPECT_THROW(monitor_difference(a, b), MismatchedTrajectories);
}

}  // namespace
}  // namespace cpl
