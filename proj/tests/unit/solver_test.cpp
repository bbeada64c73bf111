#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "cpl/error.hpp"
#include "cpl/solver.hpp"

namespace cpl {
namespace {

Field appendix_solution(const CircleGrid& g, double t) {
  const double amp = std::exp(oracle::dyadic_integral_direct(t));
  return Field::from_function(g, [&](double x) { return amp * std::sin(x + t); });
}

HullPoint appendix_hull() { return make_hull_point(QuasiPeriodicSignal::dyadic()); }

Field rotate(const Field& u, int j) {
  Field out = u;
  auto v = out.values();
  std::rotate(v.begin(), v.begin() + j, v.end());
  return out;
}

Field random_field(const CircleGrid& g, std::mt19937_64& rng, int modes, double scale) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(modes) + 1), b(static_cast<std::size_t>(modes) + 1);
  for (int k = 0; k <= modes; ++k) a[static_cast<std::size_t>(k)] = N(rng) / (1 + k), b[static_cast<std::size_t>(k)] = N(rng) / (1 + k);
  return Field::from_function(g, [&](double x) {
    double s = 0;
    for (int k = 0; k <= modes; ++k) s += a[static_cast<std::size_t>(k)] * std::cos(k * x) + b[static_cast<std::size_t>(k)] * std::sin(k * x);
    return scale * s;
  });
}

TEST(EtdCoefficients, ZeroModeLimits) {
  // For L = 0 the phi-functions reduce to h/2, h/6, h/6, h/6.
  EtdCoefficients c(4, 0.1);
  EXPECT_NEAR(c.q[0], 0.05, 1e-15);
  EXPECT_NEAR(c.f1[0], 0.1 / 6, 1e-15);
  EXPECT_NEAR(c.f2[0], 0.1 / 6, 1e-15);
  EXPECT_NEAR(c.f3[0], 0.1 / 6, 1e-15);
  EXPECT_DOUBLE_EQ(c.e[2], std::exp(-0.4));
}

TEST(Evolve, AppendixGoldenSolution) {
  CircleGrid g(64);
  auto u0 = Field::from_function(g, [](double x) { return std::sin(x); });
  auto traj = evolve(u0, appendix_hull(), Nonlinearity::appendix(), 10.0, 1e-3, 1000);
  ASSERT_NEAR(traj.samples.back().t, 10.0, 1e-12);
  for (const auto& s : traj.samples) {
    const Field exact = appendix_solution(g, s.t);
    EXPECT_LE((s.state - exact).sup_norm() / exact.sup_norm(), 1e-6) << "t=" << s.t;
  }
}

TEST(Evolve, ZeroStaysZero) {
  CircleGrid g(32);
  Nonlinearity nl = Nonlinearity::burgers(0.5);
  nl.C = QuasiPeriodicSignal::constant(-1.0);
  auto traj = evolve(Field(g), appendix_hull(), nl, 1.0, 1e-2);
  for (const auto& s : traj.samples) EXPECT_EQ(s.state.sup_norm(), 0.0);
}

TEST(Evolve, HomogeneousMatchesScalarOde) {
  CircleGrid g(32);
  Nonlinearity nl;
  nl.B = QuasiPeriodicSignal::from_modes({{0.3, 1.0, 0.0}}, -0.5);
  nl.C = QuasiPeriodicSignal::constant(-0.2);
  nl.D = QuasiPeriodicSignal::from_modes({{0.1, std::sqrt(2.0), 0.4}});
  const double c0 = 0.8, t_end = 5.0;
  auto traj = evolve(Field::constant(g, c0), HullPoint{}, nl, t_end, 1e-3, 5000);
  const double expect = oracle::rk4_scalar(
      [&](double t, double y) { return nl.B(t) * y + nl.C(t) * y * y * y + nl.D(t); }, c0, 0.0, t_end, 50000);
  const Field& last = traj.samples.back().state;
  EXPECT_LE(last.max() - last.min(), 1e-12);
  EXPECT_NEAR(last.mean(), expect, 1e-7);
}

TEST(Evolve, RespectsHullOffset) {
  // Starting from g = f . tau is the same as translating the nonlinearity.
  CircleGrid g(32);
  auto u0 = Field::from_function(g, [](double x) { return std::sin(x); });
  auto a = evolve(u0, appendix_hull().advanced(3.5), Nonlinearity::appendix(), 1.0, 1e-2);
  auto b = evolve(u0, appendix_hull(), Nonlinearity::appendix().translated(3.5), 1.0, 1e-2);
  EXPECT_LE((a.samples.back().state - b.samples.back().state).sup_norm(), 1e-12);
}

TEST(Evolve, TimeConvergenceIsFourthOrder) {
  CircleGrid g(32);
  auto u0 = Field::from_function(g, [](double x) { return std::sin(x); });
  const double t_end = 10.0;
  const Field exact = appendix_solution(g, t_end);
  double prev = 0;
  for (double dt : {0.2, 0.1, 0.05}) {
    auto traj = evolve(u0, appendix_hull(), Nonlinearity::appendix(), t_end, dt, 1000);
    const double err = (traj.samples.back().state - exact).sup_norm();
    if (prev > 0) EXPECT_GE(prev / err, 8.0) << "dt=" << dt;
    prev = err;
  }
}

TEST(Evolve, GridShiftEquivariance) {
  CircleGrid g(64);
  std::mt19937_64 rng(21);
  auto u0 = random_field(g, rng, 5, 1.0);
  Nonlinearity nl = Nonlinearity::burgers(0.1);
  nl.C = QuasiPeriodicSignal::constant(-0.3);
  const auto base = evolve(u0, appendix_hull(), nl, 2.0, 1e-3, 2000).samples.back().state;
  for (int j : {1, 5, 17, 32}) {
    auto shifted = evolve(rotate(u0, j), appendix_hull(), nl, 2.0, 1e-3, 2000).samples.back().state;
    EXPECT_LE((shifted - rotate(base, j)).sup_norm(), 1e-8) << "shift " << j;
  }
}

TEST(Evolve, Deterministic) {
  CircleGrid g(32);
  std::mt19937_64 rng(2);
  auto u0 = random_field(g, rng, 4, 1.0);
  auto a = evolve(u0, appendix_hull(), Nonlinearity::burgers(0.1), 1.0, 1e-2, 10);
  auto b = evolve(u0, appendix_hull(), Nonlinearity::burgers(0.1), 1.0, 1e-2, 10);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_TRUE(a.samples[i].state == b.samples[i].state);
}

TEST(Evolve, SampleTimesAreStepMultiples) {
  CircleGrid g(16);
  auto traj = evolve(Field::constant(g, 1.0), HullPoint{}, Nonlinearity{}, 1.05, 0.05, 4);
  ASSERT_GE(traj.samples.size(), 2u);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const double gap = (traj.samples[i].t - traj.samples[i - 1].t) / 0.05;
    EXPECT_GT(gap, 0.5);
    EXPECT_NEAR(gap, std::round(gap), 1e-9);
  }
  EXPECT_NEAR(traj.samples.back().t, 1.05, 1e-12);
}

TEST(Evolve, DetectsBlowup) {
  CircleGrid g(16);
  Nonlinearity nl;
  nl.C = QuasiPeriodicSignal::constant(1.0);
  // u' = u^3 from u = 3 blows up at t = 1/18
  EXPECT_THROW(evolve(Field::constant(g, 3.0), HullPoint{}, nl, 0.1, 1e-4), Blowup);
}

TEST(Evolve, RejectsIncommensurateEnd) {
  CircleGrid g(16);
  EXPECT_THROW(evolve(Field(g), HullPoint{}, Nonlinearity{}, 1.0, 0.3), std::invalid_argument);
}

TEST(EvolveLinearized, AppendixAboutZero) {
  CircleGrid g(64);
  auto base = evolve(Field(g), appendix_hull(), Nonlinearity::appendix(), 5.0, 1e-3);
  auto psi = evolve_linearized(base, Field::from_function(g, [](double x) { return std::sin(x); }));
  for (std::size_t i = 0; i < psi.samples.size(); i += 1000) {
    const Field exact = appendix_solution(g, psi.samples[i].t);
    EXPECT_LE((psi.samples[i].state - exact).sup_norm() / exact.sup_norm(), 1e-6);
  }
}

TEST(EvolveLinearized, ConstantCoefficients) {
  CircleGrid g(32);
  const double c0 = 0.7;
  Nonlinearity nl;
  nl.B = QuasiPeriodicSignal::constant(c0);
  auto base = evolve(Field(g), HullPoint{}, nl, 1.0, 1e-3);
  for (int n : {1, 2, 4}) {
    auto psi = evolve_linearized(base, Field::from_function(g, [n](double x) { return std::sin(n * x); }));
    const double amp = std::exp((c0 - n * n) * 1.0);
    const Field exact = Field::from_function(g, [&](double x) { return amp * std::sin(n * x); });
    EXPECT_LE((psi.samples.back().state - exact).sup_norm() / amp, 1e-8) << "n=" << n;
  }
}

TEST(EvolveLinearized, MatchesNonlinearFiniteDifference) {
  CircleGrid g(32);
  std::mt19937_64 rng(8);
  Nonlinearity nl = Nonlinearity::burgers(0.2);
  nl.C = QuasiPeriodicSignal::constant(-0.5);
  nl.D = QuasiPeriodicSignal::from_modes({{0.3, 1.0, 0.0}});
  auto h = appendix_hull();
  const auto u0 = random_field(g, rng, 3, 1.0);
  const auto psi0 = random_field(g, rng, 3, 1.0);
  const double eps = 1e-6;
  auto base = evolve(u0, h, nl, 1.0, 1e-3);
  auto pert = evolve(u0 + eps * psi0, h, nl, 1.0, 1e-3);
  auto psi = evolve_linearized(base, psi0);
  const Field fd = (pert.samples.back().state - base.samples.back().state) * (1.0 / eps);
  const Field& lin = psi.samples.back().state;
  EXPECT_LE((fd - lin).sup_norm() / lin.sup_norm(), 1e-4);
}

TEST(EvolveLinearized, IsLinear) {
  CircleGrid g(32);
  std::mt19937_64 rng(9);
  Nonlinearity nl = Nonlinearity::burgers(0.1);
  auto base = evolve(random_field(g, rng, 3, 1.0), HullPoint{}, nl, 0.5, 1e-3);
  const auto p0 = random_field(g, rng, 4, 1.0), p1 = random_field(g, rng, 4, 1.0);
  const double alpha = 1.7, beta = -0.6;
  const Field r0 = evolve_linearized(base, p0).samples.back().state;
  const Field r1 = evolve_linearized(base, p1).samples.back().state;
  const Field rc = evolve_linearized(base, alpha * p0 + beta * p1).samples.back().state;
  const Field combo = alpha * r0 + beta * r1;
  EXPECT_LE((rc - combo).sup_norm() / combo.sup_norm(), 1e-10);
}

TEST(EvolveLinearized, RequiresStrideOne) {
  CircleGrid g(16);
  auto base = evolve(Field(g), HullPoint{}, Nonlinearity{}, 0.1, 0.01, 2);
  EXPECT_THROW(evolve_linearized(base, Field(g)), std::invalid_argument);
}

}  // namespace
}  // namespace cpl
