#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cpl/circleflow.hpp"
#include "cpl/error.hpp"
#include "cpl/symmetry.hpp"

namespace cpl {
namespace {

constexpr double kPi = std::numbers::pi;
const QuasiPeriodicSignal kZero = QuasiPeriodicSignal::constant(0.0);

double circle_gap(double a, double b, double period = 2 * kPi) {
  double d = std::fmod(a - b, period);
  if (d < 0) d += period;
  return std::min(d, period - d);
}

const Trajectory& appendix_trajectory() {
  static const Trajectory traj = [] {
    const CircleGrid g(64);
    SolverOptions opts;
    opts.zero_mean = true;
    return evolve(Field::from_function(g, [](double x) { return std::sin(x); }),
                  make_hull_point(QuasiPeriodicSignal::dyadic()), Nonlinearity::appendix(), 20.0, 1e-3, 1, opts);
  }();
  return traj;
}

Trajectory synthetic_rotation(const Field& w, double omega, double dt, int steps, const Nonlinearity& nl) {
  Trajectory traj{make_hull_point(kZero), nl, dt, 1, {}, 4, {}};
  for (int i = 0; i <= steps; ++i) traj.samples.push_back({i * dt, shift(w, omega * i * dt)});
  return traj;
}

TEST(MaxValue, Examples) {
  const CircleGrid g(64);
  auto mv = max_value(Field::from_function(g, [](double x) { return std::sin(x); }));
  EXPECT_NEAR(mv.m, 1.0, 1e-12);
  EXPECT_NEAR(mv.x_max, kPi / 2, 1e-6);
  mv = max_value(Field::from_function(g, [](double x) { return std::cos(x); }));
  EXPECT_NEAR(mv.m, 1.0, 1e-12);
  EXPECT_LT(circle_gap(mv.x_max, 0.0), 1e-6);
  mv = max_value(Field::from_function(g, [](double x) { return 2.0 + 0.5 * std::cos(x - 1.0); }));
  EXPECT_NEAR(mv.m, 2.5, 1e-12);
  EXPECT_NEAR(mv.x_max, 1.0, 1e-6);
}

TEST(MaxValue, FlatFieldThrows) {
  EXPECT_THROW(max_value(Field::constant(CircleGrid(32), 3.0)), FlatField);
}

TEST(ExtractPhase, AppendixPhaseIsTime) {
  const auto& traj = appendix_trajectory();
  const auto track = extract_phase(traj);
  EXPECT_DOUBLE_EQ(track.L, 2 * kPi);
  double worst = 0.0;
  for (std::size_t i = 0; i < track.times.size(); ++i) worst = std::max(worst, circle_gap(track.c[i], track.times[i]));
  EXPECT_LE(worst, 1e-3);
  EXPECT_NEAR(track.c.back(), 20.0, 1e-3);
}

TEST(ExtractPhase, EquilibriumHasConstantPhase) {
  // u_xx + u = 0 for u = sin x
  const CircleGrid g(32);
  const Nonlinearity nl{kZero, QuasiPeriodicSignal::constant(1.0), kZero, kZero, kZero};
  SolverOptions opts;
  opts.zero_mean = true;
  const auto traj = evolve(Field::from_function(g, [](double x) { return std::sin(x); }), make_hull_point(kZero), nl, 5.0,
                           1e-2, 10, opts);
  const auto track = extract_phase(traj);
  for (double c : track.c) EXPECT_NEAR(c, 0.0, 1e-9);
}

TEST(ExtractPhase, SyntheticRotation) {
  const CircleGrid g(64);
  const auto w = Field::from_function(g, [](double x) { return std::exp(std::cos(x)) + 0.2 * std::sin(2 * x); });
  const double omega = 0.7;
  const auto track = extract_phase(synthetic_rotation(w, omega, 0.05, 400, Nonlinearity::burgers(0.0)));
  for (std::size_t i = 0; i < track.times.size(); ++i) EXPECT_NEAR(track.c[i], omega * track.times[i], 1e-9);
}

TEST(ExtractPhase, ShiftChangesRawPhaseByConstant) {
  const auto& traj = appendix_trajectory();
  Trajectory shifted = traj;
  shifted.samples.erase(shifted.samples.begin() + 2001, shifted.samples.end());
  const double a = 0.4;
  for (auto& s : shifted.samples) s.state = shift(s.state, a);
  Trajectory head = traj;
  head.samples.erase(head.samples.begin() + 2001, head.samples.end());
  const auto p = extract_phase(head), q = extract_phase(shifted);
  for (std::size_t i = 0; i < p.times.size(); i += 100) {
    EXPECT_NEAR(q.c[i], p.c[i], 1e-9);
    EXPECT_LT(circle_gap(q.raw(i) - p.raw(i), a), 1e-9);
  }
}

TEST(ExtractPhase, JumpsRaiseUnwrapFailure) {
  const CircleGrid g(64);
  const auto w = Field::from_function(g, [](double x) { return std::cos(x); });
  EXPECT_THROW(extract_phase(synthetic_rotation(w, 2.0, 1.0, 5, Nonlinearity::burgers(0.0))), UnwrapFailure);
}

TEST(ExtractPhase, HomogeneousSampleRaisesFlatField) {
  const CircleGrid g(32);
  Trajectory traj{make_hull_point(kZero), Nonlinearity::burgers(0.0), 1.0, 1, {}, 4, {}};
  traj.samples.push_back({0.0, Field::from_function(g, [](double x) { return std::cos(x); })});
  traj.samples.push_back({1.0, Field::constant(g, 1.0)});
  try {
    extract_phase(traj, 2 * kPi);
    FAIL() << "expected FlatField";
  } catch (const FlatField& e) {
    EXPECT_EQ(e.time(), 1.0);
  }
}

TEST(ReducedRhs, AppendixIsOne) {
  const auto& traj = appendix_trajectory();
  const auto track = extract_phase(traj);
  for (std::size_t i = 0; i < traj.samples.size(); i += 997) EXPECT_NEAR(reduced_rhs(traj, i, track.raw(i)), 1.0, 1e-8);
}

TEST(ReducedRhs, PeriodicInZ) {
  const CircleGrid g(64);
  const auto u = Field::from_function(g, [](double x) { return std::sin(x) + 0.4 * std::cos(2 * x + 0.3); });
  const auto nl = Nonlinearity::burgers(0.3);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(0.0, 2 * kPi);
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const double z = U(rng);
    try {
      const double a = reduced_rhs(u, 1.0, z, nl, 1e-3);
      const double b = reduced_rhs(u, 1.0, z + 2 * kPi, nl, 1e-3);
      EXPECT_NEAR(a, b, 1e-9 * std::max(1.0, std::abs(a)));
      ++checked;
    } catch (const NearSingular&) {
    }
  }
  EXPECT_GT(checked, 150);
}

TEST(ReducedRhs, HomogeneousFieldIsNearSingular) {
  EXPECT_THROW(reduced_rhs(Field::constant(CircleGrid(32), 2.0), 0.0, 0.3, Nonlinearity::appendix()), NearSingular);
}

TEST(VerifyReduction, AppendixResidualIsSmall) {
  const auto& traj = appendix_trajectory();
  const auto track = extract_phase(traj);
  const auto rep = verify_reduction(traj, track);
  EXPECT_LE(rep.max_residual, 1e-3);
  EXPECT_TRUE(rep.flagged_times.empty());
  EXPECT_GT(rep.min_phixx, 0.0);
}

TEST(VerifyReduction, SyntheticRotationAtFloor) {
  // single-mode profile: u_xxx vanishes at the argmax, so G = A = omega
  const CircleGrid g(32);
  const double omega = 0.7;
  const Nonlinearity nl{QuasiPeriodicSignal::constant(omega), kZero, kZero, kZero, kZero};
  const auto traj = synthetic_rotation(Field::from_function(g, [](double x) { return 1.5 * std::cos(x); }), omega, 0.01, 500, nl);
  const auto rep = verify_reduction(traj, extract_phase(traj));
  EXPECT_LT(rep.max_residual, 1e-8);
  EXPECT_GT(rep.fiber_pairs, 0);
  EXPECT_LT(rep.fiber_max_orbit_distance, 1e-9);
}

TEST(VerifyReduction, CorruptedSampleIsFlagged) {
  const CircleGrid g(32);
  const double omega = 0.7;
  const Nonlinearity nl{QuasiPeriodicSignal::constant(omega), kZero, kZero, kZero, kZero};
  const auto traj = synthetic_rotation(Field::from_function(g, [](double x) { return std::cos(x); }), omega, 0.01, 200, nl);
  auto track = extract_phase(traj);
  const std::size_t bad = 100;
  track.c[bad] += 0.1;
  const auto rep = verify_reduction(traj, track);
  ASSERT_FALSE(rep.flagged_times.empty());
  for (double t : rep.flagged_times) EXPECT_LE(std::abs(t - track.times[bad]), 0.01 + 1e-12);
}

TEST(AlmostPeriodScan, SineHasPeriodsNearTwoPi) {
  const double dt = 0.01;
  std::vector<double> x;
  for (int i = 0; i < 20000; ++i) x.push_back(std::sin(i * dt));
  const auto rep = almost_period_scan(x, dt, 0.1, 30.0);
  ASSERT_FALSE(rep.taus.empty());
  for (double tau : rep.taus) EXPECT_LE(circle_gap(tau, 0.0), 0.1 + dt);
  EXPECT_NEAR(rep.max_gap, 2 * kPi - 0.2, 0.05);
}

TEST(AlmostPeriodScan, QuasiPeriodicHasBoundedGaps) {
  const double dt = 0.05, eps = 0.2, max_period = 300.0;
  auto f = [](double t) { return std::sin(t) + std::sin(std::sqrt(2.0) * t); };
  std::vector<double> x;
  for (int i = 0; i < 12400; ++i) x.push_back(f(i * dt));
  const auto rep = almost_period_scan(x, dt, eps, max_period);
  // beyond tau = dt the first near-return of both phases sits near 75.4
  ASSERT_GT(rep.taus.size(), 2u);
  EXPECT_GT(rep.taus[1], 70.0);
  EXPECT_LT(rep.max_gap, max_period / 2);
  // direct re-check of every accepted shift on the analytic function
  for (double tau : rep.taus) {
    double worst = 0.0;
    for (double t = 0.0; t <= rep.window + 1e-9; t += dt) worst = std::max(worst, std::abs(f(t + tau) - f(t)));
    EXPECT_LE(worst, eps + 1e-9) << tau;
  }
}

TEST(AlmostPeriodScan, AppendixPhaseRateAcceptsEverything) {
  const auto track = extract_phase(appendix_trajectory());
  const auto rep = almost_period_scan(track.cdot, 1e-3, 1e-3, 5.0);
  EXPECT_EQ(rep.taus.size(), 5000u);
  EXPECT_NEAR(rep.max_gap, 1e-3, 1e-12);
}

TEST(AlmostPeriodScan, ShortSeriesIsInsufficient) {
  EXPECT_THROW(almost_period_scan(std::vector<double>(10, 0.0), 1.0, 0.1, 5.0), InsufficientData);
}

TEST(PhaseTrack, CsvHeader) {
  PhaseTrack t;
  t.times = {0.0};
  t.c = {0.0};
  t.cdot = {1.0};
  t.max_values = {1.0};
  t.phixx_at_max = {-1.0};
  std::ostringstream os;
  write_csv(os, t);
  EXPECT_EQ(os.str(), "t,c,cdot,m,phixx_at_max\n0,0,1,1,-1\n");
}

}  // namespace
}  // namespace cpl
