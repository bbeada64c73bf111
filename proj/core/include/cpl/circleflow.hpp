#pragma once

#include <iosfwd>
#include <vector>

#include "cpl/forcing.hpp"
#include "cpl/solver.hpp"
#include "cpl/spectral.hpp"

namespace cpl {

struct MaxValue {
  double m;
  double x_max;  // in [0, 2 pi)
};

/// Maximum of the trigonometric interpolant. Throws FlatField when
/// is_homogeneous(u, flat_tol).
MaxValue max_value(const Field& u, double flat_tol = 1e-12, double t = 0.0);

/// Unwrapped phase of a trajectory: the argmax moves as x_max(t) = -c(t) + const.
struct PhaseTrack {
  std::vector<double> times;
  /// continuous phase with c(0) = 0
  std::vector<double> c;
  double L = 0.0;
  /// -x_max at the first sample, so that the raw phase is c + offset (mod L)
  double offset = 0.0;
  std::vector<double> cdot;
  std::vector<double> max_values;
  std::vector<double> phixx_at_max;

  double raw(std::size_t i) const { return c[i] + offset; }
};

/// L <= 0 takes the spatial period of the first sample.
PhaseTrack extract_phase(const Trajectory& traj, double L = 0.0);

/// Centered differences inside, one-sided at the ends.
std::vector<double> differentiate(const std::vector<double>& t, const std::vector<double>& y);

/// G(t, z) = f_p + (u_xxx + f_u u_x) / u_xx at x = -z, with the coefficients of
/// f taken at absolute time `t_abs`. Throws NearSingular if |u_xx| < eps_g;
/// eps_g <= 0 selects 1e-6 sup|u|.
double reduced_rhs(const Field& u, double t_abs, double z, const Nonlinearity& nl, double eps_g = 0.0);

/// Same for sample i of a trajectory.
double reduced_rhs(const Trajectory& traj, std::size_t i, double z, double eps_g = 0.0);

struct ReductionOptions {
  double flag_tol = 1e-3;
  double hull_eps = 0.05;
  /// pairs for the fiber check are drawn from at most this many samples
  int fiber_samples = 200;
  int max_fiber_pairs = 500;
  double eps_g = 0.0;
};

struct ReductionReport {
  std::vector<double> residuals;
  double max_residual = 0.0;
  std::vector<double> flagged_times;
  /// min |u_xx| at the argmax along the track
  double min_phixx = 0.0;
  int fiber_pairs = 0;
  double fiber_max_orbit_distance = 0.0;
  double fiber_median_orbit_distance = 0.0;
};

/// Recomputes cdot from track.c and compares with G(t, raw phase).
ReductionReport verify_reduction(const Trajectory& traj, const PhaseTrack& track,
                                 const ReductionOptions& opts = {});

struct AlmostPeriodReport {
  std::vector<double> taus;
  double max_gap = 0.0;
  double window = 0.0;
};

/// tau = k dt is an eps-almost period if |x(t + tau) - x(t)| <= eps on the
/// common window [0, T - max_period]. Needs max_period < T / 2.
AlmostPeriodReport almost_period_scan(const std::vector<double>& series, double dt, double eps, double max_period);

/// Columns t,c,cdot,m,phixx_at_max.
void write_csv(std::ostream& os, const PhaseTrack& track);

}  // namespace cpl
