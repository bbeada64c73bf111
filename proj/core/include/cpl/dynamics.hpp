#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpl/forcing.hpp"
#include "cpl/solver.hpp"
#include "cpl/spectral.hpp"

namespace cpl {

struct OmegaSnapshot {
  double t;
  Field state;
  HullPoint hull;
  bool homogeneous = false;
  /// z(state - reference); -1 when the difference is degenerate
  int zcount = -1;
  int cluster = -1;
};

struct OmegaOptions {
  /// < 0 selects 20% of the horizon
  double transient = -1.0;
  /// <= 0 selects 1e-3 times the median snapshot sup norm
  double eps_cluster = 0.0;
  double homogeneity_tol = 1e-6;
  /// reference profile for the zero counts; zero when unset
  std::optional<Field> reference;
  SolverOptions solver;
};

/// Finite-horizon surrogate of an omega-limit set: post-transient snapshots of
/// one solution, clustered by quotient distance.
struct OmegaSample {
  double transient = 0.0;
  double horizon = 0.0;
  double spacing = 0.0;  // time between snapshots
  double eps_cluster = 0.0;
  HullMetricOptions hull_metric;
  std::vector<OmegaSnapshot> snapshots;
  int cluster_count = 0;

  std::size_t size() const noexcept { return snapshots.size(); }
};

OmegaSample sample_omega(const Field& u0, const HullPoint& g, const Nonlinearity& nl, double horizon, double dt,
                         int stride, const OmegaOptions& opts = {});

/// Builds a sample from the stored states of an existing trajectory.
OmegaSample omega_from_trajectory(const Trajectory& traj, const OmegaOptions& opts = {});

/// Leader clustering in snapshot order with threshold eps (quotient distance).
/// Returns the number of clusters.
int cluster_snapshots(OmegaSample& s, double eps);

struct RecurrenceReport {
  double eps = 0.0;
  /// first return gap per snapshot (after leaving the eps-ball); NaN if none
  std::vector<double> gaps;
  int returned = 0;
  int unreturned_first_half = 0;
  double min_gap = 0.0;
  double median_gap = 0.0;
  double max_gap = 0.0;
  /// per cluster: median return gap
  std::vector<double> cluster_median_gap;
  bool minimal_like = false;
};

/// Forward eps-return statistics in quotient distance. Needs >= 100 snapshots.
RecurrenceReport recurrence_diagnostic(const OmegaSample& s, double eps);

struct FiberBin {
  double tau;  // hull offset of the bin leader
  int members;
  int multiplicity;
};

struct FiberReport {
  std::vector<FiberBin> bins;
  int max_multiplicity = 0;
  double singleton_fraction = 0.0;
  double hull_eps = 0.0;
  double orbit_eps = 0.0;
};

/// Bins snapshots whose hull points lie within hull_eps and counts distinct
/// orbit classes per bin at resolution orbit_eps. hull_eps <= 0 uses the 5%
/// quantile of pairwise hull distances.
FiberReport fiber_multiplicity(const OmegaSample& s, double hull_eps, double orbit_eps);

struct ProximalityReport {
  bool forward_proximal = false;
  double min_distance = 0.0;
  /// elapsed time at which min_distance was attained
  double at = 0.0;
  double hull_distance = 0.0;
  std::string note;
};

/// Walks both orbit segments forward in lockstep looking for quotient distance < eps.
ProximalityReport proximality(const OmegaSample& s, std::size_t i, std::size_t j, double eps);
/// Same, with the second segment taken from another sample over the same base.
ProximalityReport proximality(const OmegaSample& a, std::size_t i, const OmegaSample& b, std::size_t j, double eps);

enum class Homogeneity { kHomogeneous, kInhomogeneous, kMixed };

std::string to_string(Homogeneity h);

/// MIXED iff both homogeneous and inhomogeneous snapshots occur at tolerance tol.
Homogeneity classify_homogeneity(const OmegaSample& s, double tol);

}  // namespace cpl
