#pragma once

#include <vector>

#include "cpl/forcing.hpp"
#include "cpl/spectral.hpp"

namespace cpl {

/// (shift(u, a))(x) = u(x + a). Grid-aligned shifts are exact rotations;
/// other shifts go through the Fourier coefficients.
Field shift(const Field& u, double a);

/// Sup norm of the trigonometric interpolant (not just the nodes). Invariant
/// under every shift, which the orbit metric relies on.
double interpolant_sup(const Field& u);

struct OrbitDistanceResult {
  /// min over a of sup_x |u(x) - v(x + a)| on the interpolants
  double distance = 0.0;
  /// minimizer in [0, 2 pi)
  double best_shift = 0.0;
  /// min over grid shifts of the node sup norm: the distance between the
  /// two discrete orbits {rotations of u} and {rotations of v}
  double grid_distance = 0.0;
  int grid_shift = 0;
};

OrbitDistanceResult orbit_distance(const Field& u, const Field& v);

/// Directed Hausdorff distance between the rotation orbits of u and v, by
/// comparing every pair of orbit points. O(n^3); meant for checking.
double directed_orbit_hausdorff(const Field& u, const Field& v);

/// Shift-invariant lower bound for orbit distances: | |u|_rms - |v|_rms |
/// over the resolved modes.
double resolved_rms(const Field& u);

double quotient_distance(const Field& u, const HullPoint& g1, const Field& v, const HullPoint& g2,
                         const HullMetricOptions& opts = {});

struct PeriodReport {
  double L = 0.0;
  bool homogeneous = false;
  std::vector<int> active_modes;
};

PeriodReport spatial_period(const Field& u, double amp_tol = 1e-8);

bool is_homogeneous(const Field& u, double tol);

}  // namespace cpl
