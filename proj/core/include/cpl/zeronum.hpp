#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "cpl/solver.hpp"
#include "cpl/spectral.hpp"

namespace cpl {

struct ZeroCount {
  int count = 0;
  bool all_simple = true;
  /// smallest interpolated |u_x| over detected crossings (+inf if none)
  double min_crossing_slope = 0.0;
  bool ambiguous = false;
  /// crossing locations in [0, 2 pi)
  std::vector<double> crossings;
};

/// Relative default: 1e-9 sup|u|.
double default_zero_tol(const Field& u);

/// Sign changes of the interpolant around the circle. Nodes with |u| < tol
/// are refined 8x per level up to depth 4. Throws DegenerateField when
/// sup|u| < tol.
ZeroCount zero_number(const Field& u, double tol);
ZeroCount zero_number(const Field& u);

struct SimpleZeroCertificate {
  bool simple = false;
  double min_slope = 0.0;
  /// perturbations with sup norm below delta keep the count
  double delta = 0.0;
};

SimpleZeroCertificate simple_zero_certificate(const Field& u, double tol);
SimpleZeroCertificate simple_zero_certificate(const Field& u);

struct ZeroEvent {
  double t;
  int from;
  int to;
};

struct ZeroSeries {
  std::vector<double> times;
  std::vector<ZeroCount> counts;
  std::vector<ZeroEvent> drop_events;
  /// increases between consecutive non-ambiguous samples
  std::vector<ZeroEvent> violations;

  bool non_increasing() const { return violations.empty(); }
  /// empirical time after which the count stayed constant
  std::optional<double> last_drop_time() const;
};

/// z(u1(t) - u2(t)) along two trajectories sharing grid, forcing and sample
/// times. `rel_tol` scales with the sup norm of each difference. Samples where
/// the difference vanishes, or falls below 1e-10 of the larger state sup norm,
/// are recorded as ambiguous with count -1.
ZeroSeries monitor_difference(const Trajectory& a, const Trajectory& b, double rel_tol = 1e-9);

/// Columns t,count,all_simple,ambiguous.
void write_csv(std::ostream& os, const ZeroSeries& s);

}  // namespace cpl
