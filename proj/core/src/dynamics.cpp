#include "cpl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpl/error.hpp"
#include "cpl/symmetry.hpp"
#include "cpl/zeronum.hpp"

namespace cpl {
namespace {

constexpr std::size_t kMinSnapshots = 100;

// Per-snapshot data for cheap bounds on quotient distances.
class QuotientIndex {
 public:
  explicit QuotientIndex(const OmegaSample& s) : s_(s) {
    sig_.reserve(s.size());
    for (const auto& snap : s.snapshots) {
      sig_.emplace_back(snap.hull, s.hull_metric);
      spec_.push_back(to_spectrum(snap.state));
      rms_.push_back(resolved_rms(snap.state));
    }
  }

  double hull(std::size_t i, std::size_t j) const { return sig_[i].distance(sig_[j]); }

  // Is the orbit part of the distance below eps? `hull_part` is added first.
  bool orbit_within(std::size_t i, std::size_t j, double eps, double hull_part = 0.0) const {
    if (hull_part + std::abs(rms_[i] - rms_[j]) >= eps) return false;
    if (hull_part + l1_gap(i, j) < eps) return true;
    return hull_part + orbit_distance(s_.snapshots[i].state, s_.snapshots[j].state).distance < eps;
  }

  bool within(std::size_t i, std::size_t j, double eps) const {
    const double h = hull(i, j);
    return h < eps && orbit_within(i, j, eps, h);
  }

  double orbit(std::size_t i, std::size_t j) const {
    if (l1_gap(i, j) == 0.0) return 0.0;
    return orbit_distance(s_.snapshots[i].state, s_.snapshots[j].state).distance;
  }

 private:
  // sup bound at zero shift
  double l1_gap(std::size_t i, std::size_t j) const {
    const auto& a = spec_[i];
    const auto& b = spec_[j];
    double s = std::abs(a[0] - b[0]) + std::abs(a.back().real() - b.back().real());
    for (std::size_t k = 1; k + 1 < a.size(); ++k) s += 2.0 * std::abs(a[k] - b[k]);
    return s;
  }

  const OmegaSample& s_;
  std::vector<HullSignature> sig_;
  std::vector<Spectrum> spec_;
  std::vector<double> rms_;
};

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

void annotate(OmegaSnapshot& snap, const OmegaOptions& opts) {
  snap.homogeneous = is_homogeneous(snap.state, opts.homogeneity_tol);
  const Field diff = opts.reference ? snap.state - *opts.reference : snap.state;
  try {
    snap.zcount = zero_number(diff).count;
  } catch (const DegenerateField&) {
    snap.zcount = -1;
  }
}

void finalize(OmegaSample& s, const OmegaOptions& opts) {
  double eps = opts.eps_cluster;
  if (!(eps > 0.0)) {
    std::vector<double> norms;
    for (const auto& snap : s.snapshots) norms.push_back(snap.state.sup_norm());
    eps = norms.empty() ? 0.0 : 1e-3 * median(norms);
  }
  cluster_snapshots(s, eps);
}

}  // namespace

OmegaSample sample_omega(const Field& u0, const HullPoint& g, const Nonlinearity& nl, double horizon, double dt,
                         int stride, const OmegaOptions& opts) {
  if (!(horizon > 0.0) || !(dt > 0.0) || stride < 1) throw std::invalid_argument("sample_omega: bad horizon, dt or stride");
  const double transient = opts.transient < 0.0 ? 0.2 * horizon : opts.transient;
  if (!(transient < horizon)) throw std::invalid_argument("sample_omega: transient must precede the horizon");
  const double steps_d = horizon / dt;
  const auto steps = static_cast<std::int64_t>(std::llround(steps_d));
  if (std::abs(steps_d - static_cast<double>(steps)) > 1e-9 * steps_d)
    throw std::invalid_argument("sample_omega: horizon is not a multiple of dt");

  OmegaSample s;
  s.transient = transient;
  s.horizon = horizon;
  s.spacing = dt * stride;
  SemiflowStepper stepper(u0.grid(), g, nl, dt, opts.solver);
  stepper.reset(u0, 0.0);
  for (std::int64_t k = 1; k <= steps; ++k) {
    stepper.step();
    if (k % stride != 0) continue;
    const double t = stepper.time();
    if (t <= transient) continue;
    OmegaSnapshot snap{t, stepper.state(), g.advanced(t)};
    annotate(snap, opts);
    s.snapshots.push_back(std::move(snap));
  }
  finalize(s, opts);
  return s;
}

OmegaSample omega_from_trajectory(const Trajectory& traj, const OmegaOptions& opts) {
  if (traj.samples.size() < 2) throw InsufficientData("omega_from_trajectory: trajectory too short");
  OmegaSample s;
  s.horizon = traj.samples.back().t;
  s.transient = opts.transient < 0.0 ? 0.2 * s.horizon : opts.transient;
  s.spacing = traj.dt * traj.stride;
  for (const auto& sample : traj.samples) {
    if (sample.t <= s.transient) continue;
    OmegaSnapshot snap{sample.t, sample.state, traj.forcing.advanced(sample.t)};
    annotate(snap, opts);
    s.snapshots.push_back(std::move(snap));
  }
  finalize(s, opts);
  return s;
}

int cluster_snapshots(OmegaSample& s, double eps) {
  s.eps_cluster = eps;
  const QuotientIndex idx(s);
  std::vector<std::size_t> leaders;
  for (std::size_t i = 0; i < s.size(); ++i) {
    int label = -1;
    for (std::size_t c = 0; c < leaders.size() && label < 0; ++c)
      if (idx.within(leaders[c], i, eps)) label = static_cast<int>(c);
    if (label < 0) {
      label = static_cast<int>(leaders.size());
      leaders.push_back(i);
    }
    s.snapshots[i].cluster = label;
  }
  s.cluster_count = static_cast<int>(leaders.size());
  return s.cluster_count;
}

RecurrenceReport recurrence_diagnostic(const OmegaSample& s, double eps) {
  if (s.size() < kMinSnapshots) throw InsufficientData("recurrence_diagnostic: need at least 100 snapshots");
  const QuotientIndex idx(s);
  const std::size_t n = s.size();
  const double t0 = s.snapshots.front().t;
  const double span = s.snapshots.back().t - t0;

  RecurrenceReport r;
  r.eps = eps;
  r.gaps.assign(n, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> found;
  std::vector<std::vector<double>> per_cluster(static_cast<std::size_t>(std::max(s.cluster_count, 0)));
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + 1;
    while (j < n && idx.within(i, j, eps)) ++j;  // leave the ball
    // a state that never leaves is stationary at this resolution: it returns every step
    if (j == n && j > i + 1) {
      r.gaps[i] = s.snapshots[i + 1].t - s.snapshots[i].t;
    } else {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (idx.within(i, k, eps)) {
          r.gaps[i] = s.snapshots[k].t - s.snapshots[i].t;
          break;
        }
      }
    }
    if (std::isnan(r.gaps[i])) {
      if (s.snapshots[i].t - t0 <= 0.5 * span) ++r.unreturned_first_half;
      continue;
    }
    ++r.returned;
    found.push_back(r.gaps[i]);
    const int c = s.snapshots[i].cluster;
    if (c >= 0 && static_cast<std::size_t>(c) < per_cluster.size()) per_cluster[static_cast<std::size_t>(c)].push_back(r.gaps[i]);
  }
  if (!found.empty()) {
    r.min_gap = *std::min_element(found.begin(), found.end());
    r.max_gap = *std::max_element(found.begin(), found.end());
    r.median_gap = median(found);
  }
  for (auto& v : per_cluster) r.cluster_median_gap.push_back(median(v));
  r.minimal_like = r.unreturned_first_half == 0 && r.max_gap <= 0.5 * span;
  return r;
}

FiberReport fiber_multiplicity(const OmegaSample& s, double hull_eps, double orbit_eps) {
  if (s.size() < kMinSnapshots) throw InsufficientData("fiber_multiplicity: need at least 100 snapshots");
  const QuotientIndex idx(s);
  const std::size_t n = s.size();
  if (!(hull_eps > 0.0)) {
    const std::size_t step = std::max<std::size_t>(1, n / 200);
    std::vector<double> d;
    for (std::size_t i = 0; i < n; i += step)
      for (std::size_t j = i + step; j < n; j += step) d.push_back(idx.hull(i, j));
    std::sort(d.begin(), d.end());
    hull_eps = d.empty() ? 0.0 : d[d.size() / 20];
    if (!(hull_eps > 0.0)) hull_eps = std::numeric_limits<double>::min();
  }

  FiberReport rep;
  rep.hull_eps = hull_eps;
  rep.orbit_eps = orbit_eps;
  std::vector<std::size_t> leaders;
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t b = 0; b < leaders.size() && !placed; ++b) {
      if (idx.hull(leaders[b], i) < hull_eps) {
        members[b].push_back(i);
        placed = true;
      }
    }
    if (!placed) {
      leaders.push_back(i);
      members.push_back({i});
    }
  }
  int singletons = 0;
  for (std::size_t b = 0; b < leaders.size(); ++b) {
    std::vector<std::size_t> classes;
    for (std::size_t i : members[b]) {
      bool known = false;
      for (std::size_t c : classes)
        if (idx.orbit_within(c, i, orbit_eps)) {
          known = true;
          break;
        }
      if (!known) classes.push_back(i);
    }
    const int m = static_cast<int>(classes.size());
    rep.bins.push_back({s.snapshots[leaders[b]].hull.offset, static_cast<int>(members[b].size()), m});
    rep.max_multiplicity = std::max(rep.max_multiplicity, m);
    if (m == 1) ++singletons;
  }
  rep.singleton_fraction = rep.bins.empty() ? 0.0 : static_cast<double>(singletons) / static_cast<double>(rep.bins.size());
  return rep;
}

ProximalityReport proximality(const OmegaSample& a, std::size_t i, const OmegaSample& b, std::size_t j, double eps) {
  if (i >= a.size() || j >= b.size()) throw InsufficientData("proximality: snapshot index out of range");
  if (std::abs(a.spacing - b.spacing) > 1e-12 * a.spacing)
    throw std::invalid_argument("proximality: samples use different snapshot spacing");
  const std::size_t steps = std::min(a.size() - i, b.size() - j);
  if (steps < 2) throw InsufficientData("proximality: no forward segment to scan");

  ProximalityReport r;
  r.hull_distance = hull_distance(a.snapshots[i].hull, b.snapshots[j].hull, a.hull_metric);
  if (r.hull_distance > 0.1) r.note = "base points are far apart; scan is not a fiber comparison";
  r.min_distance = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < steps; ++k) {
    const auto& x = a.snapshots[i + k];
    const auto& y = b.snapshots[j + k];
    const double h = k == 0 ? r.hull_distance : hull_distance(x.hull, y.hull, a.hull_metric);
    const double d = h >= r.min_distance ? h : h + orbit_distance(x.state, y.state).distance;
    if (d < r.min_distance) {
      r.min_distance = d;
      r.at = static_cast<double>(k) * a.spacing;
    }
    if (d < eps) {
      r.forward_proximal = true;
      break;
    }
  }
  if (r.note.empty()) r.note = "forward scan only; backward proximality is not assessed";
  return r;
}

ProximalityReport proximality(const OmegaSample& s, std::size_t i, std::size_t j, double eps) {
  return proximality(s, i, s, j, eps);
}

std::string to_string(Homogeneity h) {
  switch (h) {
    case Homogeneity::kHomogeneous: return "HOMOGENEOUS";
    case Homogeneity::kInhomogeneous: return "INHOMOGENEOUS";
    case Homogeneity::kMixed: return "MIXED";
  }
  return "?";
}

Homogeneity classify_homogeneity(const OmegaSample& s, double tol) {
  if (s.snapshots.empty()) throw InsufficientData("classify_homogeneity: empty sample");
  bool hom = false, inhom = false;
  for (const auto& snap : s.snapshots) (is_homogeneous(snap.state, tol) ? hom : inhom) = true;
  if (hom && inhom) return Homogeneity::kMixed;
  return hom ? Homogeneity::kHomogeneous : Homogeneity::kInhomogeneous;
}

}  // namespace cpl
