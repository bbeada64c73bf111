#include "cpl/circleflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "cpl/error.hpp"
#include "cpl/symmetry.hpp"

namespace cpl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0) r += period;
  return r;
}

}  // namespace

MaxValue max_value(const Field& u, double flat_tol, double t) {
  if (!u.all_finite()) throw NonFinite(t);
  if (is_homogeneous(u, flat_tol)) throw FlatField(t);
  const TrigInterpolant p(u);
  const int n = u.size();
  const double h = u.grid().spacing();

  const int i = static_cast<int>(std::max_element(u.values().begin(), u.values().end()) - u.values().begin());
  const double l = u[(i + n - 1) % n], c = u[i], r = u[(i + 1) % n];
  const double curv = l - 2.0 * c + r;
  const double vertex = curv < 0.0 ? 0.5 * (l - r) / curv : 0.0;
  Extremum best = refine_max(p, (i + std::clamp(vertex, -1.0, 1.0)) * h, h);

  // a different peak may rise above the nodes' best
  const Extremum global = interpolant_max(p);
  if (global.value > best.value) best = global;
  return {best.value, wrap(best.x, kTwoPi)};
}

std::vector<double> differentiate(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (y[1] - y[0]) / (t[1] - t[0]);
  d[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // second-order on non-uniform spacing
    const double h0 = t[i] - t[i - 1], h1 = t[i + 1] - t[i];
    d[i] = (h0 * h0 * (y[i + 1] - y[i]) + h1 * h1 * (y[i] - y[i - 1])) / (h0 * h1 * (h0 + h1));
  }
  return d;
}

PhaseTrack extract_phase(const Trajectory& traj, double L) {
  if (traj.samples.empty()) throw InsufficientData("extract_phase: empty trajectory");
  PhaseTrack track;
  track.L = L > 0.0 ? L : spatial_period(traj.samples.front().state).L;
  const double Lq = track.L;
  double prev_raw = 0.0;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    const MaxValue mv = max_value(s.state, 1e-12, s.t);
    const double raw = wrap(-mv.x_max, Lq);
    if (i == 0) {
      track.offset = raw;
      track.c.push_back(0.0);
    } else {
      double delta = wrap(raw - prev_raw, Lq);
      if (delta > 0.5 * Lq) delta -= Lq;
      if (std::abs(delta) >= 0.25 * Lq) throw UnwrapFailure(s.t);
      track.c.push_back(track.c.back() + delta);
    }
    prev_raw = raw;
    track.times.push_back(s.t);
    track.max_values.push_back(mv.m);
    track.phixx_at_max.push_back(TrigInterpolant(s.state)(mv.x_max, 2));
  }
  track.cdot = differentiate(track.times, track.c);
  return track;
}

double reduced_rhs(const Field& u, double t_abs, double z, const Nonlinearity& nl, double eps_g) {
  if (!(eps_g > 0.0)) eps_g = 1e-6 * u.sup_norm();
  const TrigInterpolant p(u);
  const double x = -z;
  const double uxx = p(x, 2);
  if (!(std::abs(uxx) >= eps_g) || uxx == 0.0) throw NearSingular("reduced_rhs: |u_xx| below the guard at the argmax");
  const NlValue v = nl(t_abs, p(x), p(x, 1));
  return v.f_p + (p(x, 3) + v.f_u * p(x, 1)) / uxx;
}

double reduced_rhs(const Trajectory& traj, std::size_t i, double z, double eps_g) {
  const auto& s = traj.samples.at(i);
  return reduced_rhs(s.state, traj.forcing.offset + s.t, z, traj.nonlinearity, eps_g);
}

ReductionReport verify_reduction(const Trajectory& traj, const PhaseTrack& track, const ReductionOptions& opts) {
  const std::size_t n = traj.samples.size();
  if (track.times.size() != n || track.c.size() != n) throw MismatchedTrajectories("verify_reduction: track does not match trajectory");
  ReductionReport rep;
  const auto cdot = differentiate(track.times, track.c);
  rep.min_phixx = std::numeric_limits<double>::infinity();
  rep.residuals.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = track.raw(i);
    const double g = reduced_rhs(traj, i, z, opts.eps_g);
    rep.min_phixx = std::min(rep.min_phixx, std::abs(TrigInterpolant(traj.samples[i].state)(-z, 2)));
    // interior samples only; the one-sided ends are first order
    if (i == 0 || i + 1 == n) continue;
    rep.residuals[i] = std::abs(cdot[i] - g);
    rep.max_residual = std::max(rep.max_residual, rep.residuals[i]);
    if (rep.residuals[i] > opts.flag_tol) rep.flagged_times.push_back(track.times[i]);
  }

  // fiber consistency: states over nearby base points should share a class
  const std::size_t step = std::max<std::size_t>(1, n / static_cast<std::size_t>(std::max(opts.fiber_samples, 1)));
  std::vector<std::size_t> idx;
  std::vector<HullSignature> sig;
  for (std::size_t i = 0; i < n; i += step) {
    idx.push_back(i);
    sig.emplace_back(traj.forcing.advanced(traj.samples[i].t));
  }
  std::vector<double> d;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size() && static_cast<int>(d.size()) < opts.max_fiber_pairs; ++b)
      if (sig[a].distance(sig[b]) < opts.hull_eps)
        d.push_back(orbit_distance(traj.samples[idx[a]].state, traj.samples[idx[b]].state).distance);
  rep.fiber_pairs = static_cast<int>(d.size());
  if (!d.empty()) {
    rep.fiber_max_orbit_distance = *std::max_element(d.begin(), d.end());
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    rep.fiber_median_orbit_distance = d[d.size() / 2];
  }
  return rep;
}

AlmostPeriodReport almost_period_scan(const std::vector<double>& x, double dt, double eps, double max_period) {
  if (!(dt > 0.0) || !(eps >= 0.0) || !(max_period > 0.0)) throw std::invalid_argument("almost_period_scan: bad parameters");
  const std::size_t n = x.size();
  const auto K = static_cast<std::size_t>(std::floor(max_period / dt + 1e-9));
  if (K == 0 || 2 * K >= n) throw InsufficientData("almost_period_scan: series shorter than twice the period range");
  AlmostPeriodReport rep;
  const std::size_t w = n - K;
  rep.window = static_cast<double>(w - 1) * dt;
  double last = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    bool ok = true;
    for (std::size_t i = 0; i < w && ok; ++i) ok = std::abs(x[i + k] - x[i]) <= eps;
    if (!ok) continue;
    const double tau = static_cast<double>(k) * dt;
    rep.taus.push_back(tau);
    rep.max_gap = std::max(rep.max_gap, tau - last);
    last = tau;
  }
  if (rep.taus.empty()) rep.max_gap = std::numeric_limits<double>::infinity();
  return rep;
}

void write_csv(std::ostream& os, const PhaseTrack& track) {
  os << "t,c,cdot,m,phixx_at_max\n";
  char buf[160];
  for (std::size_t i = 0; i < track.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", track.times[i], track.c[i], track.cdot[i],
                  track.max_values[i], track.phixx_at_max[i]);
    os << buf;
  }
}

}  // namespace cpl
