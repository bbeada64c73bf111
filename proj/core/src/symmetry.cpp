#include "cpl/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace cpl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Field rotate(const Field& u, int j) {
  const int n = u.size();
  j = ((j % n) + n) % n;
  Field out(u.grid());
  for (int i = 0; i < n; ++i) out[i] = u[(i + j) % n];
  return out;
}

double node_gap(const Field& u, const Field& v, int j) {
  const int n = u.size();
  double m = 0.0;
  for (int i = 0; i < n; ++i) m = std::max(m, std::abs(u[i] - v[(i + j) % n]));
  return m;
}

}  // namespace

Field shift(const Field& u, double a) {
  const double h = u.grid().spacing();
  const double cells = a / h;
  const double r = std::round(cells);
  if (std::abs(cells - r) <= 1e-12 * std::max(1.0, std::abs(cells)))
    return rotate(u, static_cast<int>(std::fmod(r, static_cast<double>(u.size()))));
  return from_spectrum(u.grid(), shifted_spectrum(to_spectrum(u), wrap(a)));
}

double interpolant_sup(const Field& u) {
  return std::abs(interpolant_max(TrigInterpolant(u), true).value);
}

OrbitDistanceResult orbit_distance(const Field& u, const Field& v) {
  if (u.grid() != v.grid()) throw std::invalid_argument("orbit_distance: grid mismatch");
  const int n = u.size();
  const double h = u.grid().spacing();

  std::vector<double> gaps(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) gaps[static_cast<std::size_t>(j)] = node_gap(u, v, j);

  OrbitDistanceResult res;
  res.grid_shift = static_cast<int>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
  res.grid_distance = gaps[static_cast<std::size_t>(res.grid_shift)];

  const Spectrum cu = to_spectrum(u);
  const Spectrum cv = to_spectrum(v);
  Spectrum w(cu.size());
  auto objective = [&](double a) {
    const Spectrum sv = shifted_spectrum(cv, a);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = cu[k] - sv[k];
    return std::abs(interpolant_max(TrigInterpolant(u.grid(), w), true).value);
  };

  // local minima of the grid scan, best first
  std::vector<int> cand;
  for (int j = 0; j < n; ++j) {
    const double g = gaps[static_cast<std::size_t>(j)];
    if (g <= gaps[static_cast<std::size_t>((j + n - 1) % n)] && g <= gaps[static_cast<std::size_t>((j + 1) % n)])
      cand.push_back(j);
  }
  std::sort(cand.begin(), cand.end(),
            [&](int a, int b) { return gaps[static_cast<std::size_t>(a)] < gaps[static_cast<std::size_t>(b)]; });
  if (cand.size() > 3) cand.resize(3);

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  res.distance = std::numeric_limits<double>::infinity();
  for (int j : cand) {
    double lo = (j - 1) * h, hi = (j + 1) * h;
    double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 64 && hi - lo > 1e-14; ++it) {
      if (f1 <= f2) {
        hi = x2, x2 = x1, f2 = f1;
        x1 = hi - invphi * (hi - lo), f1 = objective(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2;
        x2 = lo + invphi * (hi - lo), f2 = objective(x2);
      }
    }
    const double a = f1 <= f2 ? x1 : x2;
    const double f = std::min(f1, f2);
    const double fg = objective(j * h);
    if (fg < res.distance) res.distance = fg, res.best_shift = j * h;
    if (f < res.distance) res.distance = f, res.best_shift = a;
  }
  res.best_shift = wrap(res.best_shift);
  return res;
}

double directed_orbit_hausdorff(const Field& u, const Field& v) {
  if (u.grid() != v.grid()) throw std::invalid_argument("directed_orbit_hausdorff: grid mismatch");
  const int n = u.size();
  double sup = 0.0;
  for (int a = 0; a < n; ++a) {
    const Field ua = rotate(u, a);
    double inf = std::numeric_limits<double>::infinity();
    for (int b = 0; b < n; ++b) {
      double m = 0.0;
      for (int i = 0; i < n; ++i) m = std::max(m, std::abs(ua[i] - v[(i + b) % n]));
      inf = std::min(inf, m);
    }
    sup = std::max(sup, inf);
  }
  return sup;
}

double resolved_rms(const Field& u) {
  const Spectrum c = to_spectrum(u);
  double s = std::norm(c[0]);
  for (std::size_t k = 1; k + 1 < c.size(); ++k) s += 2.0 * std::norm(c[k]);
  return std::sqrt(s);
}

double quotient_distance(const Field& u, const HullPoint& g1, const Field& v, const HullPoint& g2,
                         const HullMetricOptions& opts) {
  return orbit_distance(u, v).distance + hull_distance(g1, g2, opts);
}

PeriodReport spatial_period(const Field& u, double amp_tol) {
  const Spectrum c = to_spectrum(u);
  const std::size_t nyq = c.size() - 1;
  auto amp = [&](std::size_t k) { return k == nyq ? std::abs(c[k].real()) : std::abs(c[k]); };
  double top = 0.0;
  for (std::size_t k = 0; k <= nyq; ++k) top = std::max(top, amp(k));

  PeriodReport rep;
  int g = 0;
  if (top > 0.0) {
    for (std::size_t k = 1; k <= nyq; ++k) {
      if (amp(k) > 0.0 && amp(k) >= amp_tol * top) {
        rep.active_modes.push_back(static_cast<int>(k));
        g = std::gcd(g, static_cast<int>(k));
      }
    }
  }
  rep.homogeneous = rep.active_modes.empty();
  rep.L = rep.homogeneous ? kTwoPi : kTwoPi / g;
  return rep;
}

bool is_homogeneous(const Field& u, double tol) {
  return (u.max() - u.min()) < tol * (1.0 + u.sup_norm());
}

}  // namespace cpl
