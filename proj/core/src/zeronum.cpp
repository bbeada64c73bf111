#include "cpl/zeronum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include "cpl/error.hpp"

namespace cpl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kRefine = 8;
constexpr int kMaxDepth = 4;

class Counter {
 public:
  Counter(const Field& u, double tol) : p_(u), tol_(tol) {}

  int sign(double v) const { return v >= tol_ ? 1 : (v <= -tol_ ? -1 : 0); }

  // Walk samples xs (values vs) whose first and last entries are nonzero.
  void walk(const std::vector<double>& xs, const std::vector<double>& vs, double spacing, int depth) {
    std::size_t last = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const int s = sign(vs[i]);
      if (s == 0) continue;
      const int sl = sign(vs[last]);
      if (i == last + 1) {
        if (s != sl) bisect(xs[last], sl, xs[i]);
      } else {
        run(xs[last], sl, xs[i], s, i - last - 1, spacing, depth);
      }
      last = i;
    }
  }

  void finish(ZeroCount& out) {
    out.count = static_cast<int>(crossings_.size());
    out.ambiguous = ambiguous_;
    out.min_crossing_slope = std::numeric_limits<double>::infinity();
    out.all_simple = !ambiguous_;
    for (const auto& [x, slope] : crossings_) {
      out.min_crossing_slope = std::min(out.min_crossing_slope, slope);
      if (slope < tol_) out.all_simple = false;
      double r = std::fmod(x, kTwoPi);
      if (r < 0) r += kTwoPi;
      out.crossings.push_back(r);
    }
    std::sort(out.crossings.begin(), out.crossings.end());
  }

 private:
  // Interior of (xa, xb) holds `zeros` unresolved samples at `spacing`.
  void run(double xa, int sa, double xb, int sb, std::size_t zeros, double spacing, int depth) {
    if (zeros == 1 && sa != sb) {
      const double x0 = 0.5 * (xa + xb);
      const double slope = std::abs(p_(x0, 1));
      if (slope >= tol_) {
        crossings_.push_back({x0, slope});
        return;
      }
    }
    if (depth >= kMaxDepth) {
      ambiguous_ = true;
      if (sa != sb) {
        const double x0 = 0.5 * (xa + xb);
        crossings_.push_back({x0, std::abs(p_(x0, 1))});
      }
      return;
    }
    const double fine = spacing / kRefine;
    const auto m = static_cast<std::size_t>(std::llround((xb - xa) / fine));
    std::vector<double> xs(m + 1), vs(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
      xs[k] = xa + static_cast<double>(k) * fine;
      vs[k] = k == 0 ? sa * tol_ : (k == m ? sb * tol_ : p_(xs[k]));
    }
    walk(xs, vs, fine, depth + 1);
  }

  void bisect(double xa, int sa, double xb) {
    for (int it = 0; it < 60 && xb - xa > 1e-15; ++it) {
      const double mid = 0.5 * (xa + xb);
      const double v = p_(mid);
      if (v == 0.0) {
        xa = xb = mid;
        break;
      }
      if ((v > 0) == (sa > 0)) xa = mid;
      else xb = mid;
    }
    const double x = 0.5 * (xa + xb);
    crossings_.push_back({x, std::abs(p_(x, 1))});
  }

  TrigInterpolant p_;
  double tol_;
  bool ambiguous_ = false;
  std::vector<std::pair<double, double>> crossings_;
};

}  // namespace

double default_zero_tol(const Field& u) { return 1e-9 * u.sup_norm(); }

ZeroCount zero_number(const Field& u, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("zero_number: tol must be positive");
  if (!u.all_finite()) throw std::invalid_argument("zero_number: field is not finite");
  const double sup = u.sup_norm();
  if (sup < tol || sup == 0.0) throw DegenerateField("zero_number: field is below the resolution threshold");

  const int n = u.size();
  const double h = u.grid().spacing();
  Counter counter(u, tol);
  int start = 0;
  while (counter.sign(u[start]) == 0) ++start;

  // one full loop, starting and ending on the same nonzero node
  std::vector<double> xs(static_cast<std::size_t>(n) + 1), vs(xs.size());
  for (int j = 0; j <= n; ++j) {
    xs[static_cast<std::size_t>(j)] = (start + j) * h;
    vs[static_cast<std::size_t>(j)] = u[(start + j) % n];
  }
  counter.walk(xs, vs, h, 0);
  ZeroCount out;
  counter.finish(out);
  return out;
}

ZeroCount zero_number(const Field& u) {
  if (u.sup_norm() == 0.0) throw DegenerateField("zero_number: field vanishes identically");
  return zero_number(u, default_zero_tol(u));
}

SimpleZeroCertificate simple_zero_certificate(const Field& u, double tol) {
  const ZeroCount z = zero_number(u, tol);
  SimpleZeroCertificate cert;
  cert.simple = z.all_simple;
  const int n = u.size();
  const double h = u.grid().spacing();
  cert.min_slope = z.count == 0 ? 0.0 : z.min_crossing_slope;

  // nodes bracketing a crossing may flip; the others must keep their sign
  std::vector<bool> near(static_cast<std::size_t>(n), false);
  for (double x : z.crossings) {
    const int i0 = static_cast<int>(std::floor(x / h)) % n;
    near[static_cast<std::size_t>(i0)] = true;
    near[static_cast<std::size_t>((i0 + 1) % n)] = true;
    if (std::abs(x - i0 * h) < 1e-12) near[static_cast<std::size_t>((i0 + n - 1) % n)] = true;
  }
  double node_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    if (!near[static_cast<std::size_t>(i)]) node_margin = std::min(node_margin, std::abs(u[i]));
  const double slope_margin = z.count == 0 ? node_margin : cert.min_slope * h / 4.0;
  cert.delta = cert.simple ? std::min(slope_margin, node_margin) : 0.0;
  return cert;
}

SimpleZeroCertificate simple_zero_certificate(const Field& u) {
  if (u.sup_norm() == 0.0) throw DegenerateField("zero_number: field vanishes identically");
  return simple_zero_certificate(u, default_zero_tol(u));
}

std::optional<double> ZeroSeries::last_drop_time() const {
  if (drop_events.empty()) return std::nullopt;
  return drop_events.back().t;
}

constexpr double kDifferenceResolution = 1e-10;

ZeroSeries monitor_difference(const Trajectory& a, const Trajectory& b, double rel_tol) {
  if (!a.compatible_with(b) || a.samples.size() != b.samples.size())
    throw MismatchedTrajectories("monitor_difference: trajectories differ in metadata or length");
  for (std::size_t i = 0; i < a.samples.size(); ++i)
    if (a.samples[i].t != b.samples[i].t)
      throw MismatchedTrajectories("monitor_difference: sample times differ");

  ZeroSeries s;
  int prev = -1;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double t = a.samples[i].t;
    const Field d = a.samples[i].state - b.samples[i].state;
    ZeroCount z;
    const double sup = d.sup_norm();
    const double scale = std::max(a.samples[i].state.sup_norm(), b.samples[i].state.sup_norm());
    // below this the difference is solver roundoff and its sign pattern is noise
    if (sup <= kDifferenceResolution * scale || !d.all_finite()) {
      z.count = -1;
      z.all_simple = false;
      z.ambiguous = true;
    } else {
      z = zero_number(d, rel_tol * sup);
    }
    s.times.push_back(t);
    if (!z.ambiguous) {
      if (prev >= 0 && z.count < prev) s.drop_events.push_back({t, prev, z.count});
      if (prev >= 0 && z.count > prev) s.violations.push_back({t, prev, z.count});
      prev = z.count;
    }
    s.counts.push_back(std::move(z));
  }
  return s;
}

void write_csv(std::ostream& os, const ZeroSeries& s) {
  os << "t,count,all_simple,ambiguous\n";
  char buf[64];
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", s.times[i]);
    const auto& z = s.counts[i];
    os << buf << ',' << z.count << ',' << (z.all_simple ? 1 : 0) << ',' << (z.ambiguous ? 1 : 0) << '\n';
  }
}

}  // namespace cpl
