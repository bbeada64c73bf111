#include "cpl/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "cpl/error.hpp"
#include "cpl/zeronum.hpp"

namespace cpl {
namespace {

// relative to the norm before projection; below this the residual is roundoff
constexpr double kCollapse = 1e-13;

// Accumulates log growth of the frame in steps of reorth_every.
class QrAccumulator {
 public:
  QrAccumulator(CircleGrid grid, const SpectrumOptions& opts) : frame_(grid, opts.m, opts.seed), sums_(opts.m, 0.0) {
    if (opts.m < 1 || opts.m > grid.size() / 4) throw std::invalid_argument("frame size must satisfy 1 <= m <= n/4");
    if (opts.reorth_every < 1) throw std::invalid_argument("reorth_every must be positive");
    if (!(opts.window > 0.0)) throw std::invalid_argument("window must be positive");
  }

  TangentFrame& frame() { return frame_; }

  void reorthonormalize(double elapsed) {
    const auto r = frame_.orthonormalize();
    for (std::size_t i = 0; i < r.size(); ++i) sums_[i] += std::log(r[i]);
    elapsed_ = elapsed;
  }

  void mark_half() {
    half_sums_ = sums_;
    half_time_ = elapsed_;
  }

  SpectrumEstimate finish(const SpectrumOptions& opts) const {
    SpectrumEstimate est;
    est.window = elapsed_;
    est.center_band = opts.center_band;
    const double tail = elapsed_ - half_time_;
    for (std::size_t i = 0; i < sums_.size(); ++i) {
      const double full = sums_[i] / elapsed_;
      const double last = tail > 0.0 && !half_sums_.empty() ? (sums_[i] - half_sums_[i]) / tail : full;
      est.exponents.push_back(full);
      est.std_error.push_back(std::abs(full - last));
    }
    // Gram-Schmidt order is already descending for a converged frame; sort to be safe
    std::vector<std::size_t> order(sums_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return est.exponents[a] > est.exponents[b]; });
    SpectrumEstimate sorted = est;
    for (std::size_t i = 0; i < order.size(); ++i) {
      sorted.exponents[i] = est.exponents[order[i]];
      sorted.std_error[i] = est.std_error[order[i]];
    }
    sorted.dims = classify_spectrum(sorted.exponents, opts.center_band);
    return sorted;
  }

 private:
  TangentFrame frame_;
  std::vector<double> sums_, half_sums_;
  double elapsed_ = 0.0, half_time_ = 0.0;
};

}  // namespace

double spectral_inner(const Spectrum& a, const Spectrum& b) {
  const std::size_t nyq = a.size() - 1;
  double s = a[0].real() * b[0].real() + a[nyq].real() * b[nyq].real();
  for (std::size_t k = 1; k < nyq; ++k) s += 2.0 * (a[k].real() * b[k].real() + a[k].imag() * b[k].imag());
  return 2.0 * std::numbers::pi * s;
}

TangentFrame::TangentFrame(CircleGrid grid, int m, std::uint64_t seed) : grid_(grid) {
  if (m < 1) throw std::invalid_argument("frame size must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  const int kmax = grid.size() / 4;
  for (int i = 0; i < m; ++i) {
    Spectrum c(static_cast<std::size_t>(grid.modes()), Complex{});
    c[0] = N(rng);
    for (int k = 1; k <= kmax; ++k) {
      const double re = N(rng), im = N(rng);
      c[static_cast<std::size_t>(k)] = Complex(re, im);
    }
    v_.push_back(std::move(c));
  }
  orthonormalize();
}

std::vector<Field> TangentFrame::fields() const {
  std::vector<Field> out;
  for (const auto& c : v_) out.push_back(from_spectrum(grid_, c));
  return out;
}

std::vector<double> TangentFrame::orthonormalize() {
  std::vector<double> r(v_.size());
  for (std::size_t i = 0; i < v_.size(); ++i) {
    const double before = std::sqrt(spectral_inner(v_[i], v_[i]));
    for (std::size_t j = 0; j < i; ++j) {
      const double p = spectral_inner(v_[i], v_[j]);
      for (std::size_t k = 0; k < v_[i].size(); ++k) v_[i][k] -= p * v_[j][k];
    }
    const double norm = std::sqrt(spectral_inner(v_[i], v_[i]));
    if (!(norm > kCollapse * before) || !std::isfinite(norm)) throw Degenerate("tangent frame vector collapsed");
    for (auto& c : v_[i]) c /= norm;
    r[i] = norm;
  }
  return r;
}

double TangentFrame::orthogonality_error() const {
  double e = 0.0;
  for (std::size_t i = 0; i < v_.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) e = std::max(e, std::abs(spectral_inner(v_[i], v_[j]) - (i == j ? 1.0 : 0.0)));
  return e;
}

SpectrumEstimate lyapunov_exponents(const Trajectory& base, const SpectrumOptions& opts) {
  if (base.samples.size() < 2) throw InsufficientData("lyapunov_exponents: base trajectory too short");
  if (base.stride != 1) throw std::invalid_argument("lyapunov_exponents: base must be stored every step");
  const double t_start = base.samples.front().t;
  const double span = base.samples.back().t - t_start;
  if (opts.window > span * (1.0 + 1e-12)) throw InsufficientData("lyapunov_exponents: window exceeds the base trajectory");
  const auto steps = static_cast<std::size_t>(std::llround(opts.window / base.dt));
  const std::size_t half = steps / 2;

  QrAccumulator acc(base.grid(), opts);
  SemiflowStepper rhs(base.grid(), base.forcing, base.nonlinearity, base.dt, base.options);
  TangentStepper tangent(base.grid(), base.forcing, base.nonlinearity, base.dt, base.options);
  rhs.reset(base.samples[0].state, t_start);
  Spectrum u0 = rhs.spectrum(), du0 = rhs.time_derivative();
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t0 = base.samples[i - 1].t;
    if (std::abs(base.samples[i].t - t0 - base.dt) > 1e-9 * base.dt)
      throw std::invalid_argument("lyapunov_exponents: base samples are not one step apart");
    rhs.reset(base.samples[i].state, base.samples[i].t);
    Spectrum u1 = rhs.spectrum(), du1 = rhs.time_derivative();
    tangent.prepare({t0, base.dt, &u0, &du0, &u1, &du1});
    for (auto& v : acc.frame().vectors()) tangent.step(v);
    if (i % static_cast<std::size_t>(opts.reorth_every) == 0 || i == steps) acc.reorthonormalize(static_cast<double>(i) * base.dt);
    if (i == half) {
      acc.reorthonormalize(static_cast<double>(i) * base.dt);
      acc.mark_half();
    }
    u0 = std::move(u1);
    du0 = std::move(du1);
  }
  return acc.finish(opts);
}

SpectrumEstimate lyapunov_exponents(const Field& u0, const HullPoint& g, const Nonlinearity& nl, double dt,
                                    const SpectrumOptions& opts, double transient, SolverOptions solver) {
  const CircleGrid grid = u0.grid();
  SemiflowStepper base(grid, g, nl, dt, solver);
  base.reset(u0, 0.0);
  const auto transient_steps = static_cast<std::int64_t>(std::llround(transient / dt));
  for (std::int64_t k = 0; k < transient_steps; ++k) base.step();

  const auto steps = static_cast<std::int64_t>(std::llround(opts.window / dt));
  const std::int64_t half = steps / 2;
  QrAccumulator acc(grid, opts);
  TangentStepper tangent(grid, g, nl, dt, solver);
  Spectrum ua = base.spectrum(), dua = base.time_derivative();
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double t0 = base.time();
    base.step();
    Spectrum ub = base.spectrum(), dub = base.time_derivative();
    tangent.prepare({t0, dt, &ua, &dua, &ub, &dub});
    for (auto& v : acc.frame().vectors()) tangent.step(v);
    if (i % opts.reorth_every == 0 || i == steps) acc.reorthonormalize(static_cast<double>(i) * dt);
    if (i == half) {
      acc.reorthonormalize(static_cast<double>(i) * dt);
      acc.mark_half();
    }
    ua = std::move(ub);
    dua = std::move(dub);
  }
  return acc.finish(opts);
}

SpectrumDims classify_spectrum(const std::vector<double>& exponents, double eps_c) {
  SpectrumDims d;
  for (double e : exponents) {
    if (e > eps_c) ++d.dim_u;
    else if (std::abs(e) <= eps_c) ++d.dim_c;
  }
  d.N_u = d.dim_u % 2 == 0 ? d.dim_u : d.dim_u + 1;
  return d;
}

ZeroBoundsReport mode_zero_bounds_check(int n1, int n2, int trials, std::uint64_t seed) {
  if (n1 < 0 || n2 < n1 || n2 > 6) throw std::invalid_argument("mode band must satisfy 0 <= n1 <= n2 <= 6");
  ZeroBoundsReport rep;
  rep.n1 = n1;
  rep.n2 = n2;
  rep.trials = trials;
  auto dim = [](int k) { return 2 * k + 1; };  // dim V^{0,k}
  rep.N1 = n1 == 0 ? 0 : dim(n1 - 1) + (dim(n1 - 1) % 2);
  rep.N2 = dim(n2) - (dim(n2) % 2);
  rep.min_z = rep.N2 + 1;
  rep.max_z = -1;

  const CircleGrid g(64);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int trial = 0; trial < trials; ++trial) {
    Spectrum c(static_cast<std::size_t>(g.modes()), Complex{});
    for (int k = n1; k <= n2; ++k) {
      const double a = N(rng), b = N(rng);
      c[static_cast<std::size_t>(k)] = k == 0 ? Complex(a, 0.0) : Complex(a, b);
    }
    const Field v = from_spectrum(g, c);
    ZeroCount z;
    try {
      z = zero_number(v);
    } catch (const DegenerateField&) {
      ++rep.ambiguous;
      continue;
    }
    if (z.ambiguous) {
      ++rep.ambiguous;
      continue;
    }
    ++rep.histogram[z.count];
    rep.min_z = std::min(rep.min_z, z.count);
    rep.max_z = std::max(rep.max_z, z.count);
    if (z.count < rep.N1 || z.count > rep.N2) ++rep.violations;
  }
  rep.passed = rep.violations == 0 && rep.ambiguous < std::max(1, trials / 100);
  return rep;
}

void write_csv(std::ostream& os, const SpectrumEstimate& est) {
  os << "rank,exponent,stderr\n";
  char buf[96];
  for (std::size_t i = 0; i < est.exponents.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, est.exponents[i], est.std_error[i]);
    os << buf;
  }
}

void write_dims_csv(std::ostream& os, const SpectrumEstimate& est) {
  os << "dim_u,dim_c,N_u\n" << est.dims.dim_u << ',' << est.dims.dim_c << ',' << est.dims.N_u << '\n';
}

}  // namespace cpl
