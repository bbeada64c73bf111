#include "cpl/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace cpl {
namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

CircleGrid::CircleGrid(int n) : n_(n) {
  if (n < 16 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid size must be a power of two >= 16, got " + std::to_string(n));
}

double CircleGrid::spacing() const noexcept { return 2.0 * std::numbers::pi / n_; }

Field::Field(CircleGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (static_cast<int>(values_.size()) != grid_.size())
    throw std::invalid_argument("field length does not match grid size");
}

Field Field::from_function(CircleGrid grid, const std::function<double(double)>& fn) {
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.size(); ++i) v[static_cast<std::size_t>(i)] = fn(grid.node(i));
  return Field(grid, std::move(v));
}

Field Field::constant(CircleGrid grid, double c) {
  return Field(grid, std::vector<double>(static_cast<std::size_t>(grid.size()), c));
}

double Field::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double Field::max() const { return *std::max_element(values_.begin(), values_.end()); }
double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

double Field::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double Field::l2_norm() const { return std::sqrt(inner_product(*this, *this)); }

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator+=(const Field& other) {
  if (other.grid_ != grid_) throw std::invalid_argument("grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  if (other.grid_ != grid_) throw std::invalid_argument("grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

double inner_product(const Field& a, const Field& b) {
  if (a.grid() != b.grid()) throw std::invalid_argument("grid mismatch");
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * a.grid().spacing();
}

Fourier::Fourier(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("transform size too small");
  real_ = fftw_alloc_real(static_cast<std::size_t>(n));
  spec_ = reinterpret_cast<Complex*>(fftw_alloc_complex(static_cast<std::size_t>(modes())));
  std::lock_guard lock(planner_mutex());
  plan_forward_ = fftw_plan_dft_r2c_1d(n, real_, reinterpret_cast<fftw_complex*>(spec_), FFTW_ESTIMATE);
  plan_inverse_ = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spec_), real_, FFTW_ESTIMATE);
}

Fourier::~Fourier() {
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inverse_));
  }
  fftw_free(spec_);
  fftw_free(real_);
}

void Fourier::forward(std::span<const double> in, std::span<Complex> out) {
  if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) < modes())
    throw std::invalid_argument("forward transform size mismatch");
  std::copy(in.begin(), in.end(), real_);
  fftw_execute(static_cast<fftw_plan>(plan_forward_));
  const double scale = 1.0 / n_;
  for (int k = 0; k < modes(); ++k) out[static_cast<std::size_t>(k)] = spec_[k] * scale;
}

void Fourier::inverse(std::span<const Complex> in, std::span<double> out) {
  if (static_cast<int>(out.size()) != n_ || static_cast<int>(in.size()) > modes())
    throw std::invalid_argument("inverse transform size mismatch");
  std::copy(in.begin(), in.end(), spec_);
  std::fill(spec_ + in.size(), spec_ + modes(), Complex{});
  // c2r ignores the imaginary parts of c_0 and c_{n/2}
  fftw_execute(static_cast<fftw_plan>(plan_inverse_));
  std::copy(real_, real_ + n_, out.begin());
}

Fourier& Fourier::local(int n) {
  thread_local std::map<int, std::unique_ptr<Fourier>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fourier>(n);
  return *slot;
}

Spectrum to_spectrum(const Field& u) {
  Spectrum c(static_cast<std::size_t>(u.grid().modes()));
  Fourier::local(u.size()).forward(u.values(), c);
  return c;
}

Field from_spectrum(CircleGrid grid, std::span<const Complex> c) {
  Field u(grid);
  Fourier::local(grid.size()).inverse(c, u.values());
  return u;
}

Field derivative(const Field& u, int order) {
  if (order < 1 || order > 3) throw std::invalid_argument("derivative order must be 1, 2 or 3");
  Spectrum c = to_spectrum(u);
  const int nyq = u.grid().modes() - 1;
  for (int k = 0; k <= nyq; ++k) c[static_cast<std::size_t>(k)] *= std::pow(Complex(0.0, k), order);
  // The Nyquist cosine has odd derivatives that vanish on the nodes.
  if (order % 2 == 1) c[static_cast<std::size_t>(nyq)] = 0.0;
  else c[static_cast<std::size_t>(nyq)] = c[static_cast<std::size_t>(nyq)].real();
  return from_spectrum(u.grid(), c);
}

TrigInterpolant::TrigInterpolant(const Field& u) : grid_(u.grid()), c_(to_spectrum(u)) {}

TrigInterpolant::TrigInterpolant(CircleGrid grid, Spectrum c) : grid_(grid), c_(std::move(c)) {
  if (static_cast<int>(c_.size()) != grid_.modes()) throw std::invalid_argument("spectrum size mismatch");
}

double TrigInterpolant::operator()(double x, int order) const {
  const int nyq = grid_.modes() - 1;
  // e^{ikx} by recurrence; renormalizing keeps |z| = 1 over n/2 products
  const Complex step = std::polar(1.0, x);
  const Complex i_unit(0.0, 1.0);
  Complex z(1.0, 0.0);
  double sum = order == 0 ? c_[0].real() : 0.0;
  for (int k = 1; k < nyq; ++k) {
    z *= step;
    if (k % 16 == 0) z /= std::abs(z);
    Complex factor = 1.0;
    for (int j = 0; j < order; ++j) factor *= i_unit * static_cast<double>(k);
    sum += 2.0 * (c_[static_cast<std::size_t>(k)] * factor * z).real();
  }
  // Nyquist term a cos(N x): derivatives follow the cosine
  const double a = c_[static_cast<std::size_t>(nyq)].real();
  const double nx = nyq * x;
  const double N = nyq;
  switch (order) {
    case 0: sum += a * std::cos(nx); break;
    case 1: sum -= a * N * std::sin(nx); break;
    case 2: sum -= a * N * N * std::cos(nx); break;
    case 3: sum += a * N * N * N * std::sin(nx); break;
    default: throw std::invalid_argument("interpolant derivative order must be 0..3");
  }
  return sum;
}

Field upsample(const Field& u, int factor) {
  if (factor < 1) throw std::invalid_argument("upsample factor must be positive");
  if (factor == 1) return u;
  const CircleGrid fine(u.size() * factor);
  Spectrum c = to_spectrum(u);
  const std::size_t nyq = c.size() - 1;
  // cos(N x) = (e^{iNx} + e^{-iNx}) / 2 on the finer grid
  c[nyq] = 0.5 * c[nyq].real();
  return from_spectrum(fine, c);
}

}  // namespace cpl

namespace cpl {

Spectrum shifted_spectrum(const Spectrum& c, double a) {
  Spectrum out(c.size());
  const std::size_t nyq = c.size() - 1;
  for (std::size_t k = 0; k < nyq; ++k) out[k] = c[k] * std::polar(1.0, static_cast<double>(k) * a);
  out[nyq] = c[nyq].real() * std::cos(static_cast<double>(nyq) * a);
  return out;
}

Extremum refine_max(const TrigInterpolant& p, double x0, double radius, bool absolute) {
  // Newton on p'. Steps must shrink; values only guard against leaving the peak.
  auto score = [&](double v) { return absolute ? std::abs(v) : v; };
  double x = x0;
  double v = p(x);
  double last_step = radius;
  for (int it = 0; it < 30; ++it) {
    const double d1 = p(x, 1), d2 = p(x, 2);
    if (d2 == 0.0) break;
    const double step = -d1 / d2;
    if (!std::isfinite(step) || std::abs(step) > last_step || std::abs(x + step - x0) > radius) break;
    const double nv = p(x + step);
    if (score(nv) < score(v) - 1e-12 * std::abs(v)) break;
    x += step;
    v = nv;
    last_step = std::abs(step);
    if (last_step < 1e-15 * (1.0 + std::abs(x))) break;
  }
  return {x, v};
}

Extremum interpolant_max(const TrigInterpolant& p, bool absolute, int oversample) {
  const CircleGrid& g = p.grid();
  const int fine_n = g.size() * oversample;
  Spectrum c = p.spectrum();
  c.back() = 0.5 * c.back().real();
  std::vector<double> v(static_cast<std::size_t>(fine_n));
  Fourier::local(fine_n).inverse(c, v);
  auto score = [&](double x) { return absolute ? std::abs(x) : x; };

  // top local maxima on the fine grid
  constexpr int kCandidates = 3;
  std::vector<int> cand;
  for (int i = 0; i < fine_n; ++i) {
    const double s = score(v[static_cast<std::size_t>(i)]);
    const double l = score(v[static_cast<std::size_t>((i + fine_n - 1) % fine_n)]);
    const double r = score(v[static_cast<std::size_t>((i + 1) % fine_n)]);
    if (s >= l && s >= r) cand.push_back(i);
  }
  std::sort(cand.begin(), cand.end(), [&](int a, int b) {
    return score(v[static_cast<std::size_t>(a)]) > score(v[static_cast<std::size_t>(b)]);
  });
  if (cand.size() > kCandidates) cand.resize(kCandidates);

  const double h = 2.0 * std::numbers::pi / fine_n;
  Extremum best{0.0, v[0]};
  bool first = true;
  for (int i : cand) {
    const Extremum e = refine_max(p, i * h, h, absolute);
    if (first || score(e.value) > score(best.value)) best = e, first = false;
  }
  best.x = std::fmod(best.x, 2.0 * std::numbers::pi);
  if (best.x < 0) best.x += 2.0 * std::numbers::pi;
  return best;
}

}  // namespace cpl
