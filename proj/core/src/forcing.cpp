#include "cpl/forcing.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cpl {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kValueDepth = 60;

// 2^-k x reduced to [0, 2) in units of pi; ldexp and fmod are exact.
double dyadic_angle(double x, int k) {
  double r = std::fmod(std::ldexp(x, -k), 2.0);
  return r < 0.0 ? r + 2.0 : r;
}

double dyadic_value(const DyadicSeries& s, double t) {
  const int depth = s.adaptive ? kValueDepth : s.depth;
  double sum = 0.0;
  // smallest terms first
  for (int k = depth; k >= 1; --k) {
    const double angle = kPi * (dyadic_angle(t, k) + dyadic_angle(s.shift, k));
    sum += std::ldexp(kPi, -k) * std::sin(angle);
  }
  return -s.scale * sum;
}

// cos(a+b) - cos(b) = -2 sin(b + a/2) sin(a/2) avoids cancellation for the
// slow modes, where the individual cosines are both close to 1.
double dyadic_integral(const DyadicSeries& s, double t) {
  const int depth = s.adaptive ? dyadic_integral_depth(t) : s.depth;
  const double half = 0.5 * t;
  double sum = 0.0;
  for (int k = depth; k >= 1; --k) {
    const double mid = kPi * (dyadic_angle(half, k) + dyadic_angle(s.shift, k));
    const double h = std::ldexp(kPi * half, -k);
    sum += -2.0 * std::sin(mid) * std::sin(h);
  }
  return s.scale * sum;
}

}  // namespace

int dyadic_integral_depth(double t) {
  const double span = std::max(std::abs(t), 2.0);
  // tail of the integral is bounded by 2^-K pi |t|
  return static_cast<int>(std::ceil(std::log2(span))) + 45;
}

QuasiPeriodicSignal QuasiPeriodicSignal::constant(double c) {
  QuasiPeriodicSignal s;
  s.constant_ = c;
  return s;
}

QuasiPeriodicSignal QuasiPeriodicSignal::from_modes(std::vector<Mode> modes, double constant) {
  for (const auto& m : modes) {
    if (!(m.frequency > 0.0) || !std::isfinite(m.frequency))
      throw std::invalid_argument("mode frequency must be positive and finite");
    if (!std::isfinite(m.amplitude) || !std::isfinite(m.phase))
      throw std::invalid_argument("mode amplitude and phase must be finite");
  }
  QuasiPeriodicSignal s;
  s.constant_ = constant;
  s.modes_ = std::move(modes);
  return s;
}

QuasiPeriodicSignal QuasiPeriodicSignal::dyadic(bool adaptive, int depth) {
  if (depth < 1) throw std::invalid_argument("dyadic depth must be positive");
  QuasiPeriodicSignal s;
  s.dyadic_.push_back({1.0, 0.0, adaptive, adaptive ? kValueDepth : depth});
  return s;
}

double QuasiPeriodicSignal::value(double t) const {
  double v = constant_;
  for (const auto& m : modes_) v += m.amplitude * std::sin(m.frequency * t + m.phase);
  for (const auto& d : dyadic_) v += dyadic_value(d, t);
  return v;
}

double QuasiPeriodicSignal::integral(double t) const {
  double v = constant_ * t;
  for (const auto& m : modes_)
    v += m.amplitude / m.frequency * (std::cos(m.phase) - std::cos(m.frequency * t + m.phase));
  for (const auto& d : dyadic_) v += dyadic_integral(d, t);
  return v;
}

QuasiPeriodicSignal QuasiPeriodicSignal::translated(double tau) const {
  QuasiPeriodicSignal s = *this;
  for (auto& m : s.modes_) m.phase = std::fmod(m.phase + m.frequency * tau, kTwoPi);
  for (auto& d : s.dyadic_) d.shift += tau;
  return s;
}

QuasiPeriodicSignal QuasiPeriodicSignal::scaled(double factor) const {
  QuasiPeriodicSignal s = *this;
  s.constant_ *= factor;
  for (auto& m : s.modes_) m.amplitude *= factor;
  for (auto& d : s.dyadic_) d.scale *= factor;
  return s;
}

QuasiPeriodicSignal& QuasiPeriodicSignal::operator+=(const QuasiPeriodicSignal& other) {
  constant_ += other.constant_;
  modes_.insert(modes_.end(), other.modes_.begin(), other.modes_.end());
  dyadic_.insert(dyadic_.end(), other.dyadic_.begin(), other.dyadic_.end());
  return *this;
}

bool QuasiPeriodicSignal::is_zero() const noexcept {
  if (constant_ != 0.0) return false;
  for (const auto& m : modes_)
    if (m.amplitude != 0.0) return false;
  for (const auto& d : dyadic_)
    if (d.scale != 0.0) return false;
  return true;
}

double QuasiPeriodicSignal::max_frequency() const noexcept {
  double w = 0.0;
  for (const auto& m : modes_) w = std::max(w, m.frequency);
  if (!dyadic_.empty()) w = std::max(w, 0.5 * kPi);
  return w;
}

double QuasiPeriodicSignal::tail_bound() const noexcept {
  double b = 0.0;
  for (const auto& d : dyadic_) {
    const int depth = d.adaptive ? kValueDepth : d.depth;
    b += std::abs(d.scale) * std::ldexp(kPi, -depth);
  }
  return b;
}

bool HullPoint::same_family(const HullPoint& other) const {
  if (family == other.family) return true;
  if (!family || !other.family) return false;
  return *family == *other.family;
}

HullPoint make_hull_point(QuasiPeriodicSignal family, double offset) {
  return {std::make_shared<const QuasiPeriodicSignal>(std::move(family)), offset};
}

HullSignature::HullSignature(const HullPoint& g, const HullMetricOptions& opts)
    : offset_(g.offset), depth_(opts.depth) {
  if (!(opts.window > 0.0) || opts.depth < 1)
    throw std::invalid_argument("hull metric needs a positive window and depth");
  const double w = g.family ? g.family->max_frequency() : 0.0;
  const double step = w > 0.0 ? std::min(0.05, 0.2 / w) : 0.05;
  half_ = std::max(depth_, static_cast<int>(std::ceil(opts.window / step)));
  const double h = opts.window / half_;
  samples_.resize(2 * static_cast<std::size_t>(half_) + 1);
  // translate once so that periodic offsets cancel exactly in the phases
  const QuasiPeriodicSignal shifted = g.family ? g.family->translated(g.offset) : QuasiPeriodicSignal{};
  for (int i = -half_; i <= half_; ++i) samples_[static_cast<std::size_t>(i + half_)] = shifted(i * h);
  ring_end_.resize(static_cast<std::size_t>(depth_) + 1);
  for (int j = 0; j <= depth_; ++j)
    ring_end_[static_cast<std::size_t>(j)] = static_cast<int>(std::lround(static_cast<double>(j) * half_ / depth_));
}

double HullSignature::distance(const HullSignature& other) const {
  if (other.samples_.size() != samples_.size() || other.depth_ != depth_)
    throw std::invalid_argument("hull signatures built with different metric options");
  double sup = std::abs(samples_[half_] - other.samples_[half_]);
  double d = 0.0;
  int radius = 0;
  for (int j = 1; j <= depth_; ++j) {
    while (radius < ring_end_[j]) {
      ++radius;
      const auto lo = static_cast<std::size_t>(half_ - radius);
      const auto hi = static_cast<std::size_t>(half_ + radius);
      sup = std::max({sup, std::abs(samples_[lo] - other.samples_[lo]), std::abs(samples_[hi] - other.samples_[hi])});
    }
    d += std::ldexp(std::min(1.0, sup), -j);
  }
  return d;
}

double hull_distance(const HullPoint& g1, const HullPoint& g2, const HullMetricOptions& opts) {
  if (!g1.same_family(g2)) throw std::invalid_argument("hull points belong to different families");
  return HullSignature(g1, opts).distance(HullSignature(g2, opts));
}

Nonlinearity Nonlinearity::translated(double tau) const {
  return {A.translated(tau), B.translated(tau), C.translated(tau), D.translated(tau), E.translated(tau)};
}

Nonlinearity Nonlinearity::appendix() {
  Nonlinearity nl;
  nl.A = QuasiPeriodicSignal::constant(1.0);
  nl.B = QuasiPeriodicSignal::dyadic() + QuasiPeriodicSignal::constant(1.0);
  return nl;
}

Nonlinearity Nonlinearity::burgers(double b) {
  Nonlinearity nl;
  nl.B = QuasiPeriodicSignal::constant(b);
  nl.E = QuasiPeriodicSignal::constant(-1.0);
  return nl;
}

}  // namespace cpl
