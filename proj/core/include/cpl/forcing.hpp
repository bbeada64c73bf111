#pragma once

#include <memory>
#include <span>
#include <vector>

namespace cpl {

/// One term a*sin(omega*t + theta) of a trigonometric sum.
struct Mode {
  double amplitude = 0.0;
  double frequency = 1.0;  // radians per unit time, strictly positive
  double phase = 0.0;

  bool operator==(const Mode&) const = default;
};

/// The dyadic series  -scale * sum_k 2^-k pi sin(2^-k pi (t + shift)),  k >= 1.
///
/// With `adaptive` set the value is summed to depth 60 and integrals use a
/// depth that grows with |t|; otherwise both are truncated at `depth`.
struct DyadicSeries {
  double scale = 1.0;
  double shift = 0.0;
  bool adaptive = true;
  int depth = 60;

  bool operator==(const DyadicSeries&) const = default;
};

/// A recurrent time coefficient: constant + finite mode sum + dyadic series.
/// Values are immutable; every transformation returns a new signal.
class QuasiPeriodicSignal {
 public:
  QuasiPeriodicSignal() = default;

  static QuasiPeriodicSignal constant(double c);
  static QuasiPeriodicSignal from_modes(std::vector<Mode> modes, double constant = 0.0);
  /// f(t) = -sum_{k>=1} 2^-k pi sin(2^-k pi t). A non-adaptive series is
  /// truncated at `depth` and is therefore 2^(depth+1)-periodic.
  static QuasiPeriodicSignal dyadic(bool adaptive = true, int depth = 60);

  double operator()(double t) const { return value(t); }
  double value(double t) const;
  /// Integral of the signal over [0, t] in closed form.
  double integral(double t) const;
  /// g(t) = f(t + tau).
  QuasiPeriodicSignal translated(double tau) const;
  QuasiPeriodicSignal scaled(double s) const;

  QuasiPeriodicSignal& operator+=(const QuasiPeriodicSignal& other);
  friend QuasiPeriodicSignal operator+(QuasiPeriodicSignal a, const QuasiPeriodicSignal& b) {
    a += b;
    return a;
  }

  double constant_term() const noexcept { return constant_; }
  std::span<const Mode> modes() const noexcept { return modes_; }
  std::span<const DyadicSeries> dyadic_terms() const noexcept { return dyadic_; }
  bool is_zero() const noexcept;
  /// Largest angular frequency present (pi/2 for the dyadic series).
  double max_frequency() const noexcept;
  /// Bound on |value - truncated value| of the dyadic part at its value depth.
  double tail_bound() const noexcept;

  bool operator==(const QuasiPeriodicSignal&) const = default;

 private:
  double constant_ = 0.0;
  std::vector<Mode> modes_;
  std::vector<DyadicSeries> dyadic_;
};

/// Depth used by DyadicSeries when integrating up to time t.
int dyadic_integral_depth(double t);

/// A point g = f . tau of the hull, stored as a time offset of the generating family.
struct HullPoint {
  std::shared_ptr<const QuasiPeriodicSignal> family;
  double offset = 0.0;

  HullPoint() = default;
  HullPoint(std::shared_ptr<const QuasiPeriodicSignal> f, double tau)
      : family(std::move(f)), offset(tau) {}

  double operator()(double t) const { return family ? family->value(offset + t) : 0.0; }
  /// g . t
  HullPoint advanced(double t) const { return {family, offset + t}; }
  bool same_family(const HullPoint& other) const;
};

HullPoint make_hull_point(QuasiPeriodicSignal family, double offset = 0.0);

struct HullMetricOptions {
  double window = 10.0;
  int depth = 4;
};

/// Samples of a hull point on the metric window. Precomputing these makes
/// repeated distance queries between many hull points cheap.
class HullSignature {
 public:
  HullSignature(const HullPoint& g, const HullMetricOptions& opts = {});
  double distance(const HullSignature& other) const;
  double offset() const noexcept { return offset_; }

 private:
  double offset_;
  int depth_;
  int half_;  // samples on each side of 0
  std::vector<double> samples_;  // t = -window .. window
  std::vector<int> ring_end_;    // per level j, sample radius covered
};

/// sum_{j=1..depth} 2^-j min(1, sup_{|t| <= j window/depth} |g1(t) - g2(t)|).
double hull_distance(const HullPoint& g1, const HullPoint& g2, const HullMetricOptions& opts = {});

/// Value and partial derivatives of the nonlinearity.
struct NlValue {
  double f;
  double f_u;
  double f_p;
};

/// f(t,u,p) = D + B u + C u^3 + A p + E u p with recurrent coefficients.
struct Nonlinearity {
  QuasiPeriodicSignal A, B, C, D, E;

  /// Coefficient values frozen at one instant.
  struct Frozen {
    double a, b, c, d, e;
    NlValue operator()(double u, double p) const {
      return {d + b * u + c * u * u * u + a * p + e * u * p, b + 3.0 * c * u * u + e * p, a + e * u};
    }
  };

  Frozen at(double t) const { return {A(t), B(t), C(t), D(t), E(t)}; }
  NlValue operator()(double t, double u, double p) const { return at(t)(u, p); }
  Nonlinearity translated(double tau) const;
  bool operator==(const Nonlinearity&) const = default;

  /// u_x + (f(t) + 1) u with f the dyadic series.
  static Nonlinearity appendix();
  /// -u u_x + b u.
  static Nonlinearity burgers(double b);
};

}  // namespace cpl
