#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace cpl {

using Complex = std::complex<double>;

/// Fourier coefficients c_0 .. c_{n/2} of a real field, normalized so that
/// u(x) = c_0 + 2 Re sum_{0<k<n/2} c_k e^{ikx} + c_{n/2} cos(n x / 2).
using Spectrum = std::vector<Complex>;

/// Uniform grid x_i = 2 pi i / n on the circle R / 2 pi Z.
class CircleGrid {
 public:
  /// n must be a power of two, at least 16.
  explicit CircleGrid(int n);

  int size() const noexcept { return n_; }
  int modes() const noexcept { return n_ / 2 + 1; }
  double spacing() const noexcept;
  double node(int i) const noexcept { return spacing() * i; }

  bool operator==(const CircleGrid&) const = default;

 private:
  int n_;
};

/// A real function sampled on a CircleGrid.
class Field {
 public:
  Field(CircleGrid grid, std::vector<double> values);
  explicit Field(CircleGrid grid) : Field(grid, std::vector<double>(static_cast<std::size_t>(grid.size()), 0.0)) {}

  static Field from_function(CircleGrid grid, const std::function<double(double)>& fn);
  static Field constant(CircleGrid grid, double c);

  const CircleGrid& grid() const noexcept { return grid_; }
  int size() const noexcept { return grid_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }

  double sup_norm() const;
  double max() const;
  double min() const;
  double mean() const;
  /// sqrt(2 pi / n * sum u_i^2), the discrete L2 norm.
  double l2_norm() const;
  bool all_finite() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool operator==(const Field&) const = default;

 private:
  CircleGrid grid_;
  std::vector<double> values_;
};

/// Discrete L2 inner product with weight 2 pi / n.
double inner_product(const Field& a, const Field& b);

/// Real-to-complex transforms of one size, backed by FFTW plans on owned
/// aligned buffers. An instance is not thread-safe; `local(n)` hands out a
/// per-thread instance.
class Fourier {
 public:
  explicit Fourier(int n);
  ~Fourier();
  Fourier(const Fourier&) = delete;
  Fourier& operator=(const Fourier&) = delete;

  int size() const noexcept { return n_; }
  int modes() const noexcept { return n_ / 2 + 1; }

  /// Normalized forward transform: out has n/2 + 1 coefficients.
  void forward(std::span<const double> in, std::span<Complex> out);
  /// Inverse of forward; `in` may be shorter than n/2 + 1 (missing modes are zero).
  void inverse(std::span<const Complex> in, std::span<double> out);

  static Fourier& local(int n);

 private:
  int n_;
  double* real_;
  Complex* spec_;
  void* plan_forward_;
  void* plan_inverse_;
};

Spectrum to_spectrum(const Field& u);
Field from_spectrum(CircleGrid grid, std::span<const Complex> c);

/// Spectral derivative of order 1, 2 or 3.
Field derivative(const Field& u, int order);

/// Trigonometric interpolant of a field, evaluable anywhere on the circle.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field& u);
  explicit TrigInterpolant(CircleGrid grid, Spectrum c);

  /// d^order/dx^order of the interpolant at x (order 0..3).
  double operator()(double x, int order = 0) const;
  const Spectrum& spectrum() const noexcept { return c_; }
  const CircleGrid& grid() const noexcept { return grid_; }

 private:
  CircleGrid grid_;
  Spectrum c_;
};

/// Interpolant sampled on a grid `factor` times finer.
Field upsample(const Field& u, int factor);

/// Coefficients of x -> u(x + a).
Spectrum shifted_spectrum(const Spectrum& c, double a);

struct Extremum {
  double x;
  double value;
};

/// Global maximum of the interpolant, or of its absolute value. Candidates
/// come from an oversampled grid and are polished by Newton iteration.
Extremum interpolant_max(const TrigInterpolant& p, bool absolute = false, int oversample = 8);

/// Newton polish of a local maximum of p (or |p|) inside [x - radius, x + radius].
Extremum refine_max(const TrigInterpolant& p, double x, double radius, bool absolute = false);

}  // namespace cpl
