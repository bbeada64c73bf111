#pragma once

#include <cstdint>
#include <vector>

#include "cpl/forcing.hpp"
#include "cpl/spectral.hpp"

namespace cpl {

struct SolverOptions {
  /// Evaluate the nonlinearity on a 3n/2 grid and truncate back.
  bool dealias = true;
  /// Sup-norm ceiling above which integration stops with Blowup.
  double blowup_ceiling = 1e8;
  /// Hold the spatial mean at zero. Only valid when f maps zero-mean states
  /// to zero-mean states; an unstable mean mode otherwise amplifies roundoff.
  bool zero_mean = false;

  bool operator==(const SolverOptions&) const = default;
};

struct Sample {
  double t;
  Field state;
};

/// Time-stamped states of one solution u(t) = phi(t, . ; u0, g).
struct Trajectory {
  HullPoint forcing;
  Nonlinearity nonlinearity;
  double dt = 0.0;
  int stride = 1;
  SolverOptions options;
  int order = 4;
  std::vector<Sample> samples;

  const CircleGrid& grid() const { return samples.front().state.grid(); }
  /// Metadata equality: everything except the samples themselves.
  bool compatible_with(const Trajectory& other) const;
};

/// Exponential time differencing coefficients (Cox-Matthews ETDRK4) for the
/// diagonal operator -k^2, computed by contour averaging so that the k = 0
/// mode is handled without cancellation.
struct EtdCoefficients {
  EtdCoefficients(int n_modes, double dt);
  double dt;
  std::vector<double> e, e2, q, f1, f2, f3;
};

/// Endpoint data of one base step: spectra and their time derivatives.
/// Between the endpoints the base is interpolated by cubic Hermite.
struct BaseStep {
  double t0;
  double dt;
  const Spectrum* u0;
  const Spectrum* du0;
  const Spectrum* u1;
  const Spectrum* du1;

  Spectrum at(double theta) const;
};

/// Fourth-order exponential integrator for u_t = u_xx + f(t, u, u_x).
/// Diffusion is integrated exactly in Fourier space. The Nyquist mode is kept
/// at zero.
class SemiflowStepper {
 public:
  SemiflowStepper(CircleGrid grid, HullPoint forcing, Nonlinearity nl, double dt, SolverOptions opts = {});

  void reset(const Field& u0, double t0 = 0.0);
  /// Advance one step; throws Blowup or NonFinite.
  void step();

  double time() const noexcept { return t0_ + static_cast<double>(steps_) * dt_; }
  std::int64_t steps() const noexcept { return steps_; }
  double dt() const noexcept { return dt_; }
  const CircleGrid& grid() const noexcept { return grid_; }
  const Spectrum& spectrum() const noexcept { return u_; }
  Field state() const;
  /// u_t = u_xx + f at the current state.
  Spectrum time_derivative() const;
  const HullPoint& forcing() const noexcept { return forcing_; }
  const Nonlinearity& nonlinearity() const noexcept { return nl_; }
  const SolverOptions& options() const noexcept { return opts_; }

  /// Projection of f(t, u, u_x) onto the resolved modes.
  void nonlinear_term(const Spectrum& u, double t, Spectrum& out) const;

 private:
  CircleGrid grid_;
  HullPoint forcing_;
  Nonlinearity nl_;
  double dt_;
  SolverOptions opts_;
  EtdCoefficients etd_;
  int work_n_;
  double t0_ = 0.0;
  std::int64_t steps_ = 0;
  Spectrum u_;
  mutable Spectrum na_, nb_, nc_, nv_, a_, b_, c_;
  mutable Spectrum pad_;
  mutable std::vector<double> uu_, ux_, ff_;
};

/// Same scheme applied to psi_t = psi_xx + a psi_x + b psi with a = f_p,
/// b = f_u evaluated along a base solution.
class TangentStepper {
 public:
  TangentStepper(CircleGrid grid, HullPoint forcing, Nonlinearity nl, double dt, SolverOptions opts = {});

  /// Freeze the coefficients for the step described by `base`.
  void prepare(const BaseStep& base);
  /// Advance one tangent vector across the prepared step.
  void step(Spectrum& psi);

  double dt() const noexcept { return dt_; }

 private:
  void linear_term(const Spectrum& psi, int stage, Spectrum& out);

  CircleGrid grid_;
  HullPoint forcing_;
  Nonlinearity nl_;
  double dt_;
  SolverOptions opts_;
  EtdCoefficients etd_;
  int work_n_;
  std::vector<double> coef_a_[3], coef_b_[3];  // stages theta = 0, 1/2, 1
  Spectrum na_, nb_, nc_, nv_, a_, b_, c_, pad_;
  std::vector<double> pp_, px_, out_;
};

/// Integrates from u0 over [0, t_end], keeping every `stride`-th state and the final one.
Trajectory evolve(const Field& u0, const HullPoint& g, const Nonlinearity& nl, double t_end, double dt,
                  int stride = 1, SolverOptions opts = {});

/// Propagates psi0 along a stride-1 base trajectory.
Trajectory evolve_linearized(const Trajectory& base, const Field& psi0);

/// Keep only modes |k| < n/2 (zero Nyquist).
void project_resolved(Spectrum& c);

}  // namespace cpl
