#include "cpl/solver.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cpl/error.hpp"

namespace cpl {
namespace {

constexpr int kContourPoints = 32;

int work_size(const CircleGrid& grid, bool dealias) { return dealias ? 3 * grid.size() / 2 : grid.size(); }

// Copy resolved modes 0 .. n/2-1 into a (possibly larger) work spectrum.
void pad_into(const Spectrum& c, Spectrum& pad) {
  const std::size_t keep = c.size() - 1;
  std::copy(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(keep), pad.begin());
  std::fill(pad.begin() + static_cast<std::ptrdiff_t>(keep), pad.end(), Complex{});
}

void differentiate(Spectrum& c) {
  for (std::size_t k = 0; k < c.size(); ++k) c[k] *= Complex(0.0, static_cast<double>(k));
}

// Truncate a work-grid spectrum back to the resolved modes.
void truncate_into(const Spectrum& work, Spectrum& out) {
  const std::size_t keep = out.size() - 1;
  std::copy(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(keep), out.begin());
  out.back() = 0.0;
}

double spectral_sup_bound(const Spectrum& c) {
  double b = std::abs(c[0]);
  for (std::size_t k = 1; k < c.size(); ++k) b += 2.0 * std::abs(c[k]);
  return b;
}

}  // namespace

void project_resolved(Spectrum& c) {
  c.back() = 0.0;
  c.front() = c.front().real();
}

bool Trajectory::compatible_with(const Trajectory& other) const {
  if (samples.empty() || other.samples.empty()) return false;
  if (grid() != other.grid() || dt != other.dt || stride != other.stride) return false;
  if (!forcing.same_family(other.forcing) || forcing.offset != other.forcing.offset) return false;
  if (!(nonlinearity == other.nonlinearity) || !(options == other.options)) return false;
  if (samples.size() != other.samples.size()) return false;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (samples[i].t != other.samples[i].t) return false;
  return true;
}

EtdCoefficients::EtdCoefficients(int n_modes, double h) : dt(h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("time step must be positive");
  const auto m = static_cast<std::size_t>(n_modes);
  e.resize(m), e2.resize(m), q.resize(m), f1.resize(m), f2.resize(m), f3.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double z0 = -h * static_cast<double>(k * k);
    e[k] = std::exp(z0);
    e2[k] = std::exp(0.5 * z0);
    double sq = 0, s1 = 0, s2 = 0, s3 = 0;
    for (int j = 1; j <= kContourPoints; ++j) {
      const Complex z = z0 + std::polar(1.0, std::numbers::pi * (j - 0.5) / kContourPoints);
      const Complex ez = std::exp(z);
      const Complex z3 = z * z * z;
      sq += ((std::exp(0.5 * z) - 1.0) / z).real();
      s1 += ((-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3).real();
      s2 += ((2.0 + z + ez * (z - 2.0)) / z3).real();
      s3 += ((-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3).real();
    }
    // Upper half contour; conjugate symmetry makes the real part the full mean.
    q[k] = h * sq / kContourPoints;
    f1[k] = h * s1 / kContourPoints;
    f2[k] = h * s2 / kContourPoints;
    f3[k] = h * s3 / kContourPoints;
  }
}

Spectrum BaseStep::at(double theta) const {
  if (theta == 0.0) return *u0;
  if (theta == 1.0) return *u1;
  const double t2 = theta * theta, t3 = t2 * theta;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + theta;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  Spectrum out(u0->size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = h00 * (*u0)[k] + h10 * dt * (*du0)[k] + h01 * (*u1)[k] + h11 * dt * (*du1)[k];
  return out;
}

SemiflowStepper::SemiflowStepper(CircleGrid grid, HullPoint forcing, Nonlinearity nl, double dt,
                                 SolverOptions opts)
    : grid_(grid),
      forcing_(std::move(forcing)),
      nl_(std::move(nl)),
      dt_(dt),
      opts_(opts),
      etd_(grid.modes(), dt),
      work_n_(work_size(grid, opts.dealias)) {
  const auto m = static_cast<std::size_t>(grid.modes());
  u_.assign(m, {});
  for (auto* s : {&na_, &nb_, &nc_, &nv_, &a_, &b_, &c_}) s->assign(m, {});
  pad_.assign(static_cast<std::size_t>(work_n_ / 2 + 1), {});
  uu_.resize(static_cast<std::size_t>(work_n_));
  ux_.resize(static_cast<std::size_t>(work_n_));
  ff_.resize(static_cast<std::size_t>(work_n_));
}

void SemiflowStepper::reset(const Field& u0, double t0) {
  if (u0.grid() != grid_) throw std::invalid_argument("initial field is on a different grid");
  if (!u0.all_finite()) throw NonFinite(t0);
  u_ = to_spectrum(u0);
  project_resolved(u_);
  if (opts_.zero_mean) u_[0] = 0.0;
  t0_ = t0;
  steps_ = 0;
}

Field SemiflowStepper::state() const { return from_spectrum(grid_, u_); }

void SemiflowStepper::nonlinear_term(const Spectrum& u, double t, Spectrum& out) const {
  Fourier& fft = Fourier::local(work_n_);
  pad_into(u, pad_);
  fft.inverse(pad_, uu_);
  differentiate(pad_);
  fft.inverse(pad_, ux_);
  const auto coef = nl_.at(forcing_.offset + t);
  for (std::size_t i = 0; i < ff_.size(); ++i) ff_[i] = coef(uu_[i], ux_[i]).f;
  fft.forward(ff_, pad_);
  truncate_into(pad_, out);
}

Spectrum SemiflowStepper::time_derivative() const {
  Spectrum du(u_.size());
  nonlinear_term(u_, time(), du);
  for (std::size_t k = 0; k < du.size(); ++k) du[k] -= static_cast<double>(k * k) * u_[k];
  return du;
}

void SemiflowStepper::step() {
  const double t = time();
  const double h = dt_;
  const std::size_t m = u_.size();
  nonlinear_term(u_, t, nv_);
  for (std::size_t k = 0; k < m; ++k) a_[k] = etd_.e2[k] * u_[k] + etd_.q[k] * nv_[k];
  nonlinear_term(a_, t + 0.5 * h, na_);
  for (std::size_t k = 0; k < m; ++k) b_[k] = etd_.e2[k] * u_[k] + etd_.q[k] * na_[k];
  nonlinear_term(b_, t + 0.5 * h, nb_);
  for (std::size_t k = 0; k < m; ++k) c_[k] = etd_.e2[k] * a_[k] + etd_.q[k] * (2.0 * nb_[k] - nv_[k]);
  nonlinear_term(c_, t + h, nc_);
  for (std::size_t k = 0; k < m; ++k)
    u_[k] = etd_.e[k] * u_[k] + etd_.f1[k] * nv_[k] + 2.0 * etd_.f2[k] * (na_[k] + nb_[k]) + etd_.f3[k] * nc_[k];
  project_resolved(u_);
  if (opts_.zero_mean) u_[0] = 0.0;
  ++steps_;

  const double bound = spectral_sup_bound(u_);
  if (!std::isfinite(bound)) throw NonFinite(time());
  if (bound > opts_.blowup_ceiling && state().sup_norm() > opts_.blowup_ceiling) throw Blowup(time());
}

TangentStepper::TangentStepper(CircleGrid grid, HullPoint forcing, Nonlinearity nl, double dt, SolverOptions opts)
    : grid_(grid),
      forcing_(std::move(forcing)),
      nl_(std::move(nl)),
      dt_(dt),
      opts_(opts),
      etd_(grid.modes(), dt),
      work_n_(work_size(grid, opts.dealias)) {
  const auto m = static_cast<std::size_t>(grid.modes());
  for (auto* s : {&na_, &nb_, &nc_, &nv_, &a_, &b_, &c_}) s->assign(m, {});
  pad_.assign(static_cast<std::size_t>(work_n_ / 2 + 1), {});
  for (auto* v : {&pp_, &px_, &out_}) v->resize(static_cast<std::size_t>(work_n_));
  for (int s = 0; s < 3; ++s) {
    coef_a_[s].resize(static_cast<std::size_t>(work_n_));
    coef_b_[s].resize(static_cast<std::size_t>(work_n_));
  }
}

void TangentStepper::prepare(const BaseStep& base) {
  if (std::abs(base.dt - dt_) > 1e-12 * dt_) throw std::invalid_argument("base step does not match tangent step");
  Fourier& fft = Fourier::local(work_n_);
  const double thetas[3] = {0.0, 0.5, 1.0};
  for (int s = 0; s < 3; ++s) {
    const Spectrum ub = base.at(thetas[s]);
    pad_into(ub, pad_);
    fft.inverse(pad_, pp_);
    differentiate(pad_);
    fft.inverse(pad_, px_);
    const auto coef = nl_.at(forcing_.offset + base.t0 + thetas[s] * base.dt);
    for (std::size_t i = 0; i < pp_.size(); ++i) {
      const NlValue v = coef(pp_[i], px_[i]);
      coef_a_[s][i] = v.f_p;
      coef_b_[s][i] = v.f_u;
    }
  }
}

void TangentStepper::linear_term(const Spectrum& psi, int stage, Spectrum& out) {
  Fourier& fft = Fourier::local(work_n_);
  pad_into(psi, pad_);
  fft.inverse(pad_, pp_);
  differentiate(pad_);
  fft.inverse(pad_, px_);
  const auto& a = coef_a_[stage];
  const auto& b = coef_b_[stage];
  for (std::size_t i = 0; i < out_.size(); ++i) out_[i] = a[i] * px_[i] + b[i] * pp_[i];
  fft.forward(out_, pad_);
  truncate_into(pad_, out);
}

void TangentStepper::step(Spectrum& psi) {
  const std::size_t m = psi.size();
  linear_term(psi, 0, nv_);
  for (std::size_t k = 0; k < m; ++k) a_[k] = etd_.e2[k] * psi[k] + etd_.q[k] * nv_[k];
  linear_term(a_, 1, na_);
  for (std::size_t k = 0; k < m; ++k) b_[k] = etd_.e2[k] * psi[k] + etd_.q[k] * na_[k];
  linear_term(b_, 1, nb_);
  for (std::size_t k = 0; k < m; ++k) c_[k] = etd_.e2[k] * a_[k] + etd_.q[k] * (2.0 * nb_[k] - nv_[k]);
  linear_term(c_, 2, nc_);
  for (std::size_t k = 0; k < m; ++k)
    psi[k] = etd_.e[k] * psi[k] + etd_.f1[k] * nv_[k] + 2.0 * etd_.f2[k] * (na_[k] + nb_[k]) + etd_.f3[k] * nc_[k];
  project_resolved(psi);
}

Trajectory evolve(const Field& u0, const HullPoint& g, const Nonlinearity& nl, double t_end, double dt, int stride,
                  SolverOptions opts) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw std::invalid_argument("need dt > 0 and t_end >= 0");
  if (stride < 1) throw std::invalid_argument("stride must be positive");
  const auto steps = static_cast<std::int64_t>(std::llround(t_end / dt));
  if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw std::invalid_argument("t_end must be an integer multiple of dt");

  SemiflowStepper stepper(u0.grid(), g, nl, dt, opts);
  stepper.reset(u0);
  Trajectory traj{g, nl, dt, stride, opts, 4, {}};
  traj.samples.reserve(static_cast<std::size_t>(steps / stride + 2));
  traj.samples.push_back({0.0, stepper.state()});
  for (std::int64_t s = 1; s <= steps; ++s) {
    stepper.step();
    if (s % stride == 0 || s == steps) traj.samples.push_back({stepper.time(), stepper.state()});
  }
  return traj;
}

Trajectory evolve_linearized(const Trajectory& base, const Field& psi0) {
  if (base.samples.size() < 2) throw std::invalid_argument("base trajectory needs at least two samples");
  if (base.stride != 1) throw std::invalid_argument("linearized propagation needs a stride-1 base");
  if (psi0.grid() != base.grid()) throw std::invalid_argument("psi0 is on a different grid");

  SemiflowStepper rhs(base.grid(), base.forcing, base.nonlinearity, base.dt, base.options);
  TangentStepper tangent(base.grid(), base.forcing, base.nonlinearity, base.dt, base.options);

  Trajectory out{base.forcing, base.nonlinearity, base.dt, 1, base.options, 4, {}};
  out.samples.reserve(base.samples.size());
  Spectrum psi = to_spectrum(psi0);
  project_resolved(psi);
  out.samples.push_back({base.samples[0].t, from_spectrum(base.grid(), psi)});

  rhs.reset(base.samples[0].state, base.samples[0].t);
  Spectrum u0 = rhs.spectrum(), du0 = rhs.time_derivative();
  for (std::size_t i = 1; i < base.samples.size(); ++i) {
    const double t0 = base.samples[i - 1].t;
    const double gap = base.samples[i].t - t0;
    if (std::abs(gap - base.dt) > 1e-9 * base.dt) throw std::invalid_argument("base samples are not one step apart");
    rhs.reset(base.samples[i].state, base.samples[i].t);
    Spectrum u1 = rhs.spectrum(), du1 = rhs.time_derivative();
    tangent.prepare({t0, base.dt, &u0, &du0, &u1, &du1});
    tangent.step(psi);
    Field f = from_spectrum(base.grid(), psi);
    if (!f.all_finite()) throw NonFinite(base.samples[i].t);
    out.samples.push_back({base.samples[i].t, std::move(f)});
    u0 = std::move(u1);
    du0 = std::move(du1);
  }
  return out;
}

}  // namespace cpl
