#include "cpl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cpl/circleflow.hpp"
#include "cpl/dynamics.hpp"
#include "cpl/error.hpp"
#include "cpl/solver.hpp"
#include "cpl/spectrum.hpp"
#include "cpl/zeronum.hpp"

#ifndef CPL_VERSION
#define CPL_VERSION "0.0.0"
#endif

namespace cpl {
namespace {

namespace fs = std::filesystem;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class Run {
 public:
  Run(const ScenarioConfig& cfg, std::ostream* log) : cfg_(cfg), dir_(cfg.output_dir), log_(log) {}

  void execute(RunManifest& m);

 private:
  void note(const std::string& s) {
    if (log_) *log_ << s << '\n';
  }
  fs::path open(const std::string& rel, std::ofstream& out) {
    const auto p = dir_ / rel;
    out.open(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    written_.push_back(rel);
    return p;
  }
  void snapshot(const std::string& rel, const Field& u, double t, double tau) {
    write_snapshot(dir_ / rel, u, t, tau);
    written_.push_back(rel);
  }

  void trajectory_artifacts(const Trajectory& traj);
  void zeros(const Trajectory& traj);
  void omega();
  void phase(const Trajectory& traj);
  void spectrum();

  const ScenarioConfig& cfg_;
  fs::path dir_;
  std::ostream* log_;
  std::vector<std::string> written_;
  std::ostringstream summary_;
  bool invariant_violated_ = false;

  friend RunManifest cpl::run_scenario(const ScenarioConfig&, std::ostream*);
};

void Run::trajectory_artifacts(const Trajectory& traj) {
  std::ofstream csv;
  open("trajectory.csv", csv);
  csv << "t,tau,sup,mean,l2\n";
  int index = 0;
  for (const auto& s : traj.samples) {
    if (s.t < cfg_.transient) continue;
    const double tau = traj.forcing.offset + s.t;
    csv << g17(s.t) << ',' << g17(tau) << ',' << g17(s.state.sup_norm()) << ',' << g17(s.state.mean()) << ','
        << g17(s.state.l2_norm()) << '\n';
    if (cfg_.diagnostics.snapshots) {
      char name[32];
      std::snprintf(name, sizeof name, "snapshots/%06d.bin", index);
      snapshot(name, s.state, s.t, tau);
    }
    ++index;
  }
  const auto& last = traj.samples.back();
  summary_ << "trajectory: " << traj.samples.size() << " samples, final t=" << g6(last.t)
           << " sup=" << g6(last.state.sup_norm()) << " mean=" << g6(last.state.mean()) << "\n";
}

void Run::zeros(const Trajectory& traj) {
  note("zeros: evolving partner " + cfg_.zeros.partner);
  const auto other = evolve(cfg_.partner(traj.grid()), cfg_.hull(), cfg_.nonlinearity(), cfg_.t_end, cfg_.dt,
                            cfg_.stride, cfg_.solver);
  const auto series = monitor_difference(traj, other, cfg_.zeros.rel_tol);
  std::ofstream csv;
  open("zeros.csv", csv);
  write_csv(csv, series);
  int ambiguous = 0;
  for (const auto& c : series.counts) ambiguous += c.ambiguous;
  summary_ << "zeros: partner=" << cfg_.zeros.partner << " samples=" << series.times.size()
           << " first=" << series.counts.front().count << " last=" << series.counts.back().count
           << " drops=" << series.drop_events.size() << " ambiguous=" << ambiguous
           << " increases=" << series.violations.size() << " verdict="
           << (series.violations.empty() ? "non-increasing" : "VIOLATED") << "\n";
  if (!series.violations.empty()) invariant_violated_ = true;
}

void Run::omega() {
  const double horizon = cfg_.omega.horizon > 0.0 ? cfg_.omega.horizon : cfg_.t_end;
  const double dt = cfg_.omega.dt > 0.0 ? cfg_.omega.dt : cfg_.dt;
  note("omega: sampling horizon " + g6(horizon));
  OmegaOptions o;
  o.transient = cfg_.omega.transient;
  o.eps_cluster = cfg_.omega.eps_cluster;
  o.homogeneity_tol = cfg_.omega.homogeneity_tol;
  o.solver = cfg_.solver;
  const auto grid = CircleGrid(cfg_.n);
  const auto s = sample_omega(cfg_.initial(grid), cfg_.hull(), cfg_.nonlinearity(), horizon, dt, cfg_.omega.stride, o);
  std::ofstream csv;
  open("omega_index.csv", csv);
  csv << "t,tau,cluster,homog,zcount\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& snap = s.snapshots[i];
    csv << g17(snap.t) << ',' << g17(snap.hull.offset) << ',' << snap.cluster << ',' << (snap.homogeneous ? 1 : 0)
        << ',' << snap.zcount << '\n';
    if (cfg_.diagnostics.snapshots) {
      char name[32];
      std::snprintf(name, sizeof name, "omega/%06zu.bin", i);
      snapshot(name, snap.state, snap.t, snap.hull.offset);
    }
  }
  const auto h = classify_homogeneity(s, cfg_.omega.homogeneity_tol);
  const auto fiber = fiber_multiplicity(s, cfg_.omega.hull_eps, cfg_.omega.orbit_eps);
  const auto rec = recurrence_diagnostic(s, cfg_.omega.recurrence_eps);
  int homogeneous = 0;
  for (const auto& snap : s.snapshots) homogeneous += snap.homogeneous;
  summary_ << "omega: snapshots=" << s.size() << " transient=" << g6(s.transient) << " clusters=" << s.cluster_count
           << " homogeneous=" << homogeneous << " class=" << to_string(h) << "\n"
           << "omega fiber: max_multiplicity=" << fiber.max_multiplicity
           << " singleton_fraction=" << g6(fiber.singleton_fraction) << " bins=" << fiber.bins.size() << "\n"
           << "omega recurrence: eps=" << g6(rec.eps) << " returned=" << rec.returned
           << " median_gap=" << g6(rec.median_gap) << " max_gap=" << g6(rec.max_gap)
           << " minimal_like=" << (rec.minimal_like ? "yes" : "no") << "\n";
}

void Run::phase(const Trajectory& traj) {
  note("phase: extracting");
  const auto track = extract_phase(traj);
  ReductionOptions ro;
  ro.flag_tol = cfg_.phase.flag_tol;
  ro.hull_eps = cfg_.phase.hull_eps;
  const auto rep = verify_reduction(traj, track, ro);
  std::ofstream csv;
  open("phase.csv", csv);
  write_csv(csv, track);
  double dev = 0.0;
  for (std::size_t i = 0; i < track.times.size(); ++i) dev = std::max(dev, std::abs(track.c[i] - track.times[i]));
  const double span = track.times.back() - track.times.front();
  const double rate = span > 0.0 ? (track.c.back() - track.c.front()) / span : 0.0;
  summary_ << "phase: L=" << g6(track.L) << " rate=" << g6(rate) << " max|c(t)-t|=" << g6(dev)
           << " verdict=" << (dev <= cfg_.phase.flag_tol ? "c(t)~t" : "c(t)!~t") << "\n"
           << "phase reduction: max_residual=" << g6(rep.max_residual) << " flagged=" << rep.flagged_times.size()
           << " min_phixx=" << g6(rep.min_phixx) << " fiber_pairs=" << rep.fiber_pairs << "\n";
}

void Run::spectrum() {
  const double dt = cfg_.spectrum.dt > 0.0 ? cfg_.spectrum.dt : cfg_.dt;
  note("spectrum: window " + g6(cfg_.spectrum.window));
  SpectrumOptions so;
  so.m = cfg_.spectrum.m;
  so.reorth_every = cfg_.spectrum.reorth_every;
  so.window = cfg_.spectrum.window;
  so.center_band = cfg_.spectrum.center_band;
  so.seed = cfg_.spectrum.seed;
  const CircleGrid grid(cfg_.n);
  const bool zero = cfg_.spectrum.base == "zero";
  const auto est = lyapunov_exponents(zero ? Field(grid) : cfg_.initial(grid), cfg_.hull(), cfg_.nonlinearity(), dt,
                                      so, zero ? 0.0 : cfg_.transient, cfg_.solver);
  std::ofstream csv, dims;
  open("spectrum.csv", csv);
  write_csv(csv, est);
  open("spectrum_dims.csv", dims);
  write_dims_csv(dims, est);
  summary_ << "spectrum: base=" << cfg_.spectrum.base << " window=" << g6(est.window)
           << " band=" << g6(est.center_band) << "\n";
  for (std::size_t i = 0; i < est.exponents.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof line, "  %2zu  %+.4f  +- %.4f\n", i + 1, est.exponents[i], est.std_error[i]);
    summary_ << line;
  }
  summary_ << "spectrum dims: dim_u=" << est.dims.dim_u << " dim_c=" << est.dims.dim_c << " N_u=" << est.dims.N_u
           << "\n";
}

void Run::execute(RunManifest& m) {
  fs::create_directories(dir_);
  for (const char* sub : {"snapshots", "omega"}) fs::remove_all(dir_ / sub);
  if (cfg_.diagnostics.snapshots) fs::create_directories(dir_ / "snapshots");
  if (cfg_.diagnostics.snapshots && cfg_.diagnostics.omega) fs::create_directories(dir_ / "omega");

  summary_ << "scenario: " << cfg_.name << "\n"
           << "grid: n=" << cfg_.n << " dt=" << g6(cfg_.dt) << " t_end=" << g6(cfg_.t_end)
           << " stride=" << cfg_.stride << "\n";
  try {
    const CircleGrid grid(cfg_.n);
    note("evolving " + cfg_.name);
    const auto traj =
        evolve(cfg_.initial(grid), cfg_.hull(), cfg_.nonlinearity(), cfg_.t_end, cfg_.dt, cfg_.stride, cfg_.solver);
    trajectory_artifacts(traj);
    if (cfg_.diagnostics.zeros) zeros(traj);
    if (cfg_.diagnostics.omega) omega();
    if (cfg_.diagnostics.phase) phase(traj);
    if (cfg_.diagnostics.spectrum) spectrum();
  } catch (const TimedError& e) {
    m.ok = false;
    m.exit_code = 3;
    m.error_time = e.time();
    m.error = e.what();
  } catch (const Error& e) {
    m.ok = false;
    m.exit_code = 3;
    m.error = e.what();
  } catch (const std::invalid_argument& e) {
    m.ok = false;
    m.exit_code = 3;
    m.error = e.what();
  }
  if (!m.ok) {
    const std::string what = m.error;
    m.error_kind = what.substr(0, what.find(" at t="));
    summary_ << "FAILED: " << what << "\n";
  } else if (invariant_violated_) {
    m.ok = false;
    m.exit_code = 4;
    m.error_kind = "invariant";
    m.error = "zero number increased at a non-ambiguous sample";
  }
  std::ofstream out;
  open("summary.txt", out);
  out << summary_.str();
}

}  // namespace

const char* tool_version() { return CPL_VERSION; }

void apply_seed(ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.spectrum.seed = seed;
  auto reseed = [&](std::string& spec) {
    if (!spec.starts_with("random:")) return;
    const auto colon = spec.find(':', 7);
    spec = "random:" + std::to_string(seed) + (colon == std::string::npos ? std::string() : spec.substr(colon));
  };
  reseed(cfg.ic);
  reseed(cfg.zeros.partner);
}

RunManifest run_scenario(const ScenarioConfig& cfg, std::ostream* log) {
  RunManifest m;
  m.scenario = cfg.name;
  m.tool_version = tool_version();
  m.started = utc_now();
  auto canonical = cfg;
  canonical.explicit_keys.clear();
  canonical.output_dir = "-";  // where a run is written does not change what it computes
  m.config_hash = sha256_hex(serialize(canonical));

  Run run(cfg, log);
  try {
    run.execute(m);
  } catch (const std::exception& e) {  // filesystem trouble
    m.ok = false;
    m.exit_code = 3;
    m.error_kind = "io";
    m.error = e.what();
  }
  for (const auto& rel : run.written_) {
    const auto p = run.dir_ / rel;
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) continue;
    m.artifacts.push_back({rel, sha256_file(p), fs::file_size(p)});
  }
  m.finished = utc_now();
  std::error_code ec;
  if (fs::is_directory(run.dir_, ec)) {
    std::ofstream out(run.dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << to_json(m);
  }
  return m;
}

AppendixReport verify_appendix(int n_max, int max_window) {
  if (n_max < 0 || n_max > 30) throw ValidationError("n_max", "must lie in [0, 30]");
  AppendixReport r;
  r.bound = std::exp(-2.0 * std::numbers::pi - 2.0);
  // F(2^n) = sum_k (cos(2^(n-k) pi) - 1): terms k < n vanish, k = n gives -2
  r.constant = -2.0;
  for (int j = 1; j <= 60; ++j) r.constant += std::cos(std::ldexp(std::numbers::pi, -j)) - 1.0;

  const auto f = QuasiPeriodicSignal::dyadic();
  for (int n = 1; n <= n_max; ++n) {
    const double F = f.integral(std::ldexp(1.0, n));
    const double phi = std::exp(F);
    r.entries.push_back({n, F, phi, phi >= r.bound});
    r.max_deviation = std::max(r.max_deviation, std::abs(F - r.constant));
    r.holds = r.holds && phi >= r.bound;
  }

  // Running minimum of F on a 1/16 grid; each discrete local minimum is
  // polished by golden section over the two adjacent cells.
  const int windows = std::min(n_max, max_window);
  if (windows < 1) return r;
  const double h = 1.0 / 16.0;
  const long steps = std::lround(std::ldexp(1.0, windows) / h);
  double best = 0.0, best_t = 0.0;
  double prev2 = 0.0, prev = f.integral(h);
  int next_window = 1;
  auto polish = [&](double c) {
    constexpr double g = 0.6180339887498949;
    double a = std::max(0.0, c - h), b = c + h;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = f.integral(x1), f2 = f.integral(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        b = x2, x2 = x1, f2 = f1, x1 = b - g * (b - a), f1 = f.integral(x1);
      } else {
        a = x1, x1 = x2, f1 = f2, x2 = a + g * (b - a), f2 = f.integral(x2);
      }
    }
    const double x = f1 < f2 ? x1 : x2;
    const double v = std::min(f1, f2);
    if (v < best) best = v, best_t = x;
  };
  if (prev < best) best = prev, best_t = h;
  for (long i = 2; i <= steps; ++i) {
    const double t = static_cast<double>(i) * h;
    const double cur = f.integral(t);
    if (prev <= prev2 && prev <= cur && prev < best + 1e-3) polish(t - h);
    if (cur < best) best = cur, best_t = t;
    prev2 = prev;
    prev = cur;
    if (t == std::ldexp(1.0, next_window)) {
      r.windows.push_back({next_window, best, best_t});
      ++next_window;
    }
  }
  return r;
}

void write_report(std::ostream& os, const AppendixReport& r) {
  os << "bound exp(-2pi-2) = " << g17(r.bound) << "\n"
     << "series constant F(2^n) = " << g17(r.constant) << "  phi = " << g17(std::exp(r.constant)) << "\n"
     << "n,F,phi,holds\n";
  for (const auto& e : r.entries) os << e.n << ',' << g17(e.F) << ',' << g17(e.phi) << ',' << (e.holds ? 1 : 0) << '\n';
  os << "max |F(2^n) - constant| = " << g17(r.max_deviation) << "\n"
     << "m,min_F,min_phi,argmin\n";
  for (const auto& w : r.windows)
    os << w.m << ',' << g17(w.min_F) << ',' << g17(std::exp(w.min_F)) << ',' << g17(w.argmin) << '\n';
  os << "verdict: " << (r.holds ? "bound holds" : "BOUND VIOLATED") << "\n";
}

}  // namespace cpl
