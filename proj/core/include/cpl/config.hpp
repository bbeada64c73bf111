#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cpl/forcing.hpp"
#include "cpl/solver.hpp"
#include "cpl/spectral.hpp"

namespace cpl {

/// Generating signal of the hull.
///   none     - zero signal
///   modes    - constant + sum of amp:freq:phase terms
///   appendix - the built-in adaptive dyadic series, times `scale`
struct ForcingConfig {
  std::string kind = "none";
  std::vector<Mode> modes;
  double constant = 0.0;
  double scale = 1.0;
  double offset = 0.0;  // hull point f . offset

  bool operator==(const ForcingConfig&) const = default;
};

/// One nonlinearity coefficient: value + forcing * (forcing signal).
struct CoefficientConfig {
  double value = 0.0;
  double forcing = 0.0;

  bool operator==(const CoefficientConfig&) const = default;
};

struct DiagnosticToggles {
  bool snapshots = true;
  bool zeros = false;
  bool omega = false;
  bool phase = false;
  bool spectrum = false;

  bool operator==(const DiagnosticToggles&) const = default;
};

struct ZerosConfig {
  std::string partner = "sin_2";  // second initial condition of the monitored pair
  double partner_amplitude = 1.0;
  double rel_tol = 1e-9;

  bool operator==(const ZerosConfig&) const = default;
};

struct OmegaConfig {
  double horizon = 0.0;  // 0: time.t_end
  double dt = 0.0;       // 0: time.dt
  int stride = 100;
  double transient = -1.0;  // negative: 20% of horizon
  double eps_cluster = 0.0;
  double homogeneity_tol = 1e-6;
  double hull_eps = 0.05;
  double orbit_eps = 1e-4;
  double recurrence_eps = 0.02;

  bool operator==(const OmegaConfig&) const = default;
};

struct PhaseConfig {
  double flag_tol = 1e-3;
  double hull_eps = 0.05;

  bool operator==(const PhaseConfig&) const = default;
};

struct SpectrumConfig {
  std::string base = "zero";  // zero | initial
  int m = 5;
  int reorth_every = 10;
  double window = 2000.0;
  double dt = 0.0;  // 0: time.dt
  double center_band = 0.05;
  std::uint64_t seed = 1;

  bool operator==(const SpectrumConfig&) const = default;
};

struct ScenarioConfig {
  std::string name = "scenario";

  int n = 64;

  double dt = 1e-3;
  double t_end = 10.0;
  double transient = 0.0;
  int stride = 10;

  ForcingConfig forcing;
  std::array<CoefficientConfig, 5> coef{};  // A B C D E

  std::string ic = "sin";
  double ic_amplitude = 1.0;
  double ic_shift = 0.0;

  DiagnosticToggles diagnostics;
  ZerosConfig zeros;
  OmegaConfig omega;
  PhaseConfig phase;
  SpectrumConfig spectrum;
  SolverOptions solver;

  std::string output_dir = "out";

  /// "section.key" entries present in the parsed text. Serialization emits
  /// only these when non-empty. Not part of equality.
  std::vector<std::string> explicit_keys;

  bool operator==(const ScenarioConfig& o) const;

  QuasiPeriodicSignal forcing_signal() const;
  HullPoint hull() const;
  Nonlinearity nonlinearity() const;
  Field initial(const CircleGrid& grid) const;
  Field partner(const CircleGrid& grid) const;
};

/// Sectioned key = value text, '#' comments. Throws ParseError or ValidationError.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Canonical text: fixed section and key order, shortest round-trip numbers.
std::string serialize(const ScenarioConfig& cfg);

/// Checks cross-field constraints; throws ValidationError.
void validate(const ScenarioConfig& cfg);

/// Initial condition presets: sin, sin_k, const:c, random:seed:modes.
/// Throws ValidationError on a malformed spec.
Field make_initial(std::string_view spec, const CircleGrid& grid, double amplitude = 1.0, double shift = 0.0);

}  // namespace cpl
