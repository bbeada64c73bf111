#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cpl/config.hpp"
#include "cpl/io.hpp"

namespace cpl {

/// Version string recorded in manifests.
const char* tool_version();

/// Replaces every seed in the config: the spectrum frame seed and the seed of
/// any random:seed:modes preset.
void apply_seed(ScenarioConfig& cfg, std::uint64_t seed);

/// Evolves the scenario, runs the enabled diagnostics and writes artifacts plus
/// manifest.json under cfg.output_dir. Module errors are recorded in the
/// returned manifest rather than thrown. `log` receives progress lines.
RunManifest run_scenario(const ScenarioConfig& cfg, std::ostream* log = nullptr);

struct AppendixEntry {
  int n;
  double F;    // F(2^n)
  double phi;  // exp(F(2^n))
  bool holds;  // phi >= bound
};

struct AppendixWindow {
  int m;
  double min_F;  // min of F over [0, 2^m]
  double argmin;
};

struct AppendixReport {
  double bound = 0.0;     // exp(-2 pi - 2)
  double constant = 0.0;  // F(2^n), n >= 1, by the term-by-term series
  double max_deviation = 0.0;  // max |F(2^n) - constant|
  std::vector<AppendixEntry> entries;
  std::vector<AppendixWindow> windows;
  bool holds = true;
};

/// Evaluates phi(2^n) = exp(F(2^n)) for n = 1..n_max from the closed-form
/// integral and the running minimum of F over [0, 2^m] for
/// m = 1..min(n_max, max_window). n_max must not exceed 30.
AppendixReport verify_appendix(int n_max, int max_window = 14);

void write_report(std::ostream& os, const AppendixReport& r);

}  // namespace cpl
