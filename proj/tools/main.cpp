// cpl: run forced parabolic scenarios and export diagnostics.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "cpl/config.hpp"
#include "cpl/error.hpp"
#include "cpl/io.hpp"
#include "cpl/scenario.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kRuntime = 3, kInvariant = 4 };

struct Globals {
  std::string out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

int run_config(const std::string& path, const std::string& only, const Globals& g) {
  cpl::ScenarioConfig cfg;
  try {
    cfg = cpl::load_config(path);
    if (!g.out.empty()) cfg.output_dir = g.out;
    if (g.seed) cpl::apply_seed(cfg, *g.seed);
    if (!only.empty()) {
      auto& d = cfg.diagnostics;
      d.zeros = only == "zeros";
      d.omega = only == "omega";
      d.phase = only == "phase";
      d.spectrum = only == "spectrum";
    }
    cpl::validate(cfg);
  } catch (const cpl::ParseError& e) {
    std::cerr << path << ":" << e.what() << "\n";
    return kValidation;
  } catch (const cpl::ValidationError& e) {
    std::cerr << path << ": invalid " << e.what() << "\n";
    return kValidation;
  } catch (const cpl::Error& e) {
    std::cerr << e.what() << "\n";
    return kValidation;
  }
  const auto m = cpl::run_scenario(cfg, g.quiet ? nullptr : &std::cerr);
  if (!g.quiet) {
    std::ifstream summary(std::filesystem::path(cfg.output_dir) / "summary.txt");
    std::cout << summary.rdbuf();
    std::cout << "manifest: " << (std::filesystem::path(cfg.output_dir) / "manifest.json").string() << " ("
              << m.artifacts.size() << " artifacts)\n";
  }
  if (!m.ok) std::cerr << "error: " << m.error << "\n";
  return m.exit_code;
}

int verify_appendix(int n_max, const Globals& g) {
  cpl::AppendixReport r;
  try {
    r = cpl::verify_appendix(n_max);
  } catch (const cpl::ValidationError& e) {
    std::cerr << "invalid " << e.what() << "\n";
    return kValidation;
  }
  std::ostringstream text;
  cpl::write_report(text, r);
  if (!g.quiet) std::cout << text.str();
  if (!g.out.empty()) {
    std::filesystem::create_directories(g.out);
    std::ofstream(std::filesystem::path(g.out) / "appendix.txt", std::ios::binary) << text.str();
  }
  return r.holds ? kOk : kInvariant;
}

int verify_manifest(const std::string& dir, const Globals& g) {
  std::ifstream in(std::filesystem::path(dir) / "manifest.json", std::ios::binary);
  if (!in) {
    std::cerr << "no manifest.json in " << dir << "\n";
    return kRuntime;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const auto bad = cpl::verify_manifest(cpl::manifest_from_json(ss.str()), dir);
    for (const auto& p : bad) std::cerr << "mismatch: " << p << "\n";
    if (!g.quiet && bad.empty()) std::cout << "manifest verifies\n";
    return bad.empty() ? kOk : kInvariant;
  } catch (const cpl::Error& e) {
    std::cerr << e.what() << "\n";
    return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forced scalar parabolic equations on the circle"};
  app.set_version_flag("--version", cpl::tool_version());
  app.require_subcommand(1);

  Globals g;
  std::uint64_t seed = 0;
  app.add_option("--out", g.out, "Output directory (overrides [output] dir)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random presets and the tangent frame");
  app.add_flag("--quiet", g.quiet, "Suppress progress and summary");

  std::string config;
  int exit_code = kOk;
  for (const char* name : {"simulate", "spectrum", "phase", "omega", "zeros"}) {
    auto* sub = app.add_subcommand(name, std::string(name) == "simulate" ? "Run every diagnostic enabled in the config"
                                                                       : std::string("Run the ") + name + " diagnostic");
    sub->add_option("config", config, "Scenario file")->required()->check(CLI::ExistingFile);
    sub->fallthrough();
    sub->callback([&, name] {
      if (*seed_opt) g.seed = seed;
      exit_code = run_config(config, std::string(name) == "simulate" ? "" : name, g);
    });
  }

  int n_max = 20;
  auto* va = app.add_subcommand("verify-appendix", "Check the closed-form bound at t = 2^n");
  va->add_option("--n-max", n_max, "Largest n")->check(CLI::Range(0, 30));
  va->fallthrough();
  va->callback([&] { exit_code = verify_appendix(n_max, g); });

  std::string dir;
  auto* vm = app.add_subcommand("verify-manifest", "Recompute artifact checksums of a run directory");
  vm->add_option("dir", dir, "Run directory")->required()->check(CLI::ExistingDirectory);
  vm->fallthrough();
  vm->callback([&] { exit_code = verify_manifest(dir, g); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  return exit_code;
}
