#include "cpl/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "cpl/error.hpp"

namespace cpl {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(trim(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, out);
  return r.ec == std::errc() && r.ptr == end;
}

// Shortest round-trip digits; fixed notation unless the magnitude is extreme.
std::string format_double(double v) {
  char buf[400];
  const double a = std::abs(v);
  const auto fmt = a == 0.0 || (a >= 1e-5 && a < 1e16) ? std::chars_format::fixed : std::chars_format::scientific;
  const auto r = std::to_chars(buf, buf + sizeof buf, v, fmt);
  return {buf, r.ptr};
}

// Syntax problems are ParseErrors at the offending line.
struct BadValue {
  std::string reason;
};

double to_double(std::string_view s) {
  double v;
  if (!parse_number(s, v) || !std::isfinite(v)) throw BadValue{"expected a finite number, got '" + std::string(s) + "'"};
  return v;
}

std::string format_modes(const std::vector<Mode>& modes) {
  std::string out;
  for (const auto& m : modes) {
    if (!out.empty()) out += ", ";
    out += format_double(m.amplitude) + ":" + format_double(m.frequency) + ":" + format_double(m.phase);
  }
  return out;
}

std::vector<Mode> parse_modes(std::string_view s) {
  std::vector<Mode> out;
  if (trim(s).empty()) return out;
  for (auto term : split(s, ',')) {
    const auto parts = split(term, ':');
    if (parts.size() != 3) throw BadValue{"mode '" + std::string(term) + "' is not amp:freq:phase"};
    out.push_back({to_double(parts[0]), to_double(parts[1]), to_double(parts[2])});
  }
  return out;
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <class Ref>
Key real(const char* sec, const char* name, Ref ref) {
  return {sec, name, [ref](ScenarioConfig& c, std::string_view v) { ref(c) = to_double(v); },
          [ref](const ScenarioConfig& c) { return format_double(ref(const_cast<ScenarioConfig&>(c))); }};
}

template <class Ref>
Key integer(const char* sec, const char* name, Ref ref) {
  return {sec, name,
          [ref](ScenarioConfig& c, std::string_view v) {
            auto& target = ref(c);
            std::remove_reference_t<decltype(target)> x;
            if (!parse_number(v, x)) throw BadValue{"expected an integer, got '" + std::string(v) + "'"};
            target = x;
          },
          [ref](const ScenarioConfig& c) { return std::to_string(ref(const_cast<ScenarioConfig&>(c))); }};
}

template <class Ref>
Key boolean(const char* sec, const char* name, Ref ref) {
  return {sec, name,
          [ref](ScenarioConfig& c, std::string_view v) {
            if (v == "true") ref(c) = true;
            else if (v == "false") ref(c) = false;
            else throw BadValue{"expected true or false, got '" + std::string(v) + "'"};
          },
          [ref](const ScenarioConfig& c) { return std::string(ref(const_cast<ScenarioConfig&>(c)) ? "true" : "false"); }};
}

template <class Ref>
Key text(const char* sec, const char* name, Ref ref) {
  return {sec, name, [ref](ScenarioConfig& c, std::string_view v) { ref(c) = std::string(v); },
          [ref](const ScenarioConfig& c) { return ref(const_cast<ScenarioConfig&>(c)); }};
}

#define CPL_REF(expr) [](ScenarioConfig & c) -> auto& { return expr; }

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    k.push_back(text("scenario", "name", CPL_REF(c.name)));
    k.push_back(integer("grid", "n", CPL_REF(c.n)));
    k.push_back(real("time", "dt", CPL_REF(c.dt)));
    k.push_back(real("time", "t_end", CPL_REF(c.t_end)));
    k.push_back(real("time", "transient", CPL_REF(c.transient)));
    k.push_back(integer("time", "stride", CPL_REF(c.stride)));
    k.push_back(text("forcing", "kind", CPL_REF(c.forcing.kind)));
    k.push_back({"forcing", "modes",
                 [](ScenarioConfig& c, std::string_view v) { c.forcing.modes = parse_modes(v); },
                 [](const ScenarioConfig& c) { return format_modes(c.forcing.modes); }});
    k.push_back(real("forcing", "constant", CPL_REF(c.forcing.constant)));
    k.push_back(real("forcing", "scale", CPL_REF(c.forcing.scale)));
    k.push_back(real("forcing", "offset", CPL_REF(c.forcing.offset)));
    k.push_back(real("nonlinearity", "A", CPL_REF(c.coef[0].value)));
    k.push_back(real("nonlinearity", "A_forcing", CPL_REF(c.coef[0].forcing)));
    k.push_back(real("nonlinearity", "B", CPL_REF(c.coef[1].value)));
    k.push_back(real("nonlinearity", "B_forcing", CPL_REF(c.coef[1].forcing)));
    k.push_back(real("nonlinearity", "C", CPL_REF(c.coef[2].value)));
    k.push_back(real("nonlinearity", "C_forcing", CPL_REF(c.coef[2].forcing)));
    k.push_back(real("nonlinearity", "D", CPL_REF(c.coef[3].value)));
    k.push_back(real("nonlinearity", "D_forcing", CPL_REF(c.coef[3].forcing)));
    k.push_back(real("nonlinearity", "E", CPL_REF(c.coef[4].value)));
    k.push_back(real("nonlinearity", "E_forcing", CPL_REF(c.coef[4].forcing)));
    k.push_back(text("initial", "ic", CPL_REF(c.ic)));
    k.push_back(real("initial", "amplitude", CPL_REF(c.ic_amplitude)));
    k.push_back(real("initial", "shift", CPL_REF(c.ic_shift)));
    k.push_back(boolean("diagnostics", "snapshots", CPL_REF(c.diagnostics.snapshots)));
    k.push_back(boolean("diagnostics", "zeros", CPL_REF(c.diagnostics.zeros)));
    k.push_back(boolean("diagnostics", "omega", CPL_REF(c.diagnostics.omega)));
    k.push_back(boolean("diagnostics", "phase", CPL_REF(c.diagnostics.phase)));
    k.push_back(boolean("diagnostics", "spectrum", CPL_REF(c.diagnostics.spectrum)));
    k.push_back(text("zeros", "partner", CPL_REF(c.zeros.partner)));
    k.push_back(real("zeros", "partner_amplitude", CPL_REF(c.zeros.partner_amplitude)));
    k.push_back(real("zeros", "rel_tol", CPL_REF(c.zeros.rel_tol)));
    k.push_back(real("omega", "horizon", CPL_REF(c.omega.horizon)));
    k.push_back(real("omega", "dt", CPL_REF(c.omega.dt)));
    k.push_back(integer("omega", "stride", CPL_REF(c.omega.stride)));
    k.push_back(real("omega", "transient", CPL_REF(c.omega.transient)));
    k.push_back(real("omega", "eps_cluster", CPL_REF(c.omega.eps_cluster)));
    k.push_back(real("omega", "homogeneity_tol", CPL_REF(c.omega.homogeneity_tol)));
    k.push_back(real("omega", "hull_eps", CPL_REF(c.omega.hull_eps)));
    k.push_back(real("omega", "orbit_eps", CPL_REF(c.omega.orbit_eps)));
    k.push_back(real("omega", "recurrence_eps", CPL_REF(c.omega.recurrence_eps)));
    k.push_back(real("phase", "flag_tol", CPL_REF(c.phase.flag_tol)));
    k.push_back(real("phase", "hull_eps", CPL_REF(c.phase.hull_eps)));
    k.push_back(text("spectrum", "base", CPL_REF(c.spectrum.base)));
    k.push_back(integer("spectrum", "m", CPL_REF(c.spectrum.m)));
    k.push_back(integer("spectrum", "reorth_every", CPL_REF(c.spectrum.reorth_every)));
    k.push_back(real("spectrum", "window", CPL_REF(c.spectrum.window)));
    k.push_back(real("spectrum", "dt", CPL_REF(c.spectrum.dt)));
    k.push_back(real("spectrum", "center_band", CPL_REF(c.spectrum.center_band)));
    k.push_back(integer("spectrum", "seed", CPL_REF(c.spectrum.seed)));
    k.push_back(boolean("solver", "dealias", CPL_REF(c.solver.dealias)));
    k.push_back(real("solver", "blowup_ceiling", CPL_REF(c.solver.blowup_ceiling)));
    k.push_back(boolean("solver", "zero_mean", CPL_REF(c.solver.zero_mean)));
    k.push_back(text("output", "dir", CPL_REF(c.output_dir)));
    return k;
  }();
  return keys;
}

#undef CPL_REF

bool is_section(std::string_view s) {
  return std::any_of(schema().begin(), schema().end(), [&](const Key& k) { return s == k.section; });
}

const Key* find_key(std::string_view sec, std::string_view name) {
  for (const auto& k : schema())
    if (sec == k.section && name == k.name) return &k;
  return nullptr;
}

// Uniform in [-1, 1) from the top 53 bits; independent of the standard library.
double symmetric_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1p-52 - 1.0; }

template <class T>
T spec_number(std::string_view s, std::string_view spec) {
  T v;
  if (!parse_number(s, v)) throw ValidationError("initial.ic", "malformed preset '" + std::string(spec) + "'");
  return v;
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return name == o.name && n == o.n && dt == o.dt && t_end == o.t_end && transient == o.transient &&
         stride == o.stride && forcing == o.forcing && coef == o.coef && ic == o.ic &&
         ic_amplitude == o.ic_amplitude && ic_shift == o.ic_shift && diagnostics == o.diagnostics &&
         zeros == o.zeros && omega == o.omega && phase == o.phase && spectrum == o.spectrum && solver == o.solver &&
         output_dir == o.output_dir;
}

QuasiPeriodicSignal ScenarioConfig::forcing_signal() const {
  if (forcing.kind == "appendix")
    return QuasiPeriodicSignal::dyadic().scaled(forcing.scale) + QuasiPeriodicSignal::constant(forcing.constant);
  if (forcing.kind == "modes") return QuasiPeriodicSignal::from_modes(forcing.modes, forcing.constant);
  return QuasiPeriodicSignal::constant(0.0);
}

HullPoint ScenarioConfig::hull() const { return make_hull_point(forcing_signal(), forcing.offset); }

Nonlinearity ScenarioConfig::nonlinearity() const {
  const auto f = forcing_signal();
  auto coefficient = [&](const CoefficientConfig& c) {
    auto s = QuasiPeriodicSignal::constant(c.value);
    if (c.forcing != 0.0) s += f.scaled(c.forcing);
    return s;
  };
  return {coefficient(coef[0]), coefficient(coef[1]), coefficient(coef[2]), coefficient(coef[3]),
          coefficient(coef[4])};
}

Field ScenarioConfig::initial(const CircleGrid& grid) const { return make_initial(ic, grid, ic_amplitude, ic_shift); }

Field ScenarioConfig::partner(const CircleGrid& grid) const {
  return make_initial(zeros.partner, grid, zeros.partner_amplitude, 0.0);
}

Field make_initial(std::string_view spec, const CircleGrid& grid, double amplitude, double shift) {
  if (spec == "sin") return Field::from_function(grid, [&](double x) { return amplitude * std::sin(x + shift); });
  if (spec.starts_with("sin_")) {
    const int k = spec_number<int>(spec.substr(4), spec);
    if (k < 1 || k >= grid.size() / 2) throw ValidationError("initial.ic", "wavenumber out of range in '" + std::string(spec) + "'");
    return Field::from_function(grid, [&](double x) { return amplitude * std::sin(k * (x + shift)); });
  }
  if (spec.starts_with("const:")) return Field::constant(grid, amplitude * spec_number<double>(spec.substr(6), spec));
  if (spec.starts_with("random:")) {
    const auto parts = split(spec.substr(7), ':');
    if (parts.size() != 2) throw ValidationError("initial.ic", "expected random:seed:modes");
    const auto seed = spec_number<std::uint64_t>(parts[0], spec);
    const int modes = spec_number<int>(parts[1], spec);
    if (modes < 1 || modes >= grid.size() / 2) throw ValidationError("initial.ic", "mode count out of range");
    std::mt19937_64 rng(seed);
    std::vector<double> a(static_cast<std::size_t>(modes) + 1), b(a.size());
    for (int k = 0; k <= modes; ++k) {
      a[static_cast<std::size_t>(k)] = symmetric_unit(rng) / std::max(k, 1);
      b[static_cast<std::size_t>(k)] = k == 0 ? 0.0 : symmetric_unit(rng) / k;
    }
    auto u = Field::from_function(grid, [&](double x) {
      double s = 0.0;
      for (int k = 0; k <= modes; ++k)
        s += a[static_cast<std::size_t>(k)] * std::cos(k * (x + shift)) + b[static_cast<std::size_t>(k)] * std::sin(k * (x + shift));
      return s;
    });
    const double sup = u.sup_norm();
    return sup > 0.0 ? u * (amplitude / sup) : u;
  }
  throw ValidationError("initial.ic", "unknown preset '" + std::string(spec) + "'");
}

void validate(const ScenarioConfig& c) {
  if (c.n < 16 || (c.n & (c.n - 1)) != 0) throw ValidationError("grid.n", "must be a power of two >= 16");
  if (!(c.dt > 0.0)) throw ValidationError("time.dt", "must be positive");
  if (!(c.t_end > 0.0)) throw ValidationError("time.t_end", "must be positive");
  if (c.t_end < c.dt) throw ValidationError("time.t_end", "shorter than one step");
  if (c.transient < 0.0 || c.transient >= c.t_end) throw ValidationError("time.transient", "must lie in [0, t_end)");
  if (c.stride < 1) throw ValidationError("time.stride", "must be at least 1");
  if (c.forcing.kind != "none" && c.forcing.kind != "modes" && c.forcing.kind != "appendix")
    throw ValidationError("forcing.kind", "expected none, modes or appendix");
  if (!c.forcing.modes.empty() && c.forcing.kind != "modes")
    throw ValidationError("forcing.modes", "only valid with kind = modes");
  for (const auto& m : c.forcing.modes)
    if (!(m.frequency > 0.0)) throw ValidationError("forcing.modes", "frequencies must be positive");
  const CircleGrid grid(c.n);
  make_initial(c.ic, grid, c.ic_amplitude, c.ic_shift);
  try {
    make_initial(c.zeros.partner, grid, c.zeros.partner_amplitude);
  } catch (const ValidationError& e) {
    throw ValidationError("zeros.partner", e.what());
  }
  if (!(c.zeros.rel_tol > 0.0)) throw ValidationError("zeros.rel_tol", "must be positive");
  if (c.omega.horizon < 0.0) throw ValidationError("omega.horizon", "must be non-negative");
  if (c.omega.dt < 0.0) throw ValidationError("omega.dt", "must be non-negative");
  if (c.omega.stride < 1) throw ValidationError("omega.stride", "must be at least 1");
  if (c.omega.eps_cluster < 0.0) throw ValidationError("omega.eps_cluster", "must be non-negative");
  for (auto [key, v] : {std::pair{"omega.homogeneity_tol", c.omega.homogeneity_tol},
                        {"omega.hull_eps", c.omega.hull_eps},
                        {"omega.orbit_eps", c.omega.orbit_eps},
                        {"omega.recurrence_eps", c.omega.recurrence_eps},
                        {"phase.flag_tol", c.phase.flag_tol},
                        {"phase.hull_eps", c.phase.hull_eps},
                        {"spectrum.window", c.spectrum.window},
                        {"spectrum.center_band", c.spectrum.center_band},
                        {"solver.blowup_ceiling", c.solver.blowup_ceiling}})
    if (!(v > 0.0)) throw ValidationError(key, "must be positive");
  if (c.spectrum.base != "zero" && c.spectrum.base != "initial")
    throw ValidationError("spectrum.base", "expected zero or initial");
  if (c.spectrum.m < 1 || c.spectrum.m > c.n / 4) throw ValidationError("spectrum.m", "must lie in [1, n/4]");
  if (c.spectrum.reorth_every < 1) throw ValidationError("spectrum.reorth_every", "must be at least 1");
  if (c.spectrum.dt < 0.0) throw ValidationError("spectrum.dt", "must be non-negative");
  if (c.output_dir.empty()) throw ValidationError("output.dir", "must not be empty");
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!is_section(section)) throw ParseError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (section.empty()) throw ParseError(line_no, "key '" + std::string(key) + "' outside any section");
    const Key* k = find_key(section, key);
    if (!k) throw ParseError(line_no, "unknown key '" + std::string(key) + "' in [" + section + "]");
    const std::string path = section + "." + std::string(key);
    if (std::find(cfg.explicit_keys.begin(), cfg.explicit_keys.end(), path) != cfg.explicit_keys.end())
      throw ParseError(line_no, "duplicate key '" + path + "'");
    try {
      k->set(cfg, value);
    } catch (const BadValue& e) {
      throw ParseError(line_no, path + ": " + e.reason);
    }
    cfg.explicit_keys.push_back(path);
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ScenarioConfig& cfg) {
  const auto& given = cfg.explicit_keys;
  std::string out;
  std::string current;
  for (const auto& k : schema()) {
    const std::string path = std::string(k.section) + "." + k.name;
    if (!given.empty() && std::find(given.begin(), given.end(), path) == given.end()) continue;
    if (current != k.section) {
      if (!out.empty()) out += '\n';
      out += "[" + std::string(k.section) + "]\n";
      current = k.section;
    }
    out += std::string(k.name) + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace cpl
